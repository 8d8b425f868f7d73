//! Circuit data model: nodes, typed gates, structural validation and graph queries.
//!
//! A circuit is a set of named nodes plus a list of gates. Each gate reads an
//! ordered list of input nodes and writes one output node. Cycles, including
//! self-loops, are allowed. Nodes that are the output of no gate are *free*
//! and carry no constraint.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::scalar::{format_number, Scalar};

/// Name of a node. Reports always speak in these names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        NodeId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<&NodeId> for NodeId {
    fn from(id: &NodeId) -> Self {
        id.clone()
    }
}

/// Position of a gate in [`Circuit::gates`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GateId(pub usize);

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Gate tag without parameters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GateKind {
    Const,
    Scale,
    Copy,
    Add,
    Sub,
    /// Output high when the first input exceeds the second.
    Cmp,
    Or,
    And,
    Not,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::Const,
        GateKind::Scale,
        GateKind::Copy,
        GateKind::Add,
        GateKind::Sub,
        GateKind::Cmp,
        GateKind::Or,
        GateKind::And,
        GateKind::Not,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Const => 0,
            GateKind::Scale | GateKind::Copy | GateKind::Not => 1,
            _ => 2,
        }
    }

    pub fn is_boolean(self) -> bool {
        matches!(self, GateKind::Or | GateKind::And | GateKind::Not)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, GateKind::Const | GateKind::Scale | GateKind::Copy | GateKind::Add | GateKind::Sub)
    }

    pub fn has_parameter(self) -> bool {
        matches!(self, GateKind::Const | GateKind::Scale)
    }

    /// Keyword used by the circuit text format.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Const => "const",
            GateKind::Scale => "scale",
            GateKind::Copy => "copy",
            GateKind::Add => "add",
            GateKind::Sub => "sub",
            GateKind::Cmp => "cmp",
            GateKind::Or => "or",
            GateKind::And => "and",
            GateKind::Not => "not",
        }
    }

    pub fn from_keyword(word: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Gate tag together with its parameter ζ where the tag takes one.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum GateType<S> {
    Const(S),
    Scale(S),
    Copy,
    Add,
    Sub,
    Cmp,
    Or,
    And,
    Not,
}

impl<S: Scalar> GateType<S> {
    pub fn kind(&self) -> GateKind {
        match self {
            GateType::Const(_) => GateKind::Const,
            GateType::Scale(_) => GateKind::Scale,
            GateType::Copy => GateKind::Copy,
            GateType::Add => GateKind::Add,
            GateType::Sub => GateKind::Sub,
            GateType::Cmp => GateKind::Cmp,
            GateType::Or => GateKind::Or,
            GateType::And => GateKind::And,
            GateType::Not => GateKind::Not,
        }
    }

    pub fn zeta(&self) -> Option<S> {
        match *self {
            GateType::Const(z) | GateType::Scale(z) => Some(z),
            _ => None,
        }
    }

    /// Builds the parameter-free gate type for `kind`; `None` for Const and Scale.
    pub fn plain(kind: GateKind) -> Option<Self> {
        Some(match kind {
            GateKind::Copy => GateType::Copy,
            GateKind::Add => GateType::Add,
            GateKind::Sub => GateType::Sub,
            GateKind::Cmp => GateType::Cmp,
            GateKind::Or => GateType::Or,
            GateKind::And => GateType::And,
            GateKind::Not => GateType::Not,
            GateKind::Const | GateKind::Scale => return None,
        })
    }

    pub fn with_zeta(kind: GateKind, zeta: S) -> Self {
        match kind {
            GateKind::Const => GateType::Const(zeta),
            GateKind::Scale => GateType::Scale(zeta),
            other => GateType::plain(other).expect("parameter-free kind"),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Gate<S> {
    pub gate_type: GateType<S>,
    /// Ordered inputs; position matters for Sub and Cmp.
    pub inputs: Vec<NodeId>,
    pub output: NodeId,
}

impl<S: Scalar> Gate<S> {
    pub fn new(gate_type: GateType<S>, inputs: Vec<NodeId>, output: NodeId) -> Self {
        Gate { gate_type, inputs, output }
    }

    pub fn kind(&self) -> GateKind {
        self.gate_type.kind()
    }
}

impl<S: Scalar> fmt::Display for Gate<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}(", self.output, self.kind())?;
        let mut first = true;
        if let Some(z) = self.gate_type.zeta() {
            write!(f, "{}", format_number(z))?;
            first = false;
        }
        for input in &self.inputs {
            if !first {
                f.write_str(", ")?;
            }
            write!(f, "{input}")?;
            first = false;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {0} is not in the circuit")]
    UnknownGate(GateId),
    #[error("node `{0}` is not in the circuit")]
    UnknownNode(NodeId),
}

/// A generalized circuit. Immutable in use; built through the `add_*` methods.
#[derive(Clone, Debug, Default)]
pub struct Circuit<S> {
    nodes: IndexSet<NodeId>,
    gates: Vec<Gate<S>>,
}

impl<S: Scalar> Circuit<S> {
    pub fn new() -> Self {
        Circuit { nodes: IndexSet::new(), gates: Vec::new() }
    }

    /// Assembles a circuit without any checks; see [`validate`].
    pub fn from_parts(nodes: impl IntoIterator<Item = NodeId>, gates: Vec<Gate<S>>) -> Self {
        Circuit { nodes: nodes.into_iter().collect(), gates }
    }

    pub(crate) fn from_node_set(nodes: IndexSet<NodeId>, gates: Vec<Gate<S>>) -> Self {
        Circuit { nodes, gates }
    }

    /// Puts `gates` ahead of the existing ones.
    pub(crate) fn prepend_gates(&mut self, mut gates: Vec<Gate<S>>) {
        gates.append(&mut self.gates);
        self.gates = gates;
    }

    /// Adds a node; returns false if it was already present.
    pub fn add_node(&mut self, id: impl Into<NodeId>) -> bool {
        self.nodes.insert(id.into())
    }

    /// Appends a gate, registering its input and output nodes.
    pub fn add_gate(&mut self, gate: Gate<S>) -> GateId {
        for input in &gate.inputs {
            if !self.nodes.contains(input) {
                self.nodes.insert(input.clone());
            }
        }
        if !self.nodes.contains(&gate.output) {
            self.nodes.insert(gate.output.clone());
        }
        self.gates.push(gate);
        GateId(self.gates.len() - 1)
    }

    /// Convenience form of [`Circuit::add_gate`] taking string-like names.
    pub fn push<I, N>(&mut self, gate_type: GateType<S>, inputs: I, output: impl Into<NodeId>) -> GateId
    where
        I: IntoIterator<Item = N>,
        N: Into<NodeId>,
    {
        let inputs = inputs.into_iter().map(Into::into).collect();
        self.add_gate(Gate::new(gate_type, inputs, output.into()))
    }

    pub fn nodes(&self) -> &IndexSet<NodeId> {
        &self.nodes
    }

    pub fn gates(&self) -> &[Gate<S>] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> Result<&Gate<S>, CircuitError> {
        self.gates.get(id.0).ok_or(CircuitError::UnknownGate(id))
    }

    pub fn gate_ids(&self) -> impl Iterator<Item = GateId> + '_ {
        (0..self.gates.len()).map(GateId)
    }

    pub fn contains_node(&self, id: &NodeId) -> bool {
        self.nodes.contains(id)
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.nodes.get_index_of(id)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.gates.is_empty()
    }

    /// The first gate writing each node.
    pub fn producers(&self) -> HashMap<&NodeId, GateId> {
        let mut map = HashMap::new();
        for (i, g) in self.gates.iter().enumerate() {
            map.entry(&g.output).or_insert(GateId(i));
        }
        map
    }

    pub fn producer_of(&self, node: &NodeId) -> Option<GateId> {
        self.gates.iter().position(|g| &g.output == node).map(GateId)
    }

    /// Every (gate, input position) reading each node.
    pub fn consumers(&self) -> HashMap<&NodeId, Vec<(GateId, usize)>> {
        let mut map: HashMap<&NodeId, Vec<(GateId, usize)>> = HashMap::new();
        for (i, g) in self.gates.iter().enumerate() {
            for (pos, input) in g.inputs.iter().enumerate() {
                map.entry(input).or_default().push((GateId(i), pos));
            }
        }
        map
    }

    /// Nodes that are the output of no gate.
    pub fn free_nodes(&self) -> Vec<NodeId> {
        let produced: std::collections::HashSet<&NodeId> = self.gates.iter().map(|g| &g.output).collect();
        self.nodes.iter().filter(|n| !produced.contains(n)).cloned().collect()
    }

    /// Number of input positions reading `node`, over all gates.
    pub fn node_fan_out(&self, node: &NodeId) -> usize {
        self.gates.iter().map(|g| g.inputs.iter().filter(|i| *i == node).count()).sum()
    }

    /// Gates ordered so every gate comes after the producers of its inputs.
    /// Ties resolve towards the original gate order. `None` if the gate graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<GateId>> {
        let producers = self.producers();
        let n = self.gates.len();
        let mut indegree = vec![0usize; n];
        let mut successors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, g) in self.gates.iter().enumerate() {
            for input in &g.inputs {
                if let Some(&GateId(p)) = producers.get(input) {
                    indegree[i] += 1;
                    successors[p].push(i);
                }
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(GateId(i));
            for &s in &successors[i] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Same node set and same multiset of gates, ignoring order.
    pub fn structurally_eq(&self, other: &Circuit<S>) -> bool {
        if self.nodes.len() != other.nodes.len() || self.gates.len() != other.gates.len() {
            return false;
        }
        if !self.nodes.iter().all(|n| other.nodes.contains(n)) {
            return false;
        }
        let key = |g: &Gate<S>| {
            let zeta = g.gate_type.zeta().map(|z| z.as_f64().to_bits());
            (g.output.clone(), g.kind(), zeta, g.inputs.clone())
        };
        let mut a: Vec<_> = self.gates.iter().map(key).collect();
        let mut b: Vec<_> = other.gates.iter().map(key).collect();
        a.sort();
        b.sort();
        a == b
    }
}

/// Where a validation defect was found.
#[derive(Clone, PartialEq, Debug)]
pub enum Location {
    Gate(GateId),
    Node(NodeId),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Gate(g) => write!(f, "gate {g}"),
            Location::Node(n) => write!(f, "node `{n}`"),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Rule {
    MultipleProducers { count: usize },
    BadArity { expected: usize, found: usize },
    ZetaOutOfRange { zeta: f64 },
    DanglingNode { node: NodeId },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::MultipleProducers { count } => write!(f, "node output of {count} gates"),
            Rule::BadArity { expected, found } => write!(f, "expected {expected} inputs, found {found}"),
            Rule::ZetaOutOfRange { zeta } => write!(f, "parameter {zeta} outside [0,1]"),
            Rule::DanglingNode { node } => write!(f, "references undeclared node `{node}`"),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Defect {
    pub location: Location,
    pub rule: Rule,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.rule)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct ValidationReport {
    pub ok: bool,
    pub defects: Vec<Defect>,
}

/// Reports every violation of the structural circuit invariants.
pub fn validate<S: Scalar>(circuit: &Circuit<S>) -> ValidationReport {
    let mut defects = Vec::new();
    for (i, gate) in circuit.gates().iter().enumerate() {
        let id = GateId(i);
        let kind = gate.kind();
        if gate.inputs.len() != kind.arity() {
            defects.push(Defect {
                location: Location::Gate(id),
                rule: Rule::BadArity { expected: kind.arity(), found: gate.inputs.len() },
            });
        }
        if let Some(z) = gate.gate_type.zeta() {
            if !(z >= S::zero() && z <= S::one()) {
                defects.push(Defect { location: Location::Gate(id), rule: Rule::ZetaOutOfRange { zeta: z.as_f64() } });
            }
        }
        for node in gate.inputs.iter().chain(std::iter::once(&gate.output)) {
            if !circuit.contains_node(node) {
                defects.push(Defect { location: Location::Gate(id), rule: Rule::DanglingNode { node: node.clone() } });
            }
        }
    }
    let mut producer_count: indexmap::IndexMap<&NodeId, usize> = indexmap::IndexMap::new();
    for g in circuit.gates() {
        *producer_count.entry(&g.output).or_default() += 1;
    }
    for (node, count) in producer_count {
        if count > 1 {
            defects.push(Defect { location: Location::Node(node.clone()), rule: Rule::MultipleProducers { count } });
        }
    }
    ValidationReport { ok: defects.is_empty(), defects }
}

/// Number of input positions, over all gates, reading the output of `gate`.
pub fn fan_out<S: Scalar>(circuit: &Circuit<S>, gate: GateId) -> Result<usize, CircuitError> {
    let g = circuit.gate(gate)?;
    Ok(circuit.node_fan_out(&g.output))
}

/// Largest gate fan-out; 0 for a circuit without gates.
pub fn max_fan_out<S: Scalar>(circuit: &Circuit<S>) -> usize {
    let mut reads: HashMap<&NodeId, usize> = HashMap::with_capacity(circuit.nodes().len());
    for input in circuit.gates().iter().flat_map(|g| &g.inputs) {
        *reads.entry(input).or_default() += 1;
    }
    circuit.gates().iter().map(|g| reads.get(&g.output).copied().unwrap_or(0)).max().unwrap_or(0)
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Neighbors {
    pub predecessors: BTreeSet<GateId>,
    pub successors: BTreeSet<GateId>,
}

pub fn neighbors<S: Scalar>(circuit: &Circuit<S>, gate: GateId) -> Result<Neighbors, CircuitError> {
    let g = circuit.gate(gate)?;
    let mut out = Neighbors::default();
    for (i, other) in circuit.gates().iter().enumerate() {
        if g.inputs.contains(&other.output) {
            out.predecessors.insert(GateId(i));
        }
        if other.inputs.contains(&g.output) {
            out.successors.insert(GateId(i));
        }
    }
    Ok(out)
}

/// What reads a node whose consumers mix Boolean and non-Boolean gates.
#[derive(Clone, PartialEq, Debug)]
pub enum Source {
    Gate(GateId),
    /// A free node acts as an input gate of its own.
    FreeNode,
}

#[derive(Clone, PartialEq, Debug)]
pub enum RegularityDefect {
    /// Condition 1: a Boolean gate reads from a gate that is neither Boolean nor Cmp.
    NonBooleanPredecessor { boolean_gate: GateId, predecessor: GateId, node: NodeId },
    /// Condition 2: a node feeds both a Boolean and a non-Boolean gate.
    MixedSuccessors { source: Source, node: NodeId, boolean_gate: GateId, other_gate: GateId },
}

impl fmt::Display for RegularityDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityDefect::NonBooleanPredecessor { boolean_gate, predecessor, node } => write!(
                f,
                "condition 1: Boolean gate {boolean_gate} reads `{node}` from non-Boolean, non-comparison gate {predecessor}"
            ),
            RegularityDefect::MixedSuccessors { node, boolean_gate, other_gate, .. } => write!(
                f,
                "condition 2: `{node}` feeds Boolean gate {boolean_gate} and non-Boolean gate {other_gate}"
            ),
        }
    }
}

/// Every Boolean-regularity violation, in gate order.
pub fn regularity_defects<S: Scalar>(circuit: &Circuit<S>) -> Vec<RegularityDefect> {
    let producers = circuit.producers();
    let mut defects = Vec::new();
    for (i, g) in circuit.gates().iter().enumerate() {
        if !g.kind().is_boolean() {
            continue;
        }
        for input in &g.inputs {
            if let Some(&p) = producers.get(input) {
                let pk = circuit.gates()[p.0].kind();
                if !(pk.is_boolean() || pk == GateKind::Cmp) {
                    defects.push(RegularityDefect::NonBooleanPredecessor {
                        boolean_gate: GateId(i),
                        predecessor: p,
                        node: input.clone(),
                    });
                }
            }
        }
    }
    let consumers = circuit.consumers();
    for node in circuit.nodes() {
        let Some(readers) = consumers.get(node) else { continue };
        let boolean = readers.iter().find(|(g, _)| circuit.gates()[g.0].kind().is_boolean());
        let other = readers.iter().find(|(g, _)| !circuit.gates()[g.0].kind().is_boolean());
        if let (Some(&(b, _)), Some(&(o, _))) = (boolean, other) {
            let source = producers.get(node).map_or(Source::FreeNode, |&p| Source::Gate(p));
            defects.push(RegularityDefect::MixedSuccessors {
                source,
                node: node.clone(),
                boolean_gate: b,
                other_gate: o,
            });
        }
    }
    defects
}

#[derive(Clone, PartialEq, Debug)]
pub struct BooleanRegularity {
    pub regular: bool,
    pub witness: Option<RegularityDefect>,
}

pub fn is_boolean_regular<S: Scalar>(circuit: &Circuit<S>) -> BooleanRegularity {
    let witness = regularity_defects(circuit).into_iter().next();
    BooleanRegularity { regular: witness.is_none(), witness }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issue4() -> Circuit<f64> {
        let mut c = Circuit::new();
        c.add_node("a");
        c.push(GateType::Const(0.3), Vec::<&str>::new(), "z");
        c.push(GateType::Cmp, ["z", "a"], "b");
        c.push(GateType::Scale(0.5), ["b"], "c");
        c.push(GateType::Scale(1.0 / 3.0), ["b"], "d");
        c.push(GateType::Scale(0.25), ["b"], "e");
        c
    }

    #[test]
    fn minimal_circuit_validates() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Const(0.5), Vec::<&str>::new(), "v");
        assert!(validate(&c).ok);
        assert!(validate(&issue4()).ok);
    }

    #[test]
    fn double_producer_is_reported() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Const(0.5), Vec::<&str>::new(), "v");
        c.push(GateType::Not, ["a"], "v");
        let report = validate(&c);
        assert!(!report.ok);
        assert_eq!(report.defects.len(), 1);
        assert_eq!(report.defects[0].to_string(), "node `v`: node output of 2 gates");
    }

    #[test]
    fn arity_zeta_and_dangling_defects() {
        let gates = vec![
            Gate::new(GateType::Add, vec![NodeId::from("a")], NodeId::from("v")),
            Gate::new(GateType::Const(1.5), vec![], NodeId::from("w")),
        ];
        let c = Circuit::<f64>::from_parts(["v".into(), "w".into()], gates);
        let rules: Vec<Rule> = validate(&c).defects.into_iter().map(|d| d.rule).collect();
        assert!(rules.contains(&Rule::BadArity { expected: 2, found: 1 }));
        assert!(rules.contains(&Rule::ZetaOutOfRange { zeta: 1.5 }));
        assert!(rules.contains(&Rule::DanglingNode { node: "a".into() }));
    }

    #[test]
    fn fan_out_counts_positions() {
        let c = issue4();
        assert_eq!(fan_out(&c, GateId(1)).unwrap(), 3);
        assert_eq!(fan_out(&c, GateId(2)).unwrap(), 0);
        assert_eq!(max_fan_out(&c), 3);
        assert_eq!(max_fan_out(&Circuit::<f64>::new()), 0);
        assert!(fan_out(&c, GateId(99)).is_err());

        let mut twice = Circuit::<f64>::new();
        twice.push(GateType::Const(0.2), Vec::<&str>::new(), "x");
        twice.push(GateType::Add, ["x", "x"], "y");
        assert_eq!(fan_out(&twice, GateId(0)).unwrap(), 2);
    }

    #[test]
    fn neighbor_sets() {
        let c = issue4();
        let n = neighbors(&c, GateId(1)).unwrap();
        assert_eq!(n.successors, [GateId(2), GateId(3), GateId(4)].into());
        assert_eq!(n.predecessors, [GateId(0)].into());

        let mut lone = Circuit::<f64>::new();
        lone.push(GateType::Const(0.1), Vec::<&str>::new(), "k");
        assert_eq!(neighbors(&lone, GateId(0)).unwrap(), Neighbors::default());

        let mut selfloop = Circuit::<f64>::new();
        selfloop.push(GateType::Not, ["v"], "v");
        let n = neighbors(&selfloop, GateId(0)).unwrap();
        assert_eq!(n.predecessors, [GateId(0)].into());
        assert_eq!(n.successors, [GateId(0)].into());
    }

    #[test]
    fn boolean_regularity() {
        assert!(is_boolean_regular(&issue4()).regular);

        let mut mixed = Circuit::<f64>::new();
        mixed.push(GateType::Cmp, ["x", "y"], "c");
        mixed.push(GateType::Not, ["c"], "n");
        mixed.push(GateType::Scale(0.5), ["c"], "s");
        let r = is_boolean_regular(&mixed);
        assert!(!r.regular);
        assert!(matches!(r.witness, Some(RegularityDefect::MixedSuccessors { .. })));

        let mut chain = Circuit::<f64>::new();
        chain.push(GateType::Not, ["a"], "b");
        chain.push(GateType::Not, ["b"], "c");
        assert!(is_boolean_regular(&chain).regular);

        let mut arith = Circuit::<f64>::new();
        arith.push(GateType::Add, ["x", "y"], "s");
        arith.push(GateType::Not, ["s"], "n");
        assert!(matches!(is_boolean_regular(&arith).witness, Some(RegularityDefect::NonBooleanPredecessor { .. })));
    }

    #[test]
    fn topological_order_and_cycles() {
        let c = issue4();
        assert_eq!(c.topological_order().unwrap().len(), 5);
        let mut cyc = Circuit::<f64>::new();
        cyc.push(GateType::Not, ["v"], "v");
        assert!(!cyc.is_acyclic());
    }
}
