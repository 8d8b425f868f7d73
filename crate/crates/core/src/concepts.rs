//! Per-gate constraint rows for the four solution concepts and whole-circuit verification.
//!
//! All comparisons follow the constraint tables literally: bands and
//! conclusions use weak inequalities, Boolean premises are weak under
//! [`SolutionConcept::Weak`] and strict under the other concepts. Nothing is
//! fuzzed beyond the concept's own tolerance.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateId, GateKind, GateType, NodeId};
use crate::scalar::{clamp_to, format_number, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConceptError {
    #[error("invalid solution concept: {0}")]
    InvalidConcept(String),
    #[error("assignment has no value for node `{0}`")]
    MissingValue(NodeId),
    #[error("value {value} of node `{node}` lies outside [0, {upper}]")]
    OutOfRange { node: NodeId, value: f64, upper: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Which approximate solution notion a check uses.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum SolutionConcept<S> {
    /// Approximately Boolean inputs are those within `eps` of 0 or 1.
    Weak { eps: S },
    /// Boolean premises test strict distance `eps` from 1/2.
    Strong { eps: S },
    /// Boolean premises test strict distance `beta` from 1/2; conclusions use `eps`.
    Beta { eps: S, beta: S },
    /// Strong concept on the range `[0, 1/K]`: every 1 becomes 1/K and 1/2 becomes 1/(2K).
    TruncatedStrong { eps: S, k: u32 },
}

/// One-sided bound on a value.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Bound<S> {
    Le(S),
    Lt(S),
    Ge(S),
    Gt(S),
}

impl<S: Scalar> Bound<S> {
    pub fn holds(self, x: S) -> bool {
        match self {
            Bound::Le(t) => x <= t,
            Bound::Lt(t) => x < t,
            Bound::Ge(t) => x >= t,
            Bound::Gt(t) => x > t,
        }
    }

    /// True when every value in `[lo, hi]` satisfies the bound.
    pub fn holds_on(self, lo: S, hi: S) -> bool {
        match self {
            Bound::Le(_) | Bound::Lt(_) => self.holds(hi),
            Bound::Ge(_) | Bound::Gt(_) => self.holds(lo),
        }
    }

    /// Distance to the bound; negative when violated.
    pub fn slack(self, x: S) -> S {
        match self {
            Bound::Le(t) | Bound::Lt(t) => t - x,
            Bound::Ge(t) | Bound::Gt(t) => x - t,
        }
    }

    pub fn threshold(self) -> S {
        match self {
            Bound::Le(t) | Bound::Lt(t) | Bound::Ge(t) | Bound::Gt(t) => t,
        }
    }
}

impl<S: Scalar> fmt::Display for Bound<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, t) = match *self {
            Bound::Le(t) => ("<=", t),
            Bound::Lt(t) => ("<", t),
            Bound::Ge(t) => (">=", t),
            Bound::Gt(t) => (">", t),
        };
        write!(f, "{op} {}", format_number(t))
    }
}

impl<S: Scalar> SolutionConcept<S> {
    pub fn weak(eps: S) -> Result<Self, ConceptError> {
        let c = SolutionConcept::Weak { eps };
        c.validate().map(|_| c)
    }

    pub fn strong(eps: S) -> Result<Self, ConceptError> {
        let c = SolutionConcept::Strong { eps };
        c.validate().map(|_| c)
    }

    pub fn beta(eps: S, beta: S) -> Result<Self, ConceptError> {
        let c = SolutionConcept::Beta { eps, beta };
        c.validate().map(|_| c)
    }

    pub fn truncated(eps: S, k: u32) -> Result<Self, ConceptError> {
        let c = SolutionConcept::TruncatedStrong { eps, k };
        c.validate().map(|_| c)
    }

    pub fn eps(&self) -> S {
        match *self {
            SolutionConcept::Weak { eps }
            | SolutionConcept::Strong { eps }
            | SolutionConcept::Beta { eps, .. }
            | SolutionConcept::TruncatedStrong { eps, .. } => eps,
        }
    }

    /// Same concept with a different tolerance.
    pub fn with_eps(&self, eps: S) -> Self {
        match *self {
            SolutionConcept::Weak { .. } => SolutionConcept::Weak { eps },
            SolutionConcept::Strong { .. } => SolutionConcept::Strong { eps },
            SolutionConcept::Beta { beta, .. } => SolutionConcept::Beta { eps, beta },
            SolutionConcept::TruncatedStrong { k, .. } => SolutionConcept::TruncatedStrong { eps, k },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolutionConcept::Weak { .. } => "weak",
            SolutionConcept::Strong { .. } => "strong",
            SolutionConcept::Beta { .. } => "beta",
            SolutionConcept::TruncatedStrong { .. } => "truncated",
        }
    }

    /// Upper end of the value range: 1, or 1/K for the truncated concept.
    pub fn upper(&self) -> S {
        match *self {
            SolutionConcept::TruncatedStrong { k, .. } => S::one() / S::int(k as u64),
            _ => S::one(),
        }
    }

    /// Centre of the Boolean threshold band: 1/2, or 1/(2K).
    pub fn midpoint(&self) -> S {
        self.upper() * S::half()
    }

    pub fn validate(&self) -> Result<(), ConceptError> {
        let eps = self.eps();
        let bad = |msg: String| Err(ConceptError::InvalidConcept(msg));
        if !(eps > S::zero()) || !eps.is_finite() {
            return bad(format!("eps must be positive, got {eps}"));
        }
        match *self {
            SolutionConcept::Beta { beta, .. } => {
                let half = S::half();
                if !(beta > S::zero() && beta < half) {
                    return bad(format!("beta must lie in (0, 1/2), got {beta}"));
                }
                if !(eps < beta && eps < half - beta) {
                    return bad(format!("eps must be below beta and 1/2 - beta, got eps={eps}, beta={beta}"));
                }
            }
            SolutionConcept::TruncatedStrong { k, .. } => {
                if k < 2 {
                    return bad(format!("K must be at least 2, got {k}"));
                }
                if !(eps < S::one() / S::int(2 * k as u64)) {
                    return bad(format!("eps must be below 1/(2K), got eps={eps}, K={k}"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Premise under which a Boolean input counts as FALSE.
    pub fn low_premise(&self) -> Bound<S> {
        match *self {
            SolutionConcept::Weak { eps } => Bound::Le(eps),
            SolutionConcept::Strong { eps } => Bound::Lt(S::half() - eps),
            SolutionConcept::Beta { beta, .. } => Bound::Lt(S::half() - beta),
            SolutionConcept::TruncatedStrong { eps, .. } => Bound::Lt(self.midpoint() - eps),
        }
    }

    /// Premise under which a Boolean input counts as TRUE.
    pub fn high_premise(&self) -> Bound<S> {
        match *self {
            SolutionConcept::Weak { eps } => Bound::Ge(S::one() - eps),
            SolutionConcept::Strong { eps } => Bound::Gt(S::half() + eps),
            SolutionConcept::Beta { beta, .. } => Bound::Gt(S::half() + beta),
            SolutionConcept::TruncatedStrong { eps, .. } => Bound::Gt(self.midpoint() + eps),
        }
    }

    /// Conclusion "output is FALSE": `x[v] <= eps`.
    pub fn low_conclusion(&self) -> Bound<S> {
        Bound::Le(self.eps())
    }

    /// Conclusion "output is TRUE": `x[v] >= U - eps`.
    pub fn high_conclusion(&self) -> Bound<S> {
        Bound::Ge(self.upper() - self.eps())
    }

    /// Extra note attached to reports for concepts whose rows are a completion of the source definition.
    pub fn variant_note(&self) -> Option<&'static str> {
        match self {
            SolutionConcept::TruncatedStrong { .. } => Some("variant: uniform-scaling completion"),
            _ => None,
        }
    }
}

impl<S: Scalar> fmt::Display for SolutionConcept<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SolutionConcept::Weak { eps } => write!(f, "Weak{{eps={}}}", format_number(eps)),
            SolutionConcept::Strong { eps } => write!(f, "Strong{{eps={}}}", format_number(eps)),
            SolutionConcept::Beta { eps, beta } => {
                write!(f, "Beta{{eps={}, beta={}}}", format_number(eps), format_number(beta))
            }
            SolutionConcept::TruncatedStrong { eps, k } => {
                write!(f, "TruncatedStrong{{eps={}, K={k}}}", format_number(eps))
            }
        }
    }
}

/// `min(U, max(0, x))` for the concept's range.
pub fn clamp<S: Scalar>(x: S, concept: &SolutionConcept<S>) -> S {
    clamp_to(x, concept.upper())
}

/// Node values, kept in insertion order.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Assignment<S> {
    values: IndexMap<NodeId, S>,
}

impl<S: Scalar> Assignment<S> {
    pub fn new() -> Self {
        Assignment { values: IndexMap::new() }
    }

    pub fn get(&self, node: &NodeId) -> Option<S> {
        self.values.get(node).copied()
    }

    pub fn value(&self, node: &str) -> Option<S> {
        self.values.get(&NodeId::from(node)).copied()
    }

    /// Sets a value, returning the previous one.
    pub fn set(&mut self, node: impl Into<NodeId>, value: S) -> Option<S> {
        self.values.insert(node.into(), value)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, S)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.values.contains_key(node)
    }

    /// Values of the given nodes only.
    pub fn restrict<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>) -> Assignment<S> {
        nodes.into_iter().filter_map(|n| self.get(n).map(|v| (n.clone(), v))).collect()
    }
}

impl<S: Scalar, N: Into<NodeId>> FromIterator<(N, S)> for Assignment<S> {
    fn from_iter<T: IntoIterator<Item = (N, S)>>(iter: T) -> Self {
        Assignment { values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckStatus {
    Satisfied,
    /// An implication row whose premises all fail.
    Vacuous,
    Violated,
}

/// Left-hand side of an implication row.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Premise {
    /// `x[a1] < x[a2] - eps`
    CmpBelow,
    /// `x[a1] > x[a2] + eps`
    CmpAbove,
    InputFalse,
    InputTrue,
    AllFalse,
    AnyFalse,
    AllTrue,
    AnyTrue,
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Premise::CmpBelow => "x[a1] < x[a2] - eps",
            Premise::CmpAbove => "x[a1] > x[a2] + eps",
            Premise::InputFalse => "input FALSE",
            Premise::InputTrue => "input TRUE",
            Premise::AllFalse => "all inputs FALSE",
            Premise::AnyFalse => "some input FALSE",
            Premise::AllTrue => "all inputs TRUE",
            Premise::AnyTrue => "some input TRUE",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Clause<S> {
    /// `|x[v] - target| <= eps`
    Band { target: S, eps: S },
    /// A fired implication and the bound it demands of `x[v]`.
    Implies { premise: Premise, conclusion: Bound<S> },
    /// No premise fired.
    NoPremise,
}

impl<S: Scalar> fmt::Display for Clause<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Band { target, eps } => {
                write!(f, "x[v] = {} ± {}", format_number(*target), format_number(*eps))
            }
            Clause::Implies { premise, conclusion } => write!(f, "{premise} => x[v] {conclusion}"),
            Clause::NoPremise => f.write_str("no premise holds"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct GateCheckResult<S> {
    pub status: CheckStatus,
    pub clause: Clause<S>,
    /// Margin of the decisive clause; negative when violated, absent when vacuous.
    pub slack: Option<S>,
}

impl<S: Scalar> GateCheckResult<S> {
    pub fn ok(&self) -> bool {
        self.status != CheckStatus::Violated
    }
}

/// The implications of a comparison or Boolean row that fire for these input values.
fn fired_clauses<S: Scalar>(kind: GateKind, inputs: &[S], concept: &SolutionConcept<S>) -> Vec<(Premise, Bound<S>)> {
    let eps = concept.eps();
    let lo = concept.low_premise();
    let hi = concept.high_premise();
    let out_lo = concept.low_conclusion();
    let out_hi = concept.high_conclusion();
    let mut fired = Vec::with_capacity(2);
    match kind {
        GateKind::Cmp => {
            if inputs[0] < inputs[1] - eps {
                fired.push((Premise::CmpBelow, out_lo));
            }
            if inputs[0] > inputs[1] + eps {
                fired.push((Premise::CmpAbove, out_hi));
            }
        }
        GateKind::Not => {
            if lo.holds(inputs[0]) {
                fired.push((Premise::InputFalse, out_hi));
            }
            if hi.holds(inputs[0]) {
                fired.push((Premise::InputTrue, out_lo));
            }
        }
        GateKind::Or => {
            if lo.holds(inputs[0]) && lo.holds(inputs[1]) {
                fired.push((Premise::AllFalse, out_lo));
            }
            if hi.holds(inputs[0]) || hi.holds(inputs[1]) {
                fired.push((Premise::AnyTrue, out_hi));
            }
        }
        GateKind::And => {
            if lo.holds(inputs[0]) || lo.holds(inputs[1]) {
                fired.push((Premise::AnyFalse, out_lo));
            }
            if hi.holds(inputs[0]) && hi.holds(inputs[1]) {
                fired.push((Premise::AllTrue, out_hi));
            }
        }
        _ => unreachable!("arithmetic gates have no implication rows"),
    }
    fired
}

/// Value an arithmetic gate is asked to reproduce, `[op(inputs)]`.
pub fn arithmetic_target<S: Scalar>(gate_type: &GateType<S>, inputs: &[S], concept: &SolutionConcept<S>) -> S {
    let raw = match *gate_type {
        GateType::Const(z) => return z,
        GateType::Scale(z) => z * inputs[0],
        GateType::Copy => return inputs[0],
        GateType::Add => inputs[0] + inputs[1],
        GateType::Sub => inputs[0] - inputs[1],
        _ => unreachable!("not an arithmetic gate"),
    };
    clamp(raw, concept)
}

/// Evaluates one gate row on raw values. `inputs.len()` must equal the gate arity.
pub fn check_row<S: Scalar>(
    gate_type: &GateType<S>,
    inputs: &[S],
    output: S,
    concept: &SolutionConcept<S>,
) -> GateCheckResult<S> {
    let kind = gate_type.kind();
    let eps = concept.eps();
    if kind.is_arithmetic() {
        let target = arithmetic_target(gate_type, inputs, concept);
        let dist = (output - target).abs();
        let status = if dist <= eps { CheckStatus::Satisfied } else { CheckStatus::Violated };
        return GateCheckResult { status, clause: Clause::Band { target, eps }, slack: Some(eps - dist) };
    }
    let fired = fired_clauses(kind, inputs, concept);
    if fired.is_empty() {
        return GateCheckResult { status: CheckStatus::Vacuous, clause: Clause::NoPremise, slack: None };
    }
    let mut worst: Option<(Premise, Bound<S>, S, bool)> = None;
    for (premise, conclusion) in fired {
        let holds = conclusion.holds(output);
        let slack = conclusion.slack(output);
        let replace = match worst {
            None => true,
            Some((_, _, s, h)) => (h && !holds) || (h == holds && slack < s),
        };
        if replace {
            worst = Some((premise, conclusion, slack, holds));
        }
    }
    let (premise, conclusion, slack, holds) = worst.expect("at least one fired clause");
    GateCheckResult {
        status: if holds { CheckStatus::Satisfied } else { CheckStatus::Violated },
        clause: Clause::Implies { premise, conclusion },
        slack: Some(slack),
    }
}

/// The set of output values a gate row admits for these inputs, as `[lo, hi]`.
/// `None` when fired clauses contradict each other.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct AdmissibleOutput<S> {
    pub lo: S,
    pub hi: S,
    /// The exact target of an arithmetic gate.
    pub nominal: Option<S>,
}

pub fn admissible_output<S: Scalar>(
    gate_type: &GateType<S>,
    inputs: &[S],
    concept: &SolutionConcept<S>,
) -> Option<AdmissibleOutput<S>> {
    let kind = gate_type.kind();
    let eps = concept.eps();
    let upper = concept.upper();
    if kind.is_arithmetic() {
        let t = arithmetic_target(gate_type, inputs, concept);
        let lo = (t - eps).max(S::zero());
        let hi = (t + eps).min(upper);
        return (lo <= hi).then_some(AdmissibleOutput { lo, hi, nominal: Some(t) });
    }
    let mut lo = S::zero();
    let mut hi = upper;
    for (_, bound) in fired_clauses(kind, inputs, concept) {
        match bound {
            Bound::Le(t) | Bound::Lt(t) => hi = hi.min(t),
            Bound::Ge(t) | Bound::Gt(t) => lo = lo.max(t),
        }
    }
    (lo <= hi).then_some(AdmissibleOutput { lo, hi, nominal: None })
}

fn lookup<S: Scalar>(x: &Assignment<S>, node: &NodeId) -> Result<S, ConceptError> {
    x.get(node).ok_or_else(|| ConceptError::MissingValue(node.clone()))
}

/// Evaluates the row of `gate` under `concept`.
pub fn check_gate<S: Scalar>(
    gate: &Gate<S>,
    x: &Assignment<S>,
    concept: &SolutionConcept<S>,
) -> Result<GateCheckResult<S>, ConceptError> {
    let inputs = gate.inputs.iter().map(|n| lookup(x, n)).collect::<Result<Vec<_>, _>>()?;
    if inputs.len() != gate.kind().arity() {
        return Err(ConceptError::Precondition(format!(
            "gate writing `{}` has {} inputs, expected {}",
            gate.output,
            inputs.len(),
            gate.kind().arity()
        )));
    }
    let output = lookup(x, &gate.output)?;
    Ok(check_row(&gate.gate_type, &inputs, output, concept))
}

#[derive(Clone, PartialEq, Debug)]
pub struct ViolationReport<S> {
    pub per_gate: Vec<(GateId, GateCheckResult<S>)>,
    pub is_solution: bool,
    pub variant_note: Option<&'static str>,
}

impl<S: Scalar> ViolationReport<S> {
    pub fn violations(&self) -> impl Iterator<Item = &(GateId, GateCheckResult<S>)> {
        self.per_gate.iter().filter(|(_, r)| r.status == CheckStatus::Violated)
    }

    pub fn result(&self, gate: GateId) -> Option<&GateCheckResult<S>> {
        self.per_gate.iter().find(|(g, _)| *g == gate).map(|(_, r)| r)
    }

    /// One line per gate: gate text, status, decisive clause and slack.
    pub fn render(&self, circuit: &Circuit<S>) -> String {
        let mut out = String::new();
        for (id, r) in &self.per_gate {
            let gate = &circuit.gates()[id.0];
            let status = match r.status {
                CheckStatus::Satisfied => "ok",
                CheckStatus::Vacuous => "vacuous",
                CheckStatus::Violated => "VIOLATED",
            };
            out.push_str(&format!("{gate}: {status}: {}", r.clause));
            if let Some(s) = r.slack {
                out.push_str(&format!(" (slack {s:.6})"));
            }
            out.push('\n');
        }
        if let Some(note) = self.variant_note {
            out.push_str(note);
            out.push('\n');
        }
        out
    }
}

/// Checks that `x` covers every node with a value in the concept's range.
pub fn check_range<S: Scalar>(
    circuit: &Circuit<S>,
    x: &Assignment<S>,
    concept: &SolutionConcept<S>,
) -> Result<(), ConceptError> {
    let upper = concept.upper();
    for node in circuit.nodes() {
        let v = lookup(x, node)?;
        if !(v >= S::zero() && v <= upper) {
            return Err(ConceptError::OutOfRange { node: node.clone(), value: v.as_f64(), upper: upper.as_f64() });
        }
    }
    Ok(())
}

/// Checks every gate of `circuit`. Values for nodes outside the circuit are ignored.
pub fn verify<S: Scalar>(
    circuit: &Circuit<S>,
    x: &Assignment<S>,
    concept: &SolutionConcept<S>,
) -> Result<ViolationReport<S>, ConceptError> {
    concept.validate()?;
    check_range(circuit, x, concept)?;
    let mut per_gate = Vec::with_capacity(circuit.gates().len());
    for (i, gate) in circuit.gates().iter().enumerate() {
        per_gate.push((GateId(i), check_gate(gate, x, concept)?));
    }
    let is_solution = per_gate.iter().all(|(_, r)| r.ok());
    Ok(ViolationReport { per_gate, is_solution, variant_note: concept.variant_note() })
}

/// The weak concept a strong solution is guaranteed to satisfy (needs eps < 1/4).
pub fn implied_weak<S: Scalar>(concept: &SolutionConcept<S>) -> Result<SolutionConcept<S>, ConceptError> {
    match *concept {
        SolutionConcept::Strong { eps } if eps < S::lit(0.25) => {
            concept.validate()?;
            Ok(SolutionConcept::Weak { eps })
        }
        SolutionConcept::Strong { eps } => {
            Err(ConceptError::Precondition(format!("strong-to-weak implication needs eps < 1/4, got {eps}")))
        }
        _ => Err(ConceptError::Precondition(format!("expected a strong concept, got {concept}"))),
    }
}
