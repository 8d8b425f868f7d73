//! Worst-case forward interval propagation and grid certification of gadgets.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use rayon::prelude::*;

use super::AnalysisError;
use crate::circuit::{validate, Circuit, GateKind, GateType, NodeId};
use crate::compiled::CompiledCircuit;
use crate::concepts::{check_row, clamp, SolutionConcept};
use crate::scalar::{format_number, Scalar};

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Interval<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> Interval<S> {
    /// `None` unless `lo <= hi`.
    pub fn new(lo: S, hi: S) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn point(x: S) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn unit() -> Self {
        Interval { lo: S::zero(), hi: S::one() }
    }

    pub fn width(&self) -> S {
        self.hi - self.lo
    }

    pub fn contains(&self, x: S) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval<S>) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval<S>) -> Option<Self> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_number(self.lo), format_number(self.hi))
    }
}

/// Absolute slack covering the rounding of one gate evaluation in the checker.
fn rounding_margin<S: Scalar>() -> S {
    S::epsilon() * S::lit(4.0)
}

/// Output interval of one gate given input intervals.
pub fn gate_interval<S: Scalar>(
    gate_type: &GateType<S>,
    inputs: &[Interval<S>],
    concept: &SolutionConcept<S>,
) -> Option<Interval<S>> {
    let eps = concept.eps();
    let upper = concept.upper();
    let full = Interval { lo: S::zero(), hi: upper };
    let band = |lo: S, hi: S| {
        let m = rounding_margin::<S>();
        Interval { lo: lo - eps - m, hi: hi + eps + m }.intersect(&full)
    };
    let c = |x: S| clamp(x, concept);
    let kind = gate_type.kind();
    match *gate_type {
        GateType::Const(z) => return band(z, z),
        GateType::Scale(z) => return band(c(z * inputs[0].lo), c(z * inputs[0].hi)),
        GateType::Copy => return band(inputs[0].lo, inputs[0].hi),
        GateType::Add => return band(c(inputs[0].lo + inputs[1].lo), c(inputs[0].hi + inputs[1].hi)),
        GateType::Sub => return band(c(inputs[0].lo - inputs[1].hi), c(inputs[0].hi - inputs[1].lo)),
        _ => {}
    }
    let lo_prem = concept.low_premise();
    let hi_prem = concept.high_premise();
    let is_false = |i: &Interval<S>| lo_prem.holds_on(i.lo, i.hi);
    let is_true = |i: &Interval<S>| hi_prem.holds_on(i.lo, i.hi);
    let (force_low, force_high) = match kind {
        GateKind::Cmp => (inputs[0].hi < inputs[1].lo - eps, inputs[0].lo > inputs[1].hi + eps),
        GateKind::Not => (is_true(&inputs[0]), is_false(&inputs[0])),
        GateKind::Or => (is_false(&inputs[0]) && is_false(&inputs[1]), is_true(&inputs[0]) || is_true(&inputs[1])),
        GateKind::And => (is_false(&inputs[0]) || is_false(&inputs[1]), is_true(&inputs[0]) && is_true(&inputs[1])),
        _ => unreachable!(),
    };
    let mut out = full;
    if force_low {
        out = out.intersect(&Interval { lo: S::zero(), hi: eps })?;
    }
    if force_high {
        out = out.intersect(&Interval { lo: upper - eps, hi: upper })?;
    }
    Some(out)
}

/// Propagation over a compiled circuit with dense seeds (`None` = unseeded).
pub(crate) fn propagate_dense<S: Scalar>(
    cc: &CompiledCircuit<S>,
    order: &[usize],
    seeds: &[Option<Interval<S>>],
    concept: &SolutionConcept<S>,
) -> Result<Vec<Interval<S>>, AnalysisError> {
    let mut val: Vec<Option<Interval<S>>> = seeds.to_vec();
    let mut buf = [Interval::point(S::zero()); 2];
    for &gi in order {
        let g = &cc.gates[gi];
        for (slot, &i) in buf.iter_mut().zip(g.inputs()) {
            *slot = val[i].ok_or_else(|| AnalysisError::UnseededFreeNode(cc.names[i].clone()))?;
        }
        let out = gate_interval(&g.gate_type, &buf[..g.inputs().len()], concept)
            .ok_or_else(|| AnalysisError::Infeasible(cc.names[g.output].clone()))?;
        let merged = match val[g.output] {
            Some(prev) => prev.intersect(&out).ok_or_else(|| AnalysisError::Infeasible(cc.names[g.output].clone()))?,
            None => out,
        };
        val[g.output] = Some(merged);
    }
    val.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| AnalysisError::UnseededFreeNode(cc.names[i].clone())))
        .collect()
}

/// Reusable propagation plan for many seedings of the same seeded node set.
pub(crate) struct Plan<S> {
    pub cc: CompiledCircuit<S>,
    order: Vec<usize>,
    seeded: Vec<bool>,
}

impl<S: Scalar> Plan<S> {
    pub fn new(circuit: &Circuit<S>, seeded_nodes: &[NodeId]) -> Result<Self, AnalysisError> {
        let report = validate(circuit);
        if !report.ok {
            return Err(AnalysisError::InvalidCircuit(report.defects[0].to_string()));
        }
        let cc = CompiledCircuit::new(circuit);
        let mut seeded = vec![false; cc.len()];
        for n in seeded_nodes {
            let i = circuit.node_index(n).ok_or_else(|| AnalysisError::UnknownNode(n.clone()))?;
            seeded[i] = true;
        }
        if let Some(i) = (0..cc.len()).find(|&i| cc.producer[i].is_none() && !seeded[i]) {
            return Err(AnalysisError::UnseededFreeNode(cc.names[i].clone()));
        }
        let order = cc.dependency_order(&seeded).ok_or(AnalysisError::Cycle)?;
        // Gates writing a seeded node still constrain it once their inputs are known.
        let mut order = order;
        order.extend((0..cc.gates.len()).filter(|&g| seeded[cc.gates[g].output]));
        Ok(Plan { cc, order, seeded })
    }

    pub fn index(&self, node: &NodeId) -> Option<usize> {
        self.cc.names.iter().position(|n| n == node)
    }

    pub fn run(
        &self,
        seeds: &[Option<Interval<S>>],
        concept: &SolutionConcept<S>,
    ) -> Result<Vec<Interval<S>>, AnalysisError> {
        debug_assert!(seeds.iter().zip(&self.seeded).all(|(s, &f)| s.is_some() == f));
        propagate_dense(&self.cc, &self.order, seeds, concept)
    }
}

/// Sound enclosure of every node's value over all assignments that agree
/// with `seeds` and satisfy every gate row of `concept`.
///
/// Gates writing a seeded node are checked against the seed; an empty
/// intersection anywhere yields [`AnalysisError::Infeasible`].
pub fn propagate_intervals<S: Scalar>(
    circuit: &Circuit<S>,
    seeds: &HashMap<NodeId, Interval<S>>,
    concept: &SolutionConcept<S>,
) -> Result<IndexMap<NodeId, Interval<S>>, AnalysisError> {
    concept.validate()?;
    let mut seeded: Vec<NodeId> = seeds.keys().cloned().collect();
    seeded.sort();
    let plan = Plan::new(circuit, &seeded)?;
    let mut dense = vec![None; plan.cc.len()];
    for (n, iv) in seeds {
        dense[plan.index(n).expect("checked by plan")] = Some(*iv);
    }
    let vals = plan.run(&dense, concept)?;
    Ok(plan.cc.names.iter().cloned().zip(vals).collect())
}

/// The constraint row a gadget must realize.
#[derive(Clone, Copy, Debug)]
pub struct TargetRow<S> {
    pub gate_type: GateType<S>,
    pub concept: SolutionConcept<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetCertificate<S> {
    pub certified: bool,
    /// First failing grid point in sweep order.
    pub counterexample: Option<Vec<(NodeId, S)>>,
    /// Output enclosure at the counterexample.
    pub output_interval: Option<Interval<S>>,
    pub points: usize,
}

/// `{0, 1/n, ..., 1}` with `n = round(1/pitch)`.
pub fn unit_grid<S: Scalar>(pitch: S) -> Vec<S> {
    let n = (S::one() / pitch).round().to_usize().unwrap_or(1).max(1);
    (0..=n).map(|i| S::int(i as u64) / S::int(n as u64)).collect()
}

/// Checks that every value of `[lo, hi]` satisfies the row for these inputs.
pub fn row_holds_on<S: Scalar>(
    gate_type: &GateType<S>,
    inputs: &[S],
    out: &Interval<S>,
    concept: &SolutionConcept<S>,
) -> bool {
    // Every row is a conjunction of one-sided bounds or a band, so the endpoints decide.
    check_row(gate_type, inputs, out.lo, concept).ok() && check_row(gate_type, inputs, out.hi, concept).ok()
}

/// Sweeps point seeds for `input_nodes` over a grid of the given pitch,
/// propagates at `inner`, and checks the target row on the output enclosure.
pub fn certify_gadget<S: Scalar>(
    gadget: &Circuit<S>,
    input_nodes: &[NodeId],
    output_node: &NodeId,
    grid_pitch: S,
    inner: &SolutionConcept<S>,
    target: &TargetRow<S>,
) -> Result<GadgetCertificate<S>, AnalysisError> {
    inner.validate()?;
    let arity = target.gate_type.kind().arity();
    if input_nodes.len() != arity {
        return Err(AnalysisError::Precondition(format!(
            "target row takes {arity} inputs, {} given",
            input_nodes.len()
        )));
    }
    if !(grid_pitch > S::zero()) {
        return Err(AnalysisError::Precondition("grid pitch must be positive".into()));
    }
    let plan = Plan::new(gadget, input_nodes)?;
    let in_idx: Vec<usize> = input_nodes.iter().map(|n| plan.index(n).expect("seeded")).collect();
    let out_idx = plan.index(output_node).ok_or_else(|| AnalysisError::UnknownNode(output_node.clone()))?;
    let grid = unit_grid(grid_pitch);
    let points = grid.len().pow(arity as u32);
    let point = |k: usize| -> Vec<S> {
        let mut k = k;
        (0..arity)
            .map(|_| {
                let v = grid[k % grid.len()];
                k /= grid.len();
                v
            })
            .collect()
    };
    // A failing grid point and the output enclosure there.
    type Failure<S> = Option<(Vec<S>, Interval<S>)>;
    let eval = |k: usize| -> Result<Failure<S>, AnalysisError> {
        let p = point(k);
        let mut seeds = vec![None; plan.cc.len()];
        for (&i, &v) in in_idx.iter().zip(&p) {
            seeds[i] = Some(Interval::point(v));
        }
        let vals = plan.run(&seeds, inner)?;
        let out = vals[out_idx];
        Ok((!row_holds_on(&target.gate_type, &p, &out, &target.concept)).then_some((p, out)))
    };
    let first = (0..points).into_par_iter().map(eval).find_first(|r| !matches!(r, Ok(None)));
    match first {
        None => Ok(GadgetCertificate { certified: true, counterexample: None, output_interval: None, points }),
        Some(Err(e)) => Err(e),
        Some(Ok(Some((p, out)))) => Ok(GadgetCertificate {
            certified: false,
            counterexample: Some(input_nodes.iter().cloned().zip(p).collect()),
            output_interval: Some(out),
            points,
        }),
        Some(Ok(None)) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeds(pairs: &[(&str, f64, f64)]) -> HashMap<NodeId, Interval<f64>> {
        pairs.iter().map(|&(n, lo, hi)| (NodeId::from(n), Interval::new(lo, hi).unwrap())).collect()
    }

    #[test]
    fn cmp_rule_fires_when_separated() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Cmp, ["z", "a"], "v");
        let out = propagate_intervals(
            &c,
            &seeds(&[("z", 0.49, 0.51), ("a", 0.0, 0.1)]),
            &SolutionConcept::Strong { eps: 0.05 },
        )
        .unwrap();
        assert_eq!(out[&NodeId::from("v")], Interval { lo: 0.95, hi: 1.0 });
    }

    #[test]
    fn copy_chain_accumulates_eps() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Copy, ["s"], "c1");
        c.push(GateType::Copy, ["c1"], "c2");
        c.push(GateType::Copy, ["c2"], "c3");
        let out = propagate_intervals(&c, &seeds(&[("s", 0.5, 0.5)]), &SolutionConcept::Strong { eps: 0.01 }).unwrap();
        let iv = out[&NodeId::from("c3")];
        assert!((iv.lo - 0.47).abs() < 1e-12 && (iv.hi - 0.53).abs() < 1e-12, "{iv}");
    }

    #[test]
    fn unseeded_free_node_and_cycle_are_errors() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["a"], "v");
        let weak = SolutionConcept::Weak { eps: 0.1 };
        assert!(matches!(propagate_intervals(&c, &HashMap::new(), &weak), Err(AnalysisError::UnseededFreeNode(_))));
        let mut loop_ = Circuit::<f64>::new();
        loop_.push(GateType::Not, ["v"], "v");
        assert!(matches!(propagate_intervals(&loop_, &HashMap::new(), &weak), Err(AnalysisError::Cycle)));
        // seeding the loop node breaks the cycle and checks consistency
        let ok = propagate_intervals(&loop_, &seeds(&[("v", 0.5, 0.5)]), &weak).unwrap();
        assert_eq!(ok[&NodeId::from("v")], Interval::point(0.5));
        assert!(matches!(
            propagate_intervals(&loop_, &seeds(&[("v", 0.0, 0.0)]), &weak),
            Err(AnalysisError::Infeasible(_))
        ));
    }

    #[test]
    fn swapped_cmp_is_not_a_not_gadget() {
        let mut g = Circuit::<f64>::new();
        g.push(GateType::Const(0.5), Vec::<&str>::new(), "z");
        g.push(GateType::Cmp, ["a", "z"], "v");
        let target = TargetRow { gate_type: GateType::Not, concept: SolutionConcept::Strong { eps: 0.1 } };
        let cert =
            certify_gadget(&g, &["a".into()], &"v".into(), 0.01, &SolutionConcept::Strong { eps: 0.05 }, &target)
                .unwrap();
        assert!(!cert.certified);
        assert_eq!(cert.counterexample, Some(vec![("a".into(), 0.0)]));
    }

    #[test]
    fn copy_is_not_a_not_gadget() {
        let mut g = Circuit::<f64>::new();
        g.push(GateType::Copy, ["a"], "v");
        let target = TargetRow { gate_type: GateType::Not, concept: SolutionConcept::Strong { eps: 0.1 } };
        let cert =
            certify_gadget(&g, &["a".into()], &"v".into(), 0.01, &SolutionConcept::Strong { eps: 0.05 }, &target)
                .unwrap();
        assert_eq!(cert.counterexample, Some(vec![("a".into(), 0.0)]));
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = unit_grid(0.25_f64);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
