//! The circuit as a Lipschitz self-map of the unit cube whose fixed points are solutions.

use crate::circuit::{Circuit, GateKind, GateType, NodeId};
use crate::compiled::CompiledCircuit;
use crate::concepts::{arithmetic_target, SolutionConcept};
use crate::scalar::Scalar;

/// Centre and half-width of the ramp replacing a Boolean threshold.
fn boolean_ramp<S: Scalar>(concept: &SolutionConcept<S>) -> (S, S) {
    let half = S::half();
    match *concept {
        SolutionConcept::Weak { eps } => {
            let w = eps.min(half - eps);
            (half, if w > S::zero() { w } else { eps })
        }
        SolutionConcept::Strong { eps } => (half, eps),
        SolutionConcept::Beta { beta, .. } => (half, beta),
        SolutionConcept::TruncatedStrong { eps, .. } => (concept.midpoint(), eps),
    }
}

/// `H * min(1, max(0, (t - c + w) / 2w))`
fn ramp<S: Scalar>(t: S, c: S, w: S, height: S) -> S {
    let r = (t - c + w) / (w + w);
    height * r.max(S::zero()).min(S::one())
}

/// Continuous response of one gate: exact clamped arithmetic, ramps across
/// comparison and Boolean thresholds.
pub fn gate_response<S: Scalar>(gate_type: &GateType<S>, inputs: &[S], concept: &SolutionConcept<S>) -> S {
    let kind = gate_type.kind();
    if kind.is_arithmetic() {
        return arithmetic_target(gate_type, inputs, concept);
    }
    let h = concept.upper();
    let (c, w) = boolean_ramp(concept);
    match kind {
        GateKind::Cmp => ramp(inputs[0] - inputs[1], S::zero(), concept.eps(), h),
        GateKind::Not => h - ramp(inputs[0], c, w, h),
        GateKind::Or => ramp(inputs[0], c, w, h).max(ramp(inputs[1], c, w, h)),
        GateKind::And => ramp(inputs[0], c, w, h).min(ramp(inputs[1], c, w, h)),
        _ => unreachable!(),
    }
}

/// Lipschitz constant of a gate response in the max-norm.
fn gate_lipschitz<S: Scalar>(kind: GateKind, concept: &SolutionConcept<S>) -> S {
    let h = concept.upper();
    match kind {
        GateKind::Const => S::zero(),
        GateKind::Scale | GateKind::Copy => S::one(),
        GateKind::Add | GateKind::Sub => S::lit(2.0),
        GateKind::Cmp => h / concept.eps(),
        GateKind::Not | GateKind::Or | GateKind::And => h / (boolean_ramp(concept).1 * S::lit(2.0)),
    }
}

#[derive(Clone, Debug)]
pub struct ContinuousCircuitMap<S> {
    cc: CompiledCircuit<S>,
    concept: SolutionConcept<S>,
    pub lipschitz_bound: S,
}

impl<S: Scalar> ContinuousCircuitMap<S> {
    pub fn dimension(&self) -> usize {
        self.cc.len()
    }

    /// Coordinate names, in the order used by [`ContinuousCircuitMap::eval`].
    pub fn names(&self) -> &[NodeId] {
        &self.cc.names
    }

    pub fn concept(&self) -> &SolutionConcept<S> {
        &self.concept
    }

    pub(crate) fn compiled(&self) -> &CompiledCircuit<S> {
        &self.cc
    }

    /// `F(x)`: free nodes map to themselves, gate outputs to their response.
    pub fn eval_into(&self, x: &[S], out: &mut [S]) {
        out.copy_from_slice(x);
        for g in &self.cc.gates {
            let inputs = g.input_values(x);
            out[g.output] = gate_response(&g.gate_type, &inputs[..g.inputs().len()], &self.concept);
        }
    }

    pub fn eval(&self, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); x.len()];
        self.eval_into(x, &mut out);
        out
    }
}

/// Builds `F` for `circuit` under `concept`; every exact fixed point of `F` is a solution.
pub fn circuit_to_function<S: Scalar>(circuit: &Circuit<S>, concept: &SolutionConcept<S>) -> ContinuousCircuitMap<S> {
    let cc = CompiledCircuit::new(circuit);
    let lipschitz_bound = cc.gates.iter().map(|g| gate_lipschitz(g.gate_type.kind(), concept)).fold(S::one(), S::max);
    ContinuousCircuitMap { cc, concept: *concept, lipschitz_bound }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const_is_constant() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Const(0.3), Vec::<&str>::new(), "v");
        let f = circuit_to_function(&c, &SolutionConcept::Strong { eps: 0.1 });
        assert_eq!(f.eval(&[0.9]), vec![0.3]);
    }

    #[test]
    fn not_loop_fixed_point_at_half() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["v"], "v");
        let f = circuit_to_function(&c, &SolutionConcept::Strong { eps: 0.1 });
        assert_eq!(f.eval(&[0.5]), vec![0.5]);
        assert_eq!(f.eval(&[0.3]), vec![1.0]);
    }

    #[test]
    fn cmp_clears_ramp() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Cmp, ["a1", "a2"], "v");
        let f = circuit_to_function(&c, &SolutionConcept::Strong { eps: 0.1 });
        assert_eq!(f.eval(&[0.7, 0.5, 0.0])[2], 1.0);
        assert_eq!(f.lipschitz_bound, 10.0);
    }

    #[test]
    fn truncated_plateaus_at_one_over_k() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["a"], "v");
        let f = circuit_to_function(&c, &SolutionConcept::TruncatedStrong { eps: 0.05, k: 2 });
        assert_eq!(f.eval(&[0.0, 0.0])[1], 0.5);
        assert_eq!(f.eval(&[0.5, 0.0])[1], 0.0);
        assert_eq!(f.eval(&[0.25, 0.0])[1], 0.25);
    }
}
