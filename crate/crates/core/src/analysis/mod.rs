//! Monotonicity probing, interval certification, the continuous circuit map and the solver.

mod continuous;
mod intervals;
mod sampling;
mod solver;

use thiserror::Error;

pub use continuous::{circuit_to_function, gate_response, ContinuousCircuitMap};
pub(crate) use intervals::Plan;
pub use intervals::{
    certify_gadget, gate_interval, propagate_intervals, row_holds_on, unit_grid, GadgetCertificate, Interval, TargetRow,
};
pub use sampling::{inset, sample_forward, Chooser};
pub use solver::{solve, SolveBudget, SolveMethod, SolveOutcome};

use crate::circuit::{Circuit, GateId, NodeId};
use crate::concepts::{verify, Assignment, ConceptError, SolutionConcept};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Concept(#[from] ConceptError),
    #[error("circuit is malformed: {0}")]
    InvalidCircuit(String),
    #[error("gates needing propagation form a cycle")]
    Cycle,
    #[error("free node `{0}` has no seed")]
    UnseededFreeNode(NodeId),
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("no value of node `{0}` is consistent with the seeds")]
    Infeasible(NodeId),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// A solution concept with its tolerance left open.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ConceptFamily<S> {
    Weak,
    Strong,
    Beta { beta: S },
    TruncatedStrong { k: u32 },
}

impl<S: Scalar> ConceptFamily<S> {
    pub fn at(&self, eps: S) -> SolutionConcept<S> {
        match *self {
            ConceptFamily::Weak => SolutionConcept::Weak { eps },
            ConceptFamily::Strong => SolutionConcept::Strong { eps },
            ConceptFamily::Beta { beta } => SolutionConcept::Beta { eps, beta },
            ConceptFamily::TruncatedStrong { k } => SolutionConcept::TruncatedStrong { eps, k },
        }
    }
}

/// An assignment accepted at a small tolerance and rejected at a larger one.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityWitness<S> {
    pub assignment: Assignment<S>,
    pub eps_small: S,
    pub eps_large: S,
    /// First gate rejected at `eps_large`.
    pub gate: GateId,
}

/// Returns a witness iff `x` verifies at `eps_small` and fails at `eps_large`.
pub fn probe_monotonicity<S: Scalar>(
    circuit: &Circuit<S>,
    x: &Assignment<S>,
    eps_small: S,
    eps_large: S,
    family: ConceptFamily<S>,
) -> Result<Option<MonotonicityWitness<S>>, AnalysisError> {
    if !(eps_small < eps_large) {
        return Err(AnalysisError::Precondition(format!(
            "need eps_small < eps_large, got {eps_small} and {eps_large}"
        )));
    }
    let small = verify(circuit, x, &family.at(eps_small))?;
    if !small.is_solution {
        return Ok(None);
    }
    let large = verify(circuit, x, &family.at(eps_large))?;
    let gate = large.violations().next().map(|(gate, _)| *gate);
    Ok(gate.map(|gate| MonotonicityWitness { assignment: x.clone(), eps_small, eps_large, gate }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateType;

    fn prop1() -> (Circuit<f64>, Assignment<f64>) {
        let mut c = Circuit::new();
        c.push(GateType::Not, ["a"], "v");
        (c, [("a", 0.15), ("v", 0.5)].into_iter().collect())
    }

    #[test]
    fn weak_witness_at_not_gate() {
        let (c, x) = prop1();
        let w = probe_monotonicity(&c, &x, 0.1, 0.2, ConceptFamily::Weak).unwrap().unwrap();
        assert_eq!(w.gate, GateId(0));
    }

    #[test]
    fn strong_has_no_witness() {
        let (c, x) = prop1();
        assert_eq!(probe_monotonicity(&c, &x, 0.1, 0.2, ConceptFamily::Strong).unwrap(), None);
    }

    #[test]
    fn const_has_no_witness() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Const(0.5), Vec::<&str>::new(), "v");
        let x = [("v", 0.5)].into_iter().collect();
        assert_eq!(probe_monotonicity(&c, &x, 0.01, 0.3, ConceptFamily::Weak).unwrap(), None);
    }
}
