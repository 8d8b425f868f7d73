//! Forward construction of solutions on acyclic circuits.

use super::{AnalysisError, Interval};
use crate::circuit::{Circuit, NodeId};
use crate::compiled::CompiledCircuit;
use crate::concepts::{admissible_output, Assignment, SolutionConcept};
use crate::scalar::Scalar;

/// Picks a node value. Receives `None` for free nodes and the admissible
/// output interval for gate outputs.
pub type Chooser<'a, S> = dyn FnMut(&NodeId, Option<Interval<S>>) -> S + 'a;

/// Evaluates gates in dependency order, letting `choose` pick every free
/// value and every gate output from its admissible interval.
///
/// Returns `None` when some gate admits no output for the chosen inputs.
pub fn sample_forward<S: Scalar>(
    circuit: &Circuit<S>,
    concept: &SolutionConcept<S>,
    choose: &mut Chooser<'_, S>,
) -> Result<Option<Assignment<S>>, AnalysisError> {
    let cc = CompiledCircuit::new(circuit);
    let order = cc.order.clone().ok_or(AnalysisError::Cycle)?;
    let mut x = vec![S::zero(); cc.len()];
    for i in cc.free_nodes() {
        x[i] = choose(&cc.names[i], None);
    }
    for gi in order {
        let g = &cc.gates[gi];
        let inputs = g.input_values(&x);
        let Some(adm) = admissible_output(&g.gate_type, &inputs[..g.inputs().len()], concept) else {
            return Ok(None);
        };
        x[g.output] = choose(&cc.names[g.output], Some(Interval { lo: adm.lo, hi: adm.hi }));
    }
    Ok(Some(cc.to_assignment(&x)))
}

/// A point of `[lo, hi]` at relative position `u`, kept a hair away from the
/// endpoints so rounding in the checker cannot push it out.
pub fn inset<S: Scalar>(iv: Interval<S>, u: S) -> S {
    let m = S::lit(1e-6);
    iv.lo + iv.width() * (m + u * (S::one() - m - m))
}
