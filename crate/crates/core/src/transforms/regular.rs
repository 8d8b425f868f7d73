//! Boolean-regularization and snapping of solutions to {0, 1/2, 1}.

use std::collections::HashSet;

use super::{require_valid, Builder, TransformError, TransformResult};
use crate::circuit::{is_boolean_regular, regularity_defects, Circuit, GateId, GateType, NodeId, RegularityDefect};
use crate::concepts::{verify, Assignment, SolutionConcept};
use crate::scalar::Scalar;

/// Separates Boolean from non-Boolean readers: every non-Boolean input
/// position reading a node that also feeds a Boolean gate is rerouted
/// through a fresh `not(not(.))` chain. Boolean gates reading from
/// arithmetic gates cannot be repaired this way and are reported.
pub fn regularize<S: Scalar>(circuit: &Circuit<S>) -> Result<TransformResult<S>, TransformError> {
    require_valid(circuit)?;
    let unrepaired: Vec<RegularityDefect> = regularity_defects(circuit)
        .into_iter()
        .filter(|d| matches!(d, RegularityDefect::NonBooleanPredecessor { .. }))
        .collect();
    let consumers = circuit.consumers();
    let mut reroute: HashSet<(GateId, usize)> = HashSet::new();
    for node in circuit.nodes() {
        let Some(readers) = consumers.get(node) else { continue };
        let is_bool = |g: GateId| circuit.gates()[g.0].kind().is_boolean();
        if readers.iter().any(|&(g, _)| is_bool(g)) {
            reroute.extend(readers.iter().filter(|&&(g, _)| !is_bool(g)).copied());
        }
    }
    let mut b = Builder::new(circuit, "reg");
    for (i, gate) in circuit.gates().iter().enumerate() {
        let mut gate = gate.clone();
        for pos in 0..gate.inputs.len() {
            if !reroute.contains(&(GateId(i), pos)) {
                continue;
            }
            let n = gate.inputs[pos].clone();
            let m = b.emit(GateType::Not, vec![n.clone()], &n);
            let m = b.emit(GateType::Not, vec![m], &n);
            b.notes.push(format!("{gate}: input {pos} `{n}` read through a double negation"));
            gate.inputs[pos] = m;
        }
        b.push(gate);
    }
    for d in &unrepaired {
        b.notes.push(format!("unrepaired: {d}"));
    }
    Ok(b.finish(None, unrepaired))
}

/// Snaps every node read by a Boolean gate to 0, 1/2 or 1; other nodes keep their values.
///
/// For a Boolean-regular circuit and a weak `eps`-solution `x`, the result
/// is a weak solution for every tolerance in `[eps, 1/2)`.
pub fn normalize<S: Scalar>(circuit: &Circuit<S>, x: &Assignment<S>, eps: S) -> Result<Assignment<S>, TransformError> {
    require_valid(circuit)?;
    if !(eps > S::zero() && eps < S::half()) {
        return Err(TransformError::EpsOutOfRange { pass: "normalize", range: "(0, 1/2)", eps: eps.as_f64() });
    }
    if let Some(w) = is_boolean_regular(circuit).witness {
        return Err(TransformError::NotRegular(w));
    }
    let report = verify(circuit, x, &SolutionConcept::Weak { eps })?;
    if let Some((g, r)) = report.violations().next() {
        return Err(TransformError::NotASolution(format!("{}: {}", circuit.gates()[g.0], r.clause)));
    }
    let boolean_inputs: HashSet<&NodeId> =
        circuit.gates().iter().filter(|g| g.kind().is_boolean()).flat_map(|g| g.inputs.iter()).collect();
    Ok(x.iter()
        .map(|(n, v)| {
            let v = if !boolean_inputs.contains(n) {
                v
            } else if v <= eps {
                S::zero()
            } else if v >= S::one() - eps {
                S::one()
            } else {
                S::half()
            };
            (n.clone(), v)
        })
        .collect())
}
