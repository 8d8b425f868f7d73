//! Reduction to maximum fan-out 2.

use indexmap::IndexMap;

use super::distribution::{build, certify_distribution, distribution_eps_out};
use super::{require_valid, Builder, TransformError, TransformResult};
use crate::circuit::{Circuit, GateId, GateType, NodeId};
use crate::scalar::Scalar;

/// Upper end (exclusive) of the tolerance range accepted by [`to_fanout2`].
/// A design limit of this implementation, chosen so the per-copy error
/// budget `eps/3` stays well inside the certified range of the distribution
/// subcircuit.
pub const FANOUT2_EPS_THRESHOLD: f64 = 0.25;

/// Routes every node read by more than two input positions through a
/// distribution subcircuit with error `eps/3`, one output per position.
/// Free nodes are first copied so the subcircuit has a gate-driven source.
pub fn to_fanout2<S: Scalar>(circuit: &Circuit<S>, eps: S) -> Result<TransformResult<S>, TransformError> {
    require_valid(circuit)?;
    if !(eps > S::zero() && eps < S::lit(FANOUT2_EPS_THRESHOLD)) {
        return Err(TransformError::EpsOutOfRange { pass: "fanout2", range: "(0, 1/4)", eps: eps.as_f64() });
    }
    let eps_bar = eps / S::lit(3.0);
    let consumers = circuit.consumers();
    let producers = circuit.producers();
    let mut b = Builder::new(circuit, "fan2");
    let mut rewired: IndexMap<(GateId, usize), NodeId> = IndexMap::new();
    let mut distributed = false;
    for node in circuit.nodes() {
        let Some(readers) = consumers.get(node) else { continue };
        if readers.len() <= 2 {
            continue;
        }
        let cert = certify_distribution(readers.len(), eps_bar)?;
        if !cert.certified {
            return Err(TransformError::Uncertified(format!(
                "{} copies, worst error {}",
                readers.len(),
                cert.worst_error
            )));
        }
        let source = if producers.contains_key(node) {
            node.clone()
        } else {
            b.notes.push(format!("free node `{node}` copied before distribution"));
            b.emit(GateType::Copy, vec![node.clone()], node)
        };
        let outs = build(&mut b, &source, readers.len(), eps_bar);
        b.notes.push(format!("`{node}` distributed to {} readers", readers.len()));
        for (&(g, pos), out) in readers.iter().zip(outs) {
            rewired.insert((g, pos), out);
        }
        distributed = true;
    }
    let gates: Vec<_> = circuit
        .gates()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut g = g.clone();
            for (pos, input) in g.inputs.iter_mut().enumerate() {
                if let Some(n) = rewired.get(&(GateId(i), pos)) {
                    *input = n.clone();
                }
            }
            g
        })
        .collect();
    // Original gates keep their positions; subcircuits follow.
    let mut result = b.finish(None, Vec::new());
    result.circuit.prepend_gates(gates);
    result.eps_out = Some(if distributed { distribution_eps_out(eps_bar) } else { eps });
    Ok(result)
}
