//! Replacement of Boolean gates by comparison gadgets.

use super::{require_valid, Builder, TransformError, TransformResult};
use crate::circuit::{Circuit, Gate, GateKind, GateType, NodeId};
use crate::scalar::Scalar;

/// Upper end (exclusive) of the tolerance range accepted by [`eliminate_booleans`].
pub const BOOLEAN_ELIMINATION_EPS_LIMIT: f64 = 1.0 / 3.0;

/// Below this tolerance the Or gadget's final comparison is pinned low when
/// both inputs are false: the sum can reach `3 eps'` and the constant can sit
/// at `1/2 - eps'`, so `3 eps' < 1/2 - 2 eps'` is needed.
pub const BOOLEAN_ELIMINATION_SOUND_LIMIT: f64 = 1.0 / 5.0;

/// `out = cmp(half, a)`: high when `a` is clearly below 1/2.
fn not_gadget<S: Scalar>(b: &mut Builder<S>, a: NodeId, origin: &NodeId, out: Option<NodeId>) -> NodeId {
    let z = b.emit(GateType::Const(S::half()), vec![], origin);
    match out {
        Some(v) => {
            b.push(Gate::new(GateType::Cmp, vec![z, a], v.clone()));
            v
        }
        None => b.emit(GateType::Cmp, vec![z, a], origin),
    }
}

/// `out = cmp(cmp(a1, half) + cmp(a2, half), half)`
fn or_gadget<S: Scalar>(b: &mut Builder<S>, a1: NodeId, a2: NodeId, origin: &NodeId, out: Option<NodeId>) -> NodeId {
    let z1 = b.emit(GateType::Const(S::half()), vec![], origin);
    let c1 = b.emit(GateType::Cmp, vec![a1, z1], origin);
    let z2 = b.emit(GateType::Const(S::half()), vec![], origin);
    let c2 = b.emit(GateType::Cmp, vec![a2, z2], origin);
    let s = b.emit(GateType::Add, vec![c1, c2], origin);
    let z3 = b.emit(GateType::Const(S::half()), vec![], origin);
    match out {
        Some(v) => {
            b.push(Gate::new(GateType::Cmp, vec![s, z3], v.clone()));
            v
        }
        None => b.emit(GateType::Cmp, vec![s, z3], origin),
    }
}

/// Rewrites every Or/And/Not gate into Const/Add/Cmp gadgets.
///
/// Each Boolean gate's output node survives as the output of the last
/// comparison of its gadget. Solutions of the result at `eps/2` restrict to
/// strong `eps`-solutions of the input for `0 < eps < 1/5`. Tolerances up to
/// 1/3 are accepted but Or and And gates lose that guarantee, and a note says so.
pub fn eliminate_booleans<S: Scalar>(circuit: &Circuit<S>, eps: S) -> Result<TransformResult<S>, TransformError> {
    require_valid(circuit)?;
    if !(eps > S::zero() && eps < S::lit(BOOLEAN_ELIMINATION_EPS_LIMIT)) {
        return Err(TransformError::EpsOutOfRange { pass: "boolean-eliminate", range: "(0, 1/3)", eps: eps.as_f64() });
    }
    let mut b = Builder::new(circuit, "bool");
    if eps >= S::lit(BOOLEAN_ELIMINATION_SOUND_LIMIT)
        && circuit.gates().iter().any(|g| matches!(g.kind(), GateKind::Or | GateKind::And))
    {
        b.notes.push(format!(
            "eps = {eps} >= 1/5: Or/And gadgets may output TRUE on all-FALSE inputs, restriction is not guaranteed"
        ));
    }
    for gate in circuit.gates() {
        let v = gate.output.clone();
        match gate.gate_type {
            GateType::Not => {
                not_gadget(&mut b, gate.inputs[0].clone(), &v, Some(v.clone()));
                b.notes.push(format!("{gate}: cmp gadget"));
            }
            GateType::Or => {
                or_gadget(&mut b, gate.inputs[0].clone(), gate.inputs[1].clone(), &v, Some(v.clone()));
                b.notes.push(format!("{gate}: three-cmp gadget"));
            }
            GateType::And => {
                let n1 = not_gadget(&mut b, gate.inputs[0].clone(), &v, None);
                let n2 = not_gadget(&mut b, gate.inputs[1].clone(), &v, None);
                let o = or_gadget(&mut b, n1, n2, &v, None);
                not_gadget(&mut b, o, &v, Some(v.clone()));
                b.notes.push(format!("{gate}: De Morgan gadget"));
            }
            _ => b.push(gate.clone()),
        }
    }
    Ok(b.finish(Some(eps * S::half()), Vec::new()))
}

/// The gadget replacing a single Boolean gate `v = kind(a[, b])` at `eps`,
/// with its input nodes and output node.
pub fn boolean_gadget<S: Scalar>(kind: GateKind, eps: S) -> Result<(Circuit<S>, Vec<NodeId>, NodeId), TransformError> {
    let gate_type = match kind {
        GateKind::Not => GateType::Not,
        GateKind::And => GateType::And,
        GateKind::Or => GateType::Or,
        other => return Err(TransformError::InvalidCircuit(format!("`{other}` is not a Boolean gate"))),
    };
    let inputs: Vec<NodeId> = ["a", "b"][..kind.arity()].iter().map(|&n| NodeId::from(n)).collect();
    let mut c = Circuit::new();
    c.push(gate_type, inputs.clone(), "v");
    Ok((eliminate_booleans(&c, eps)?.circuit, inputs, NodeId::from("v")))
}
