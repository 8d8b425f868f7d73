//! A fan-out-2 subcircuit that copies one value to many outputs.
//!
//! The source runs down a chain of copy gates. Link `i` is compared against
//! the threshold `(i - 1/2)/K`, giving a unary encoding of the source at
//! resolution `1/K`. Each bit is fanned out through a tree of double
//! negations, which absorb gate slack instead of accumulating it, and every
//! output sums `bit/K` over all bits with a balanced adder tree.

use std::any::TypeId;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;

use super::{Builder, TransformError, TransformResult};
use crate::analysis::{Interval, Plan};
use crate::circuit::{Circuit, GateType, NodeId};
use crate::concepts::SolutionConcept;
use crate::scalar::Scalar;

/// Number of thresholds for a given output error: resolution at most `eps_bar/8`.
fn levels<S: Scalar>(eps_bar: S) -> usize {
    (S::lit(8.0) / eps_bar).ceil().to_usize().expect("eps_bar checked positive")
}

/// Tolerance the subcircuit must be solved at: `delta^2/4` with `delta = 1/K`.
pub fn distribution_eps_out<S: Scalar>(eps_bar: S) -> S {
    let k = S::int(levels(eps_bar) as u64);
    S::one() / (k * k * S::lit(4.0))
}

fn check_params<S: Scalar>(copies: usize, eps_bar: S) -> Result<(), TransformError> {
    if copies == 0 {
        return Err(TransformError::NoCopies("distribution"));
    }
    if !(eps_bar > S::zero() && eps_bar < S::lit(0.25)) {
        return Err(TransformError::EpsOutOfRange { pass: "distribution", range: "(0, 1/4)", eps: eps_bar.as_f64() });
    }
    Ok(())
}

/// `n` handles on `node`, each to be consumed by one input position, keeping every fan-out at most 2.
fn fan<S: Scalar>(b: &mut Builder<S>, node: NodeId, n: usize, out: &mut Vec<NodeId>) {
    if n <= 2 {
        out.extend(std::iter::repeat_n(node, n));
        return;
    }
    let left = n.div_ceil(2);
    for part in [left, n - left] {
        let m = b.emit(GateType::Not, vec![node.clone()], &node);
        let m = b.emit(GateType::Not, vec![m], &node);
        fan(b, m, part, out);
    }
}

fn sum_tree<S: Scalar>(b: &mut Builder<S>, mut terms: Vec<NodeId>, origin: &NodeId) -> NodeId {
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => next.push(b.emit(GateType::Add, vec![x, y], origin)),
                None => next.push(x),
            }
        }
        terms = next;
    }
    terms.pop().expect("at least one term")
}

/// Emits the subcircuit into `b`; returns the output nodes.
pub(crate) fn build<S: Scalar>(b: &mut Builder<S>, source: &NodeId, copies: usize, eps_bar: S) -> Vec<NodeId> {
    if copies == 1 {
        return vec![b.emit(GateType::Copy, vec![source.clone()], source)];
    }
    let k = levels(eps_bar);
    let kk = S::int(k as u64);
    let delta = S::one() / kk;
    let mut leaves: Vec<Vec<NodeId>> = Vec::with_capacity(k);
    let mut link = source.clone();
    for i in 1..=k {
        link = b.emit(GateType::Copy, vec![link], source);
        let t = (S::int(2 * i as u64) - S::one()) / (kk + kk);
        let t = b.emit(GateType::Const(t), vec![], source);
        let bit = b.emit(GateType::Cmp, vec![link.clone(), t], source);
        let mut handles = Vec::with_capacity(copies);
        fan(b, bit, copies, &mut handles);
        leaves.push(handles);
    }
    (0..copies)
        .map(|j| {
            let terms = leaves.iter().map(|h| b.emit(GateType::Scale(delta), vec![h[j].clone()], source)).collect();
            sum_tree(b, terms, source)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Distribution<S> {
    pub result: TransformResult<S>,
    pub source: NodeId,
    pub outputs: Vec<NodeId>,
}

/// Subcircuit with input `source` and `copies` outputs, each within
/// `eps_bar` of the source in every strong solution at `eps_out`.
/// The bound is certified by interval propagation before returning.
pub fn distribution_subroutine<S: Scalar>(
    source: &NodeId,
    copies: usize,
    eps_bar: S,
) -> Result<Distribution<S>, TransformError> {
    check_params(copies, eps_bar)?;
    let cert = certify_distribution::<S>(copies, eps_bar)?;
    if !cert.certified {
        return Err(TransformError::Uncertified(format!(
            "{copies} copies at eps_bar={eps_bar}: worst error {}",
            cert.worst_error
        )));
    }
    let mut seed = Circuit::new();
    seed.add_node(source.clone());
    let mut b = Builder::new(&seed, "dist");
    let outputs = build(&mut b, source, copies, eps_bar);
    b.notes.push(format!("{copies} copies of `{source}`: certified error {:.3e} <= {}", cert.worst_error, eps_bar));
    let result = b.finish(Some(distribution_eps_out(eps_bar)), Vec::new());
    Ok(Distribution { result, source: source.clone(), outputs })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistributionCertificate {
    pub certified: bool,
    /// Largest `|output - source|` over all cells and outputs.
    pub worst_error: f64,
    pub cells: usize,
    pub eps_out: f64,
}

type CertKey = (TypeId, usize, u64);

fn cache() -> &'static Mutex<HashMap<CertKey, DistributionCertificate>> {
    static CACHE: OnceLock<Mutex<HashMap<CertKey, DistributionCertificate>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Splits `[0, 1]` into cells a quarter of the resolution wide, propagates
/// each cell through the subcircuit under the strong concept at `eps_out`,
/// and checks every output enclosure against `[hi - eps_bar, lo + eps_bar]`.
pub fn certify_distribution<S: Scalar>(copies: usize, eps_bar: S) -> Result<DistributionCertificate, TransformError> {
    check_params(copies, eps_bar)?;
    let key = (TypeId::of::<S>(), copies, eps_bar.as_f64().to_bits());
    if let Some(c) = cache().lock().expect("cache lock").get(&key) {
        return Ok(*c);
    }
    let source = NodeId::from("s");
    let mut seed = Circuit::new();
    seed.add_node(source.clone());
    let mut b = Builder::new(&seed, "dist");
    let outputs = build(&mut b, &source, copies, eps_bar);
    let circuit = b.finish(None, Vec::new()).circuit;
    let eps_out = distribution_eps_out(eps_bar);
    let concept = SolutionConcept::Strong { eps: eps_out };
    let plan = Plan::new(&circuit, std::slice::from_ref(&source))?;
    let src = plan.index(&source).expect("source node");
    let outs: Vec<usize> = outputs.iter().map(|o| plan.index(o).expect("output node")).collect();
    let cells = 4 * levels(eps_bar);
    let n = S::int(cells as u64);
    let errors: Vec<Result<S, TransformError>> = (0..cells)
        .into_par_iter()
        .map(|c| {
            let lo = S::int(c as u64) / n;
            let hi = S::int(c as u64 + 1) / n;
            let mut seeds = vec![None; plan.cc.len()];
            seeds[src] = Some(Interval { lo, hi });
            let vals = plan.run(&seeds, &concept)?;
            Ok(outs.iter().map(|&o| (vals[o].hi - lo).max(hi - vals[o].lo)).fold(S::zero(), S::max))
        })
        .collect();
    let mut worst = S::zero();
    for e in errors {
        worst = worst.max(e?);
    }
    let cert = DistributionCertificate {
        certified: worst <= eps_bar,
        worst_error: worst.as_f64(),
        cells,
        eps_out: eps_out.as_f64(),
    };
    cache().lock().expect("cache lock").insert(key, cert);
    Ok(cert)
}
