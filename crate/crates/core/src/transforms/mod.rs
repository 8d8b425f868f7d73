//! Circuit rewriting passes.
//!
//! Every pass keeps all original nodes and names new ones
//! `<origin>$<pass>$<counter>`, so repeated runs give identical circuits.

mod boolean;
mod distribution;
mod fanout;
mod regular;

use indexmap::IndexSet;
use thiserror::Error;

pub use boolean::{boolean_gadget, eliminate_booleans, BOOLEAN_ELIMINATION_EPS_LIMIT, BOOLEAN_ELIMINATION_SOUND_LIMIT};
pub use distribution::{
    certify_distribution, distribution_eps_out, distribution_subroutine, Distribution, DistributionCertificate,
};
pub use fanout::{to_fanout2, FANOUT2_EPS_THRESHOLD};
pub use regular::{normalize, regularize};

use crate::analysis::AnalysisError;
use crate::circuit::{validate, Circuit, Gate, GateType, NodeId, RegularityDefect};
use crate::concepts::ConceptError;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("{pass}: eps must lie in {range}, got {eps}")]
    EpsOutOfRange { pass: &'static str, range: &'static str, eps: f64 },
    #[error("{0}: copies must be at least 1")]
    NoCopies(&'static str),
    #[error("circuit is malformed: {0}")]
    InvalidCircuit(String),
    #[error("circuit is not Boolean-regular: {0}")]
    NotRegular(RegularityDefect),
    #[error("assignment is not a weak solution: {0}")]
    NotASolution(String),
    #[error(transparent)]
    Concept(#[from] ConceptError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("distribution subcircuit failed certification: {0}")]
    Uncertified(String),
}

#[derive(Clone, Debug)]
pub struct TransformResult<S> {
    pub circuit: Circuit<S>,
    /// The input circuit's nodes, all present in `circuit`.
    pub preserved_nodes: IndexSet<NodeId>,
    pub fresh_nodes: IndexSet<NodeId>,
    /// Tolerance at which the output must be solved; `None` when the pass
    /// does not change it.
    pub eps_out: Option<S>,
    /// One line per rewrite, naming the original gate or node.
    pub notes: Vec<String>,
    /// Defects the pass could not repair.
    pub unrepaired: Vec<RegularityDefect>,
}

pub(crate) fn require_valid<S: Scalar>(circuit: &Circuit<S>) -> Result<(), TransformError> {
    let report = validate(circuit);
    match report.defects.first() {
        Some(d) => Err(TransformError::InvalidCircuit(d.to_string())),
        None => Ok(()),
    }
}

/// Accumulates a rewritten circuit and hands out fresh node names.
pub(crate) struct Builder<S> {
    nodes: IndexSet<NodeId>,
    gates: Vec<Gate<S>>,
    pass: &'static str,
    counter: usize,
    preserved: IndexSet<NodeId>,
    fresh: IndexSet<NodeId>,
    pub notes: Vec<String>,
}

impl<S: Scalar> Builder<S> {
    /// Starts from the nodes of `circuit` and no gates.
    pub fn new(circuit: &Circuit<S>, pass: &'static str) -> Self {
        Builder {
            nodes: circuit.nodes().clone(),
            gates: Vec::new(),
            pass,
            counter: 0,
            preserved: circuit.nodes().clone(),
            fresh: IndexSet::new(),
            notes: Vec::new(),
        }
    }

    pub fn fresh(&mut self, origin: &NodeId) -> NodeId {
        let base = origin.as_str().split('$').next().unwrap_or("n");
        loop {
            let id = NodeId::new(format!("{base}${}${}", self.pass, self.counter));
            self.counter += 1;
            if self.nodes.insert(id.clone()) {
                self.fresh.insert(id.clone());
                return id;
            }
        }
    }

    pub fn push(&mut self, gate: Gate<S>) {
        self.gates.push(gate);
    }

    /// Emits a gate writing a fresh node named after `origin`.
    pub fn emit(&mut self, gate_type: GateType<S>, inputs: Vec<NodeId>, origin: &NodeId) -> NodeId {
        let out = self.fresh(origin);
        self.gates.push(Gate::new(gate_type, inputs, out.clone()));
        out
    }

    pub fn finish(self, eps_out: Option<S>, unrepaired: Vec<RegularityDefect>) -> TransformResult<S> {
        TransformResult {
            circuit: Circuit::from_node_set(self.nodes, self.gates),
            preserved_nodes: self.preserved,
            fresh_nodes: self.fresh,
            eps_out,
            notes: self.notes,
            unrepaired,
        }
    }
}
