//! Generalized circuits, their approximate solution concepts, and the
//! transformations and analyses built on top of them.

// `!(x > 0)` style guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod circuit;
pub mod compiled;
pub mod concepts;
pub mod dsl;
pub mod fixtures;
pub mod games;
pub mod random;
pub mod scalar;
pub mod transforms;

pub use scalar::Scalar;

/// Double-precision circuit.
pub type Circuit = circuit::Circuit<f64>;
/// Single-precision circuit.
pub type CircuitF32 = circuit::Circuit<f32>;
pub type Gate = circuit::Gate<f64>;
pub type GateType = circuit::GateType<f64>;
pub type Assignment = concepts::Assignment<f64>;
pub type AssignmentF32 = concepts::Assignment<f32>;
pub type SolutionConcept = concepts::SolutionConcept<f64>;
pub type SolutionConceptF32 = concepts::SolutionConcept<f32>;

pub use circuit::{GateId, GateKind, NodeId};
