#![allow(dead_code)]

use gckit::circuit::{Circuit, GateType};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `v = not(a)`.
pub fn not_circuit() -> Circuit<f64> {
    let mut c = Circuit::new();
    c.push(GateType::Not, ["a"], "v");
    c
}

/// `v = kind(a[, b])` for a Boolean or arithmetic gate type.
pub fn single(gt: GateType<f64>) -> Circuit<f64> {
    let mut c = Circuit::new();
    let inputs: Vec<&str> = ["a", "b"][..gt.kind().arity()].to_vec();
    c.push(gt, inputs, "v");
    c
}
