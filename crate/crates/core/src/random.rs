//! Random circuits, solutions and games for property tests and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::{inset, sample_forward, AnalysisError};
use crate::circuit::{Circuit, GateKind, GateType, NodeId};
use crate::concepts::{Assignment, SolutionConcept};
use crate::games::{BinaryGraphicalGame, PlayerId};
use crate::scalar::Scalar;

/// Parameter drawn from a 1/1000 grid so it prints compactly.
pub fn random_zeta<S: Scalar, R: Rng>(rng: &mut R) -> S {
    S::int(rng.gen_range(0..=1000)) / S::int(1000)
}

fn random_gate_type<S: Scalar, R: Rng>(rng: &mut R, kind: GateKind) -> GateType<S> {
    match GateType::plain(kind) {
        Some(t) => t,
        None => GateType::with_zeta(kind, random_zeta(rng)),
    }
}

/// `gates` random gates over `free` free nodes `x0..` and outputs `g0..`.
/// When `cyclic`, inputs may refer to any output, including later ones.
pub fn random_circuit<S: Scalar, R: Rng>(rng: &mut R, gates: usize, free: usize, cyclic: bool) -> Circuit<S> {
    let mut c = Circuit::new();
    let frees: Vec<NodeId> = (0..free).map(|i| NodeId::new(format!("x{i}"))).collect();
    for f in &frees {
        c.add_node(f.clone());
    }
    for i in 0..gates {
        let visible = if cyclic { gates } else { i };
        let pool = frees.len() + visible;
        let kind = if pool == 0 { GateKind::Const } else { *GateKind::ALL.choose(rng).expect("nonempty") };
        let gate_type = random_gate_type(rng, kind);
        let inputs: Vec<NodeId> = (0..kind.arity())
            .map(|_| {
                let k = rng.gen_range(0..pool);
                if k < frees.len() {
                    frees[k].clone()
                } else {
                    NodeId::new(format!("g{}", k - frees.len()))
                }
            })
            .collect();
        c.push(gate_type, inputs, format!("g{i}"));
    }
    c
}

/// Acyclic circuit in which Boolean gates read only Boolean or comparison
/// outputs (or dedicated free nodes) and no node feeds both a Boolean and a
/// non-Boolean gate.
pub fn random_regular_circuit<S: Scalar, R: Rng>(rng: &mut R, gates: usize, free: usize) -> Circuit<S> {
    let mut c = Circuit::new();
    // `arith` nodes are read only by non-Boolean gates, `boolean` nodes only by Boolean gates.
    let mut arith: Vec<NodeId> = Vec::new();
    let mut boolean: Vec<NodeId> = Vec::new();
    for i in 0..free {
        let id = NodeId::new(format!("x{i}"));
        c.add_node(id.clone());
        if rng.gen_bool(0.5) {
            boolean.push(id);
        } else {
            arith.push(id);
        }
    }
    for i in 0..gates {
        let out = NodeId::new(format!("g{i}"));
        let mut kind = *GateKind::ALL.choose(rng).expect("nonempty");
        if kind.is_boolean() && boolean.is_empty() {
            kind = GateKind::Cmp;
        }
        if !kind.is_boolean() && kind.arity() > 0 && arith.is_empty() {
            kind = GateKind::Const;
        }
        let pool = if kind.is_boolean() { &boolean } else { &arith };
        let inputs: Vec<NodeId> = (0..kind.arity()).map(|_| pool.choose(rng).expect("nonempty").clone()).collect();
        c.push(random_gate_type(rng, kind), inputs, out.clone());
        if (kind.is_boolean() || kind == GateKind::Cmp) && rng.gen_bool(0.6) {
            boolean.push(out);
        } else {
            arith.push(out);
        }
    }
    c
}

/// Forward-sampled solution of an acyclic circuit: free values uniform in
/// the concept's range, gate outputs uniform inside their admissible interval.
pub fn random_solution<S: Scalar, R: Rng>(
    rng: &mut R,
    circuit: &Circuit<S>,
    concept: &SolutionConcept<S>,
) -> Result<Option<Assignment<S>>, AnalysisError> {
    let upper = concept.upper();
    sample_forward(circuit, concept, &mut |_, iv| match iv {
        None => upper * S::lit(rng.gen::<f64>()),
        Some(iv) => inset(iv, S::lit(rng.gen::<f64>())),
    })
}

/// Like [`random_solution`] but every gate output sits at one end of its
/// admissible interval.
pub fn adversarial_solution<S: Scalar, R: Rng>(
    rng: &mut R,
    circuit: &Circuit<S>,
    concept: &SolutionConcept<S>,
) -> Result<Option<Assignment<S>>, AnalysisError> {
    let upper = concept.upper();
    sample_forward(circuit, concept, &mut |_, iv| match iv {
        None => upper * S::lit(rng.gen::<f64>()),
        Some(iv) => inset(iv, if rng.gen_bool(0.5) { S::zero() } else { S::one() }),
    })
}

/// Random assignment with every value in `[0, upper]`.
pub fn random_assignment<S: Scalar, R: Rng>(rng: &mut R, circuit: &Circuit<S>, upper: S) -> Assignment<S> {
    circuit.nodes().iter().map(|n| (n.clone(), upper * S::lit(rng.gen::<f64>()))).collect()
}

/// Game on players `p0..` where each player reads up to `max_neighbors`
/// others and has payoffs from a 1/100 grid.
pub fn random_game<S: Scalar, R: Rng>(rng: &mut R, players: usize, max_neighbors: usize) -> BinaryGraphicalGame<S> {
    let ids: Vec<PlayerId> = (0..players).map(|i| NodeId::new(format!("p{i}"))).collect();
    let mut g = BinaryGraphicalGame::new();
    for (i, id) in ids.iter().enumerate() {
        let others: Vec<PlayerId> = ids.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
        let k = rng.gen_range(0..=max_neighbors.min(others.len()));
        let neighbors: Vec<PlayerId> = others.choose_multiple(rng, k).cloned().collect();
        let rows: Vec<[S; 2]> = (0..1usize << k)
            .map(|_| [S::int(rng.gen_range(0..=100)) / S::int(100), S::int(rng.gen_range(0..=100)) / S::int(100)])
            .collect();
        g.set_utility(id.clone(), neighbors, |own, acts| {
            let mask = acts.iter().enumerate().fold(0usize, |m, (i, &a)| m | (usize::from(a) << i));
            rows[mask][usize::from(own)]
        });
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{is_boolean_regular, validate};
    use crate::concepts::verify;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_circuits_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(validate(&random_circuit::<f64, _>(&mut rng, 20, 3, true)).ok);
            let acyclic = random_circuit::<f64, _>(&mut rng, 20, 3, false);
            assert!(acyclic.is_acyclic());
        }
    }

    #[test]
    fn regular_generator_is_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let c = random_regular_circuit::<f64, _>(&mut rng, 25, 3);
            assert!(is_boolean_regular(&c).regular, "{:?}", is_boolean_regular(&c).witness);
            assert!(c.is_acyclic());
        }
    }

    #[test]
    fn sampled_solutions_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let concept = SolutionConcept::Strong { eps: 0.05 };
        for _ in 0..50 {
            let c = random_circuit::<f64, _>(&mut rng, 20, 3, false);
            let x = random_solution(&mut rng, &c, &concept).unwrap().unwrap();
            assert!(verify(&c, &x, &concept).unwrap().is_solution);
            let y = adversarial_solution(&mut rng, &c, &concept).unwrap().unwrap();
            assert!(verify(&c, &y, &concept).unwrap().is_solution);
        }
    }
}
