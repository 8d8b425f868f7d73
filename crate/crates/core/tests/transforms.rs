mod common;

use std::collections::HashMap;

use common::rng;
use gckit::analysis::{propagate_intervals, Interval};
use gckit::circuit::{is_boolean_regular, max_fan_out, Circuit, GateKind, GateType, NodeId};
use gckit::concepts::{verify, Assignment, SolutionConcept};
use gckit::dsl::parse_circuit;
use gckit::fixtures::ISSUE4_CIRCUIT;
use gckit::random::{adversarial_solution, random_circuit, random_regular_circuit, random_solution};
use gckit::transforms::{
    boolean_gadget, eliminate_booleans, normalize, regularize, to_fanout2, TransformResult,
    BOOLEAN_ELIMINATION_SOUND_LIMIT,
};
use proptest::prelude::*;
use rand::Rng;

/// Tolerances for the fan-out reduction; a short list keeps certification memoized.
const FANOUT_EPS: [f64; 4] = [0.1, 0.15, 0.2, 0.24];

fn check_bookkeeping(c: &Circuit<f64>, r: &TransformResult<f64>) -> Result<(), TestCaseError> {
    let original: Vec<&NodeId> = c.nodes().iter().collect();
    let preserved: Vec<&NodeId> = r.preserved_nodes.iter().collect();
    prop_assert_eq!(preserved, original);
    prop_assert!(r.preserved_nodes.iter().all(|n| r.circuit.nodes().contains(n)));
    prop_assert!(r.fresh_nodes.iter().all(|n| !r.preserved_nodes.contains(n)));
    prop_assert_eq!(r.circuit.nodes().len(), r.preserved_nodes.len() + r.fresh_nodes.len());
    Ok(())
}

#[test]
fn issue4_reduction_pins_scaled_copies() {
    let eps = 0.1;
    let c = parse_circuit::<f64>(ISSUE4_CIRCUIT).unwrap();
    let r = to_fanout2(&c, eps).unwrap();
    assert_eq!(max_fan_out(&r.circuit), 2);
    let eps_out = r.eps_out.unwrap();
    let seeds: HashMap<NodeId, Interval<f64>> =
        [("a", 0.3), ("b", 0.5)].into_iter().map(|(n, v)| (NodeId::new(n), Interval::point(v))).collect();
    let ivs = propagate_intervals(&r.circuit, &seeds, &SolutionConcept::Strong { eps: eps_out }).unwrap();
    // Each copy of b is within eps/3 of it, then scaled with eps_out slack.
    let slack = eps / 3.0 + eps_out;
    for (node, centre) in [("c", 0.25), ("d", 1.0 / 6.0), ("e", 0.125)] {
        let iv = ivs[&NodeId::new(node)];
        assert!(iv.lo >= centre - slack && iv.hi <= centre + slack, "{node}: {iv:?}");
    }
    assert!(!ivs[&NodeId::new("c")].contains(0.4));
}

#[test]
fn or_gadget_breaks_above_a_fifth() {
    let eps = 0.25;
    let inner = eps / 2.0;
    let (gadget, inputs, v) = boolean_gadget::<f64>(GateKind::Or, eps).unwrap();
    let mut x: Assignment<f64> = inputs.iter().map(|n| (n.clone(), 0.0)).collect();
    // Constants at 1/2 - eps', comparisons low at eps', the sum at 3 eps', so the last comparison is free.
    for g in gadget.gates() {
        let value = match g.kind() {
            GateKind::Const | GateKind::Add => 0.5 - inner,
            GateKind::Cmp if g.output == v => 1.0,
            _ => inner,
        };
        x.set(g.output.clone(), value);
    }
    assert!(verify(&gadget, &x, &SolutionConcept::Strong { eps: inner }).unwrap().is_solution);
    let mut single = Circuit::new();
    single.push(GateType::Or, inputs.clone(), v.clone());
    assert!(!verify(&single, &x.restrict(single.nodes()), &SolutionConcept::Strong { eps }).unwrap().is_solution);
    let notes = eliminate_booleans(&single, eps).unwrap().notes;
    assert!(notes.iter().any(|n| n.contains("1/5")), "{notes:?}");
    assert!(!eliminate_booleans(&single, 0.19).unwrap().notes.iter().any(|n| n.contains("1/5")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fanout_reduction_caps_fan_out(seed in any::<u64>(), gates in 1usize..200, e in 0usize..4) {
        let mut r = rng(seed);
        let cyclic = r.gen_bool(0.5);
        let c = random_circuit::<f64, _>(&mut r, gates, 4, cyclic);
        let out = to_fanout2(&c, FANOUT_EPS[e]).unwrap();
        prop_assert!(max_fan_out(&out.circuit) <= 2);
        check_bookkeeping(&c, &out)?;
    }

    #[test]
    fn fanout_solutions_restrict_to_strong_solutions(seed in any::<u64>(), gates in 1usize..50, e in 0usize..4) {
        let mut r = rng(seed);
        let eps = FANOUT_EPS[e];
        let c = random_circuit::<f64, _>(&mut r, gates, 3, false);
        let out = to_fanout2(&c, eps).unwrap();
        let inner = SolutionConcept::Strong { eps: out.eps_out.unwrap() };
        let x = adversarial_solution(&mut r, &out.circuit, &inner).unwrap().unwrap();
        prop_assert!(verify(&out.circuit, &x, &inner).unwrap().is_solution);
        let restricted = x.restrict(c.nodes());
        let report = verify(&c, &restricted, &SolutionConcept::Strong { eps }).unwrap();
        prop_assert!(report.is_solution, "{:?}", report.violations().next());
    }

    #[test]
    fn boolean_elimination_leaves_no_boolean_gates(seed in any::<u64>(), gates in 0usize..60, eps in 0.001f64..0.333) {
        let mut r = rng(seed);
        let cyclic = r.gen_bool(0.5);
        let c = random_circuit::<f64, _>(&mut r, gates, 3, cyclic);
        let out = eliminate_booleans(&c, eps).unwrap();
        prop_assert!(out.circuit.gates().iter().all(|g| !g.kind().is_boolean()));
        prop_assert_eq!(out.eps_out, Some(eps / 2.0));
        check_bookkeeping(&c, &out)?;
    }

    #[test]
    fn boolean_elimination_solutions_restrict_to_strong_solutions(
        seed in any::<u64>(),
        gates in 1usize..40,
        eps in 0.01f64..BOOLEAN_ELIMINATION_SOUND_LIMIT,
        adversarial in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let c = random_circuit::<f64, _>(&mut r, gates, 3, false);
        let out = eliminate_booleans(&c, eps).unwrap();
        let inner = SolutionConcept::Strong { eps: eps / 2.0 };
        let x = if adversarial {
            adversarial_solution(&mut r, &out.circuit, &inner)
        } else {
            random_solution(&mut r, &out.circuit, &inner)
        };
        let x = x.unwrap().unwrap();
        let report = verify(&c, &x.restrict(c.nodes()), &SolutionConcept::Strong { eps }).unwrap();
        prop_assert!(report.is_solution, "{:?}", report.violations().next());
    }

    #[test]
    fn normalized_solutions_hold_for_larger_tolerances(seed in any::<u64>(), gates in 1usize..40) {
        let mut r = rng(seed);
        let eps = 0.05;
        let c = random_regular_circuit::<f64, _>(&mut r, gates, 3);
        prop_assert!(is_boolean_regular(&c).regular);
        let concept = SolutionConcept::Weak { eps };
        let x = random_solution(&mut r, &c, &concept).unwrap().unwrap();
        let y = normalize(&c, &x, eps).unwrap();
        for i in 0..20 {
            let eps2 = eps + (0.25 - eps) * f64::from(i) / 19.0;
            let report = verify(&c, &y, &SolutionConcept::Weak { eps: eps2 }).unwrap();
            prop_assert!(report.is_solution, "eps' = {eps2}: {:?}", report.violations().next());
        }
    }

    #[test]
    fn regularization_preserves_verdicts_on_boolean_values(
        seed in any::<u64>(),
        gates in 1usize..30,
        eps in 0.01f64..0.2,
        strong in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let cyclic = r.gen_bool(0.5);
        let c = random_circuit::<f64, _>(&mut r, gates, 3, cyclic);
        let out = regularize(&c).unwrap();
        let concept = if strong { SolutionConcept::Strong { eps } } else { SolutionConcept::Weak { eps } };
        // Values within eps of 0 or 1 count as TRUE/FALSE under both families.
        let mut x: Assignment<f64> = c
            .nodes()
            .iter()
            .map(|n| {
                let t = r.gen::<f64>() * eps;
                (n.clone(), if r.gen_bool(0.5) { t } else { 1.0 - t })
            })
            .collect();
        let before = verify(&c, &x, &concept).unwrap().is_solution;
        // Interior nodes of each double negation hold 1 - x[input], then x[input] again.
        for g in out.circuit.gates() {
            if out.fresh_nodes.contains(&g.output) {
                prop_assert_eq!(g.kind(), GateKind::Not);
                let v = x.get(&g.inputs[0]).unwrap();
                x.set(g.output.clone(), 1.0 - v);
            }
        }
        prop_assert_eq!(verify(&out.circuit, &x, &concept).unwrap().is_solution, before);
        if out.unrepaired.is_empty() {
            prop_assert!(is_boolean_regular(&out.circuit).regular);
        }
    }
}
