//! Desk-scale search for approximate solutions.
//!
//! Damped fixed-point iteration on the continuous circuit map from several
//! seeded starts, then a grid search over a smallest set of nodes whose
//! removal makes the circuit acyclic. Every candidate is re-verified, so a
//! returned assignment is always a solution; failure only means "not found".

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::continuous::{circuit_to_function, gate_response, ContinuousCircuitMap};
use super::AnalysisError;
use crate::circuit::{validate, Circuit};
use crate::concepts::{verify, Assignment, SolutionConcept};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct SolveBudget {
    pub iterations: usize,
    pub restarts: usize,
    /// Largest number of grid points visited by the fallback search.
    pub grid_points: usize,
    /// Largest node count for which the grid fallback runs.
    pub grid_max_nodes: usize,
    pub seed: u64,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget { iterations: 10_000, restarts: 64, grid_points: 2_000_000, grid_max_nodes: 6, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Iteration { restart: usize, steps: usize },
    Grid { point: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome<S> {
    Found {
        assignment: Assignment<S>,
        method: SolveMethod,
    },
    /// The budget ran out. Says nothing about existence.
    NotFound,
}

impl<S> SolveOutcome<S> {
    pub fn assignment(&self) -> Option<&Assignment<S>> {
        match self {
            SolveOutcome::Found { assignment, .. } => Some(assignment),
            SolveOutcome::NotFound => None,
        }
    }
}

const DAMPING: f64 = 0.5;
const MIN_DAMPING: f64 = 1.0 / 1048576.0;
const GRID_PITCH_FLOOR: f64 = 1e-3;

fn iterate<S: Scalar>(f: &ContinuousCircuitMap<S>, start: Vec<S>, steps: usize) -> Option<(Vec<S>, usize)> {
    let cc = f.compiled();
    let concept = f.concept();
    let upper = concept.upper();
    let mut x = start;
    let mut y = vec![S::zero(); x.len()];
    let mut alpha = S::lit(DAMPING);
    let mut prev = S::infinity();
    for step in 0..steps {
        if cc.is_solution(&x, concept) {
            return Some((x, step));
        }
        f.eval_into(&x, &mut y);
        if cc.is_solution(&y, concept) {
            return Some((y, step));
        }
        let residual = x.iter().zip(&y).map(|(a, b)| (*a - *b).abs()).fold(S::zero(), S::max);
        if residual > prev && alpha > S::lit(MIN_DAMPING) {
            alpha = alpha * S::half();
        }
        prev = residual;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = (*xi + alpha * (*yi - *xi)).max(S::zero()).min(upper);
        }
    }
    None
}

/// Smallest set of gate-output nodes whose values, once fixed, leave an acyclic remainder.
fn feedback_nodes<S: Scalar>(f: &ContinuousCircuitMap<S>) -> Vec<usize> {
    let cc = f.compiled();
    let free = cc.free_nodes();
    let candidates: Vec<usize> = (0..cc.len()).filter(|i| !free.contains(i)).collect();
    let mut fixed = vec![false; cc.len()];
    for size in 0..=candidates.len() {
        let mut chosen: Vec<usize> = (0..size).collect();
        loop {
            fixed.iter_mut().for_each(|b| *b = false);
            for &c in &chosen {
                fixed[candidates[c]] = true;
            }
            if cc.dependency_order(&fixed).is_some() {
                return chosen.iter().map(|&c| candidates[c]).collect();
            }
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 && chosen[i - 1] == candidates.len() - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            chosen[i - 1] += 1;
            for j in i..size {
                chosen[j] = chosen[j - 1] + 1;
            }
        }
    }
    candidates
}

fn grid_search<S: Scalar>(f: &ContinuousCircuitMap<S>, budget: &SolveBudget) -> Option<(Vec<S>, usize)> {
    let cc = f.compiled();
    let concept = f.concept();
    let upper = concept.upper();
    let fvs = feedback_nodes(f);
    let mut fixed = vec![false; cc.len()];
    for &i in &fvs {
        fixed[i] = true;
    }
    let order = cc.dependency_order(&fixed)?;
    let pitch = (concept.eps() / (S::lit(2.0) * f.lipschitz_bound)).max(S::lit(GRID_PITCH_FLOOR));
    let mut per_axis = (upper / pitch).ceil().to_usize().unwrap_or(1) + 1;
    let k = fvs.len() as u32;
    while per_axis > 2 && per_axis.checked_pow(k).is_none_or(|n| n > budget.grid_points) {
        per_axis = (per_axis * 3 / 4).max(2);
    }
    let total = per_axis.checked_pow(k)?.min(budget.grid_points.max(1));
    let free = cc.free_nodes();
    let point = |idx: usize| -> Option<Vec<S>> {
        let mut x = vec![S::zero(); cc.len()];
        for &i in &free {
            x[i] = upper * S::half();
        }
        let mut r = idx;
        for &i in &fvs {
            x[i] = upper * S::int((r % per_axis) as u64) / S::int((per_axis - 1).max(1) as u64);
            r /= per_axis;
        }
        for &gi in &order {
            let g = &cc.gates[gi];
            let inputs = g.input_values(&x);
            x[g.output] = gate_response(&g.gate_type, &inputs[..g.inputs().len()], concept);
        }
        cc.is_solution(&x, concept).then_some(x)
    };
    (0..total).into_par_iter().find_map_first(|i| point(i).map(|x| (x, i)))
}

/// Searches for an assignment verifying under `concept`.
pub fn solve<S: Scalar>(
    circuit: &Circuit<S>,
    concept: &SolutionConcept<S>,
    budget: &SolveBudget,
) -> Result<SolveOutcome<S>, AnalysisError> {
    concept.validate()?;
    let report = validate(circuit);
    if !report.ok {
        return Err(AnalysisError::InvalidCircuit(report.defects[0].to_string()));
    }
    let f = circuit_to_function(circuit, concept);
    let upper = concept.upper();
    let n = f.dimension();
    let found = (0..budget.restarts).into_par_iter().find_map_first(|r| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(r as u64);
        let start: Vec<S> = if r == 0 {
            vec![upper * S::half(); n]
        } else {
            (0..n).map(|_| upper * S::lit(rng.gen::<f64>())).collect()
        };
        iterate(&f, start, budget.iterations).map(|(x, steps)| (x, SolveMethod::Iteration { restart: r, steps }))
    });
    let found = found.or_else(|| {
        (n <= budget.grid_max_nodes)
            .then(|| grid_search(&f, budget))
            .flatten()
            .map(|(x, point)| (x, SolveMethod::Grid { point }))
    });
    let Some((x, method)) = found else {
        return Ok(SolveOutcome::NotFound);
    };
    let assignment = f.compiled().to_assignment(&x);
    // Independent re-check through the reporting path.
    if !verify(circuit, &assignment, concept)?.is_solution {
        return Ok(SolveOutcome::NotFound);
    }
    Ok(SolveOutcome::Found { assignment, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateType;

    #[test]
    fn const_solution() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Const(0.3), Vec::<&str>::new(), "v");
        let out = solve(&c, &SolutionConcept::Strong { eps: 0.01 }, &SolveBudget::default()).unwrap();
        let v = out.assignment().unwrap().value("v").unwrap();
        assert!((v - 0.3).abs() <= 0.01);
    }

    #[test]
    fn not_loop_lands_near_half() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["v"], "v");
        let out = solve(&c, &SolutionConcept::Strong { eps: 0.05 }, &SolveBudget::default()).unwrap();
        let v = out.assignment().unwrap().value("v").unwrap();
        assert!((0.45..=0.55).contains(&v), "{v}");
    }

    #[test]
    fn prop1_circuit_weak() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["a"], "v");
        let concept = SolutionConcept::Weak { eps: 0.1 };
        let out = solve(&c, &concept, &SolveBudget::default()).unwrap();
        assert!(verify(&c, out.assignment().unwrap(), &concept).unwrap().is_solution);
    }

    #[test]
    fn grid_fallback_handles_cycles() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["v"], "w");
        c.push(GateType::Copy, ["w"], "v");
        let concept = SolutionConcept::Strong { eps: 0.05 };
        let budget = SolveBudget { restarts: 0, ..SolveBudget::default() };
        let out = solve(&c, &concept, &budget).unwrap();
        assert!(matches!(out, SolveOutcome::Found { method: SolveMethod::Grid { .. }, .. }));
    }

    #[test]
    fn same_seed_same_answer() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["v"], "w");
        c.push(GateType::Add, ["w", "v"], "v");
        let concept = SolutionConcept::Strong { eps: 0.1 };
        let budget = SolveBudget { seed: 7, ..SolveBudget::default() };
        assert_eq!(solve(&c, &concept, &budget).unwrap(), solve(&c, &concept, &budget).unwrap());
    }
}
