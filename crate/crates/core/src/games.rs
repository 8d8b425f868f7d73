//! Binary graphical games, the Boolean game gadgets and well-supported equilibria.

use std::fmt;

use indexmap::IndexMap;
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::unit_grid;
use crate::circuit::{GateType, NodeId};
use crate::concepts::{check_row, Assignment, Clause, SolutionConcept};
use crate::scalar::Scalar;

pub type PlayerId = NodeId;
/// Probability of action 1 for each player.
pub type StrategyProfile<S> = Assignment<S>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("unknown player `{0}`")]
    UnknownPlayer(PlayerId),
    #[error("player `{0}` has no utility table")]
    NoUtility(PlayerId),
    #[error("profile has no probability for `{0}`")]
    MissingProbability(PlayerId),
    #[error("probability {value} of `{player}` lies outside [0, 1]")]
    BadProbability { player: PlayerId, value: f64 },
    #[error("utility table of `{player}` has {got} rows, expected {expected}")]
    TableSize { player: PlayerId, got: usize, expected: usize },
    #[error("{0} gadget needs a second input player")]
    MissingInput(GadgetKind),
    #[error("gadget players must be distinct")]
    RepeatedPlayer,
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Payoffs of one player. Row `mask` holds `[u(0), u(1)]` where bit `i`
/// of `mask` is the action of the `i`-th neighbor.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityTable<S> {
    pub rows: Vec<[S; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Player<S> {
    pub neighbors: Vec<PlayerId>,
    /// `None` for players whose incentives lie outside the fragment.
    pub utility: Option<UtilityTable<S>>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BinaryGraphicalGame<S> {
    players: IndexMap<PlayerId, Player<S>>,
}

impl<S: Scalar> BinaryGraphicalGame<S> {
    pub fn new() -> Self {
        BinaryGraphicalGame { players: IndexMap::new() }
    }

    /// Adds a player without incentives if not already present.
    pub fn add_player(&mut self, id: impl Into<PlayerId>) {
        self.players.entry(id.into()).or_insert(Player { neighbors: Vec::new(), utility: None });
    }

    /// Gives `id` the utility `u(own, neighbor_actions)`; neighbors are added as players.
    pub fn set_utility(&mut self, id: impl Into<PlayerId>, neighbors: Vec<PlayerId>, u: impl Fn(bool, &[bool]) -> S) {
        let rows = (0..1usize << neighbors.len())
            .map(|mask| {
                let acts: Vec<bool> = (0..neighbors.len()).map(|i| mask >> i & 1 == 1).collect();
                [u(false, &acts), u(true, &acts)]
            })
            .collect();
        for n in &neighbors {
            self.add_player(n.clone());
        }
        self.players.insert(id.into(), Player { neighbors, utility: Some(UtilityTable { rows }) });
    }

    pub fn player(&self, id: &PlayerId) -> Option<&Player<S>> {
        self.players.get(id)
    }

    pub fn players(&self) -> impl Iterator<Item = (&PlayerId, &Player<S>)> {
        self.players.iter()
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    /// Union of two fragments; utilities in `other` win on conflict.
    pub fn merge(&mut self, other: BinaryGraphicalGame<S>) {
        for (id, p) in other.players {
            match (&p.utility, self.players.get(&id)) {
                (None, Some(_)) => {}
                _ => {
                    self.players.insert(id, p);
                }
            }
        }
    }
}

fn probability<S: Scalar>(profile: &StrategyProfile<S>, id: &PlayerId) -> Result<S, GameError> {
    let p = profile.get(id).ok_or_else(|| GameError::MissingProbability(id.clone()))?;
    if !(p >= S::zero() && p <= S::one()) {
        return Err(GameError::BadProbability { player: id.clone(), value: p.as_f64() });
    }
    Ok(p)
}

/// Expected payoffs of playing 0 and 1 against the neighbors' independent mixed strategies.
pub fn expected_utilities<S: Scalar>(
    game: &BinaryGraphicalGame<S>,
    profile: &StrategyProfile<S>,
    player: &PlayerId,
) -> Result<(S, S), GameError> {
    let p = game.player(player).ok_or_else(|| GameError::UnknownPlayer(player.clone()))?;
    let table = p.utility.as_ref().ok_or_else(|| GameError::NoUtility(player.clone()))?;
    let expected = 1usize << p.neighbors.len();
    if table.rows.len() != expected {
        return Err(GameError::TableSize { player: player.clone(), got: table.rows.len(), expected });
    }
    let probs = p.neighbors.iter().map(|n| probability(profile, n)).collect::<Result<Vec<_>, _>>()?;
    let mut u = (S::zero(), S::zero());
    for (mask, row) in table.rows.iter().enumerate() {
        let w = probs
            .iter()
            .enumerate()
            .fold(S::one(), |acc, (i, &q)| acc * if mask >> i & 1 == 1 { q } else { S::one() - q });
        u.0 = u.0 + w * row[0];
        u.1 = u.1 + w * row[1];
    }
    Ok(u)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WsneViolation<S> {
    pub player: PlayerId,
    /// The action played with positive probability that is not eps-optimal.
    pub action: u8,
    /// How far that action falls behind the best response.
    pub gap: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WsneReport<S> {
    pub ok: bool,
    pub violations: Vec<WsneViolation<S>>,
}

/// Checks the eps-well-supported condition for every player with a utility table.
pub fn is_wsne<S: Scalar>(
    game: &BinaryGraphicalGame<S>,
    profile: &StrategyProfile<S>,
    eps: S,
) -> Result<WsneReport<S>, GameError> {
    let mut violations = Vec::new();
    for (id, p) in game.players() {
        if p.utility.is_none() {
            continue;
        }
        let q = probability(profile, id)?;
        let (u0, u1) = expected_utilities(game, profile, id)?;
        if q > S::zero() && u1 < u0 - eps {
            violations.push(WsneViolation { player: id.clone(), action: 1, gap: u0 - u1 });
        }
        if q < S::one() && u0 < u1 - eps {
            violations.push(WsneViolation { player: id.clone(), action: 0, gap: u1 - u0 });
        }
    }
    Ok(WsneReport { ok: violations.is_empty(), violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GadgetKind {
    Not,
    And,
    Or,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 3] = [GadgetKind::Not, GadgetKind::And, GadgetKind::Or];

    pub fn arity(self) -> usize {
        if self == GadgetKind::Not {
            1
        } else {
            2
        }
    }

    pub fn gate_type<S: Scalar>(self) -> GateType<S> {
        match self {
            GadgetKind::Not => GateType::Not,
            GadgetKind::And => GateType::And,
            GadgetKind::Or => GateType::Or,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Not => "not",
            GadgetKind::And => "and",
            GadgetKind::Or => "or",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        GadgetKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Game fragment in which only `v` has incentives, read from `a` (and `b`).
///
/// And/Or: `v` gets 1/2 for playing 0, and for playing 1 gets 1 if the
/// inputs' actions satisfy the gate, 0 otherwise. Not: `v` gets 1 for
/// playing the opposite of `a` and 0 otherwise.
pub fn gadget<S: Scalar>(
    kind: GadgetKind,
    a: &PlayerId,
    b: Option<&PlayerId>,
    v: &PlayerId,
) -> Result<BinaryGraphicalGame<S>, GameError> {
    let mut game = BinaryGraphicalGame::new();
    let half = S::half();
    let bit = |x: bool| if x { S::one() } else { S::zero() };
    match kind {
        GadgetKind::Not => {
            if a == v {
                return Err(GameError::RepeatedPlayer);
            }
            game.set_utility(v.clone(), vec![a.clone()], move |own, n| bit(own != n[0]));
        }
        GadgetKind::And | GadgetKind::Or => {
            let b = b.ok_or(GameError::MissingInput(kind))?;
            if a == b || a == v || b == v {
                return Err(GameError::RepeatedPlayer);
            }
            let and = kind == GadgetKind::And;
            game.set_utility(v.clone(), vec![a.clone(), b.clone()], move |own, n| {
                if !own {
                    half
                } else {
                    bit(if and { n[0] && n[1] } else { n[0] || n[1] })
                }
            });
        }
    }
    Ok(game)
}

/// Set of `p[v]` values consistent with an eps-WSNE given `v`'s expected payoffs.
pub fn admissible_probability<S: Scalar>(u0: S, u1: S, eps: S) -> (S, S) {
    if u0 > u1 + eps {
        (S::zero(), S::zero())
    } else if u1 > u0 + eps {
        (S::one(), S::one())
    } else {
        (S::zero(), S::one())
    }
}

/// A grid point where some admissible `p[v]` breaks the target row.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure<S> {
    pub kind: GadgetKind,
    pub inputs: Vec<S>,
    pub pv: S,
    pub clause: Clause<S>,
}

/// One grid row of a gadget sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<S> {
    pub inputs: Vec<S>,
    pub u0: S,
    pub u1: S,
    pub pv: (S, S),
    pub row_ok: bool,
}

fn gadget_players() -> (PlayerId, PlayerId, PlayerId) {
    ("a".into(), "b".into(), "v".into())
}

fn sweep_point<S: Scalar>(
    kind: GadgetKind,
    game: &BinaryGraphicalGame<S>,
    inputs: &[S],
    wsne_eps: S,
    row: &SolutionConcept<S>,
) -> (SweepRow<S>, Option<SweepFailure<S>>) {
    let (a, b, v) = gadget_players();
    let mut profile = StrategyProfile::new();
    profile.set(a, inputs[0]);
    if kind.arity() == 2 {
        profile.set(b, inputs[1]);
    }
    let (u0, u1) = expected_utilities(game, &profile, &v).expect("gadget profile is complete");
    let (lo, hi) = admissible_probability(u0, u1, wsne_eps);
    let gt = kind.gate_type();
    let mut failure = None;
    for pv in [lo, hi] {
        let r = check_row(&gt, inputs, pv, row);
        if !r.ok() && failure.is_none() {
            failure = Some(SweepFailure { kind, inputs: inputs.to_vec(), pv, clause: r.clause });
        }
    }
    let row = SweepRow { inputs: inputs.to_vec(), u0, u1, pv: (lo, hi), row_ok: failure.is_none() };
    (row, failure)
}

fn grid_points<S: Scalar>(kind: GadgetKind, pitch: S) -> Vec<Vec<S>> {
    let g = unit_grid(pitch);
    match kind.arity() {
        1 => g.iter().map(|&x| vec![x]).collect(),
        _ => g.iter().flat_map(|&x| g.iter().map(move |&y| vec![x, y])).collect(),
    }
}

/// Every grid point of a gadget with payoffs, admissible `p[v]` and the
/// verdict of the ε^β row. Parameters are not range-checked.
pub fn gadget_sweep<S: Scalar>(kind: GadgetKind, eps: S, beta: S, pitch: S) -> Vec<SweepRow<S>> {
    let (a, b, v) = gadget_players();
    let game = gadget(kind, &a, Some(&b), &v).expect("distinct players");
    let row = SolutionConcept::Beta { eps, beta };
    grid_points(kind, pitch).par_iter().map(|p| sweep_point(kind, &game, p, eps, &row).0).collect()
}

/// First failing grid point in sweep order, if any. Parameters are not range-checked.
pub fn first_sweep_failure<S: Scalar>(kind: GadgetKind, eps: S, beta: S, pitch: S) -> Option<SweepFailure<S>> {
    let (a, b, v) = gadget_players();
    let game = gadget(kind, &a, Some(&b), &v).expect("distinct players");
    let row = SolutionConcept::Beta { eps, beta };
    grid_points(kind, pitch).par_iter().find_map_first(|p| sweep_point(kind, &game, p, eps, &row).1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prop6Report<S> {
    /// Grid points checked per gadget.
    pub points: Vec<(GadgetKind, usize)>,
    pub failures: Vec<SweepFailure<S>>,
}

/// Sweeps all three gadgets: for every input grid point, every `p[v]` an
/// eps-WSNE allows must satisfy the ε^β row with parameters `(eps, beta)`.
pub fn check_prop6<S: Scalar>(beta: S, eps: S, pitch: S) -> Result<Prop6Report<S>, GameError> {
    let quarter = S::lit(0.25);
    if !(beta > quarter && beta < S::half()) {
        return Err(GameError::Precondition(format!("beta must lie in (1/4, 1/2), got {beta}")));
    }
    // beta - 1/4 is rounded; allow a few ulps so decimal inputs like (0.3, 0.05) qualify.
    if !(eps > S::zero() && eps <= beta - quarter + S::epsilon() * S::lit(4.0)) {
        return Err(GameError::Precondition(format!("eps must lie in (0, beta - 1/4], got {eps}")));
    }
    if !(pitch > S::zero()) {
        return Err(GameError::Precondition("pitch must be positive".into()));
    }
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let (a, b, v) = gadget_players();
    let row = SolutionConcept::Beta { eps, beta };
    for kind in GadgetKind::ALL {
        let game = gadget(kind, &a, Some(&b), &v)?;
        let grid = grid_points(kind, pitch);
        points.push((kind, grid.len()));
        let found: Vec<SweepFailure<S>> =
            grid.par_iter().filter_map(|p| sweep_point(kind, &game, p, eps, &row).1).collect();
        failures.extend(found);
    }
    Ok(Prop6Report { points, failures })
}

/// Below this tolerance the G_∧ gadget admits `p[v] = 0` against inputs
/// `1/2 + 2 eps` while the WSNE tolerance is `eps_prime`: `1/24 + eps_prime/6`.
pub fn prop5_eps_bound<S: Scalar>(eps_prime: S) -> S {
    S::one() / S::int(24) + eps_prime / S::int(6)
}

/// Exact root of `(1/2 + 2 eps)^2 = 1/2 + eps_prime`: `(sqrt(2 + 4 eps_prime) - 1)/4`.
/// The G_∧ gadget admits `p[v] = 0` at inputs `1/2 + 2 eps` exactly when eps is at most this.
pub fn prop5_exact_threshold<S: Scalar>(eps_prime: S) -> S {
    ((S::lit(2.0) + S::lit(4.0) * eps_prime).sqrt() - S::one()) / S::lit(4.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prop5Check<S> {
    pub eps: S,
    pub input: S,
    pub u0: S,
    pub u1: S,
    pub wsne_ok: bool,
    pub strong_row_ok: bool,
    pub strong_clause: Clause<S>,
}

/// The G_∧ profile `p[a] = p[b] = 1/2 + 2 eps`, `p[v] = 0`, checked as an
/// eps-WSNE and against the strong eps And row.
pub fn prop5_profile<S: Scalar>(eps: S) -> Prop5Check<S> {
    let (a, b, v) = gadget_players();
    let game = gadget(GadgetKind::And, &a, Some(&b), &v).expect("distinct players");
    let input = S::half() + eps + eps;
    let profile: StrategyProfile<S> = [(a, input), (b, input), (v.clone(), S::zero())].into_iter().collect();
    let (u0, u1) = expected_utilities(&game, &profile, &v).expect("complete profile");
    let wsne_ok = is_wsne(&game, &profile, eps).expect("complete profile").ok;
    let r = check_row(&GateType::And, &[input, input], S::zero(), &SolutionConcept::Strong { eps });
    Prop5Check { eps, input, u0, u1, wsne_ok, strong_row_ok: r.ok(), strong_clause: r.clause }
}

pub const BETA_THRESHOLD_CANDIDATES: [(&str, f64); 2] =
    [("(sqrt2-1)/4", 0.103_553_390_593_273_76), ("(sqrt2-1)/2", 0.207_106_781_186_547_52)];
/// How close the empirical threshold must be to a candidate to count as a match.
pub const BETA_MATCH_TOLERANCE: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct BetaThreshold<S> {
    pub kind: GadgetKind,
    pub eps: S,
    /// Empirical threshold: the sweep fails at `bracket.0` (or it is 0) and passes at `bracket.1`.
    pub beta_star: S,
    pub bracket: (S, S),
    pub pitch: S,
    /// Name of the candidate within [`BETA_MATCH_TOLERANCE`], if any.
    pub matches: Option<&'static str>,
}

const BETA_SCAN_STEPS: usize = 64;

/// Bisection on β of "the gadget sweep passes" with the parameter range relaxed to `0 < β < 1/2`.
///
/// A coarse scan first checks that the predicate switches from failing to
/// passing exactly once; anything else is an error carrying the bracket.
pub fn find_beta_threshold<S: Scalar>(kind: GadgetKind, eps: S, tol: S) -> Result<BetaThreshold<S>, GameError> {
    if !(eps > S::zero() && eps <= S::lit(1e-3)) {
        return Err(GameError::Precondition(format!("eps must lie in (0, 1e-3], got {eps}")));
    }
    if !(tol >= S::lit(1e-4)) {
        return Err(GameError::Precondition(format!("tol must be at least 1e-4, got {tol}")));
    }
    let pitch = (tol * S::half()).max(S::lit(2.5e-4));
    let passes = |beta: S| first_sweep_failure(kind, eps, beta, pitch).is_none();
    let step = S::half() / S::int(BETA_SCAN_STEPS as u64);
    let scan: Vec<(S, bool)> = (1..BETA_SCAN_STEPS).map(|i| S::int(i as u64) * step).map(|b| (b, passes(b))).collect();
    let first_pass = scan.iter().position(|&(_, ok)| ok).ok_or_else(|| {
        GameError::Precondition(format!("sweep fails for every beta up to {}", scan.last().unwrap().0))
    })?;
    if let Some(bad) = scan[first_pass..].iter().find(|&&(_, ok)| !ok) {
        return Err(GameError::Precondition(format!(
            "predicate is not monotone in beta: passes at {} but fails at {}",
            scan[first_pass].0, bad.0
        )));
    }
    let mut lo = if first_pass == 0 { S::zero() } else { scan[first_pass - 1].0 };
    let mut hi = scan[first_pass].0;
    while hi - lo > tol {
        let mid = (lo + hi) * S::half();
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let beta_star = (lo + hi) * S::half();
    let matches = BETA_THRESHOLD_CANDIDATES
        .iter()
        .find(|(_, c)| (beta_star.as_f64() - c).abs() <= BETA_MATCH_TOLERANCE)
        .map(|(name, _)| *name);
    Ok(BetaThreshold { kind, eps, beta_star, bracket: (lo, hi), pitch, matches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_game() -> BinaryGraphicalGame<f64> {
        gadget(GadgetKind::And, &"a".into(), Some(&"b".into()), &"v".into()).unwrap()
    }

    fn profile(pa: f64, pb: f64, pv: f64) -> StrategyProfile<f64> {
        [("a", pa), ("b", pb), ("v", pv)].into_iter().collect()
    }

    #[test]
    fn and_utilities() {
        let g = and_game();
        assert_eq!(expected_utilities(&g, &profile(1.0, 1.0, 0.0), &"v".into()).unwrap(), (0.5, 1.0));
        let (u0, u1) = expected_utilities(&g, &profile(0.52, 0.52, 0.0), &"v".into()).unwrap();
        assert_eq!(u0, 0.5);
        assert!((u1 - 0.2704).abs() < 1e-12);
    }

    #[test]
    fn constant_player() {
        let mut g = BinaryGraphicalGame::<f64>::new();
        g.set_utility("p", vec![], |own, _| if own { 0.7 } else { 0.2 });
        let x: StrategyProfile<f64> = [("p", 0.5)].into_iter().collect();
        assert_eq!(expected_utilities(&g, &x, &"p".into()).unwrap(), (0.2, 0.7));
    }

    #[test]
    fn wsne_examples() {
        let g = and_game();
        assert!(is_wsne(&g, &profile(1.0, 1.0, 1.0), 0.0).unwrap().ok);
        let e = 1.0 / 24.0;
        assert!(is_wsne(&g, &profile(0.5 + 2.0 * e, 0.5 + 2.0 * e, 0.0), e).unwrap().ok);
        let r = is_wsne(&g, &profile(1.0, 1.0, 0.5), 0.1).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations[0].gap, 0.5);
    }

    #[test]
    fn gadget_tables() {
        let or = gadget::<f64>(GadgetKind::Or, &"a".into(), Some(&"b".into()), &"v".into()).unwrap();
        let (u0, u1) = expected_utilities(&or, &profile(0.3, 0.3, 0.0), &"v".into()).unwrap();
        assert!((u0 - 0.5).abs() < 1e-12);
        assert!((u1 - (1.0 - 0.49)).abs() < 1e-12);
        let not = gadget::<f64>(GadgetKind::Not, &"a".into(), None, &"v".into()).unwrap();
        let (u0, u1) = expected_utilities(&not, &profile(0.0, 0.0, 0.0), &"v".into()).unwrap();
        assert!(u1 > u0);
        assert!(gadget::<f64>(GadgetKind::And, &"a".into(), None, &"v".into()).is_err());
    }

    #[test]
    fn prop5_values() {
        assert_eq!(prop5_eps_bound(0.0), 1.0 / 24.0);
        assert!((prop5_eps_bound(0.06_f64) - (1.0 / 24.0 + 0.01)).abs() < 1e-15);
        assert!(prop5_eps_bound(0.0) <= prop5_exact_threshold(0.0));
        let c = prop5_profile(1.0 / 24.0);
        assert!(c.wsne_ok && !c.strong_row_ok);
    }

    #[test]
    fn prop6_preconditions() {
        assert!(check_prop6(0.3, 0.06, 0.01).is_err());
        assert!(check_prop6(0.2, 0.01, 0.01).is_err());
        let r = check_prop6(0.3, 0.05, 0.01).unwrap();
        assert!(r.failures.is_empty(), "{:?}", r.failures.first());
    }

    #[test]
    fn beta_threshold_guards() {
        assert!(find_beta_threshold::<f64>(GadgetKind::And, 0.1, 1e-5).is_err());
    }
}
