//! Named example circuits with assignments and expected verdicts.
//!
//! Each fixture is a set of text files (`.gc`, `.asn`) plus a manifest with
//! one check per line, for example
//!
//! ```text
//! verify prop1.gc prop1.asn weak eps=0.1 expect=pass
//! discrepancy issue4.gc issue4.asn eps=1/100 expect=fail
//! prop5 prop5.asn eps=1/24 wsne=pass strong=fail
//! ```

use std::fmt;

use thiserror::Error;

use crate::analysis::{inset, sample_forward};
use crate::circuit::{Circuit, GateKind, GateType, NodeId};
use crate::concepts::{check_row, verify, Assignment, ConceptError, SolutionConcept};
use crate::dsl::{parse_assignment, parse_circuit, parse_number, serialize_assignment, serialize_circuit, ParseError};
use crate::games::{gadget, is_wsne, GadgetKind, GameError};
use crate::scalar::format_number;
use crate::transforms::to_fanout2;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("missing file `{0}`")]
    MissingFile(String),
    #[error("{file}:{error}")]
    Parse { file: String, error: ParseError },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error(transparent)]
    Concept(#[from] ConceptError),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Pass,
    Fail,
}

impl Expect {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Expect::Pass
        } else {
            Expect::Fail
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "pass" => Some(Expect::Pass),
            "fail" => Some(Expect::Fail),
            _ => None,
        }
    }
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expect::Pass => "pass",
            Expect::Fail => "fail",
        })
    }
}

/// One manifest line.
#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    /// `verify` of an assignment against a circuit.
    Verify { circuit: String, assignment: String, concept: SolutionConcept<f64>, expect: Expect },
    /// Pairwise Scale-gate consistency; `fail` means some pair is inconsistent.
    Discrepancy { circuit: String, assignment: String, eps: f64, expect: Expect },
    /// The And gadget profile in `profile` against eps-WSNE and the strong And row.
    Prop5 { profile: String, eps: f64, wsne: Expect, strong: Expect },
}

/// `weak eps=0.1`, `beta eps=0.05 beta=0.3`, `truncated eps=0.01 K=4`.
pub fn concept_spec(concept: &SolutionConcept<f64>) -> String {
    match *concept {
        SolutionConcept::Weak { eps } => format!("weak eps={}", format_number(eps)),
        SolutionConcept::Strong { eps } => format!("strong eps={}", format_number(eps)),
        SolutionConcept::Beta { eps, beta } => {
            format!("beta eps={} beta={}", format_number(eps), format_number(beta))
        }
        SolutionConcept::TruncatedStrong { eps, k } => format!("truncated eps={} K={k}", format_number(eps)),
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Verify { circuit, assignment, concept, expect } => {
                write!(f, "verify {circuit} {assignment} {} expect={expect}", concept_spec(concept))
            }
            Check::Discrepancy { circuit, assignment, eps, expect } => {
                write!(f, "discrepancy {circuit} {assignment} eps={} expect={expect}", format_number(*eps))
            }
            Check::Prop5 { profile, eps, wsne, strong } => {
                write!(f, "prop5 {profile} eps={} wsne={wsne} strong={strong}", format_number(*eps))
            }
        }
    }
}

/// Parses manifest text; blank lines and `#` comments are skipped.
pub fn parse_manifest(text: &str) -> Result<Vec<Check>, FixtureError> {
    let mut checks = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| FixtureError::Manifest { line: i + 1, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        let mut positional = Vec::new();
        let mut keys = std::collections::BTreeMap::new();
        for w in &words[1..] {
            match w.split_once('=') {
                Some((k, v)) => {
                    keys.insert(k, v);
                }
                None => positional.push(w.to_string()),
            }
        }
        let num = |k: &str| -> Result<f64, FixtureError> {
            let v = keys.get(k).ok_or_else(|| err(format!("missing `{k}=`")))?;
            parse_number::<f64>(v).map_err(err)
        };
        let expect = |k: &str| -> Result<Expect, FixtureError> {
            let v = keys.get(k).ok_or_else(|| err(format!("missing `{k}=`")))?;
            Expect::parse(v).ok_or_else(|| err(format!("`{k}` must be pass or fail, got `{v}`")))
        };
        let arity = |n: usize| -> Result<(), FixtureError> {
            if positional.len() == n {
                Ok(())
            } else {
                Err(err(format!("`{}` takes {n} file or concept words, got {}", words[0], positional.len())))
            }
        };
        let check = match words[0] {
            "verify" => {
                arity(3)?;
                let eps = num("eps")?;
                let concept = match positional[2].as_str() {
                    "weak" => SolutionConcept::Weak { eps },
                    "strong" => SolutionConcept::Strong { eps },
                    "beta" => SolutionConcept::Beta { eps, beta: num("beta")? },
                    "truncated" => {
                        let k = keys.get("K").ok_or_else(|| err("missing `K=`".into()))?;
                        SolutionConcept::TruncatedStrong { eps, k: k.parse().map_err(|_| err(format!("bad K `{k}`")))? }
                    }
                    other => return Err(err(format!("unknown concept `{other}`"))),
                };
                Check::Verify {
                    circuit: positional[0].clone(),
                    assignment: positional[1].clone(),
                    concept,
                    expect: expect("expect")?,
                }
            }
            "discrepancy" => {
                arity(2)?;
                Check::Discrepancy {
                    circuit: positional[0].clone(),
                    assignment: positional[1].clone(),
                    eps: num("eps")?,
                    expect: expect("expect")?,
                }
            }
            "prop5" => {
                arity(1)?;
                Check::Prop5 {
                    profile: positional[0].clone(),
                    eps: num("eps")?,
                    wsne: expect("wsne")?,
                    strong: expect("strong")?,
                }
            }
            other => return Err(err(format!("unknown check `{other}`"))),
        };
        checks.push(check);
    }
    Ok(checks)
}

/// Two Scale gates reading the same node: any solution at tolerance `eps`
/// has `x[hi] - x[lo] <= (zeta_hi - zeta_lo) x[source] + 2 eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleDiscrepancy {
    pub source: NodeId,
    pub hi: NodeId,
    pub lo: NodeId,
    pub difference: f64,
    pub bound: f64,
}

impl ScaleDiscrepancy {
    pub fn violated(&self) -> bool {
        self.difference > self.bound
    }
}

fn short(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

impl fmt::Display for ScaleDiscrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x[{}] - x[{}] = {} {} {} (scale gates on `{}`)",
            self.hi,
            self.lo,
            short(self.difference),
            if self.violated() { ">" } else { "<=" },
            short(self.bound),
            self.source
        )
    }
}

/// Every pair of Scale gates sharing an input, in gate order. Pairs with
/// equal factors or missing values are skipped.
pub fn scale_discrepancies(circuit: &Circuit<f64>, x: &Assignment<f64>, eps: f64) -> Vec<ScaleDiscrepancy> {
    let scales: Vec<_> = circuit.gates().iter().filter(|g| g.kind() == GateKind::Scale).collect();
    let mut out = Vec::new();
    for (i, g1) in scales.iter().enumerate() {
        for g2 in &scales[i + 1..] {
            if g1.inputs[0] != g2.inputs[0] {
                continue;
            }
            let (z1, z2) = (g1.gate_type.zeta().unwrap_or(0.0), g2.gate_type.zeta().unwrap_or(0.0));
            if z1 == z2 {
                continue;
            }
            let (hi, lo, zh, zl) = if z1 > z2 { (g1, g2, z1, z2) } else { (g2, g1, z2, z1) };
            let (Some(s), Some(h), Some(l)) = (x.get(&hi.inputs[0]), x.get(&hi.output), x.get(&lo.output)) else {
                continue;
            };
            out.push(ScaleDiscrepancy {
                source: hi.inputs[0].clone(),
                hi: hi.output.clone(),
                lo: lo.output.clone(),
                difference: h - l,
                bound: (zh - zl) * s + 2.0 * eps,
            });
        }
    }
    out
}

/// Result of running one check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub ok: bool,
    pub detail: String,
}

fn load_circuit(files: &dyn Fn(&str) -> Option<String>, name: &str) -> Result<Circuit<f64>, FixtureError> {
    let text = files(name).ok_or_else(|| FixtureError::MissingFile(name.into()))?;
    parse_circuit(&text).map_err(|error| FixtureError::Parse { file: name.into(), error })
}

fn load_assignment(files: &dyn Fn(&str) -> Option<String>, name: &str) -> Result<Assignment<f64>, FixtureError> {
    let text = files(name).ok_or_else(|| FixtureError::MissingFile(name.into()))?;
    parse_assignment(&text).map_err(|error| FixtureError::Parse { file: name.into(), error })
}

/// Runs `check`, reading files through `files`.
pub fn run_check(check: &Check, files: &dyn Fn(&str) -> Option<String>) -> Result<CheckOutcome, FixtureError> {
    match check {
        Check::Verify { circuit, assignment, concept, expect } => {
            let c = load_circuit(files, circuit)?;
            let x = load_assignment(files, assignment)?;
            let report = verify(&c, &x, concept)?;
            let got = Expect::from_bool(report.is_solution);
            let violated = report.violations().count();
            Ok(CheckOutcome { ok: got == *expect, detail: format!("{got} ({violated} violated gates)") })
        }
        Check::Discrepancy { circuit, assignment, eps, expect } => {
            let c = load_circuit(files, circuit)?;
            let x = load_assignment(files, assignment)?;
            let found = scale_discrepancies(&c, &x, *eps);
            let bad: Vec<String> = found.iter().filter(|d| d.violated()).map(|d| d.to_string()).collect();
            let got = Expect::from_bool(bad.is_empty());
            let detail = if bad.is_empty() { format!("{got}") } else { format!("{got}: {}", bad.join("; ")) };
            Ok(CheckOutcome { ok: got == *expect, detail })
        }
        Check::Prop5 { profile, eps, wsne, strong } => {
            let p = load_assignment(files, profile)?;
            let (a, b, v) = (NodeId::from("a"), NodeId::from("b"), NodeId::from("v"));
            let game = gadget(GadgetKind::And, &a, Some(&b), &v)?;
            let w = Expect::from_bool(is_wsne(&game, &p, *eps)?.ok);
            let get =
                |n: &NodeId| p.get(n).ok_or_else(|| FixtureError::MissingFile(format!("{profile}: value for `{n}`")));
            let row =
                check_row(&GateType::And, &[get(&a)?, get(&b)?], get(&v)?, &SolutionConcept::Strong { eps: *eps });
            let s = Expect::from_bool(row.ok());
            Ok(CheckOutcome { ok: w == *wsne && s == *strong, detail: format!("wsne={w} strong={s} ({})", row.clause) })
        }
    }
}

/// A named fixture: files and the checks its manifest lists.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Fixture {
    pub fn manifest_name(&self) -> String {
        format!("{}.manifest", self.name)
    }

    pub fn manifest(&self) -> String {
        let mut s = format!("# {}\n", self.summary);
        for c in &self.checks {
            s.push_str(&format!("{c}\n"));
        }
        s
    }

    pub fn file(&self, name: &str) -> Option<String> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, t)| t.clone())
    }

    /// Every check run against this fixture's own files.
    pub fn check_all(&self) -> Vec<(Check, Result<CheckOutcome, FixtureError>)> {
        let files = |n: &str| self.file(n);
        self.checks.iter().map(|c| (c.clone(), run_check(c, &files))).collect()
    }
}

pub const FIXTURE_NAMES: [&str; 6] = ["prop1", "issue2", "issue3", "issue4", "footnote9", "prop5"];

pub fn all_fixtures() -> Vec<Fixture> {
    FIXTURE_NAMES.iter().map(|n| fixture(n).expect("listed fixture")).collect()
}

pub fn fixture(name: &str) -> Result<Fixture, FixtureError> {
    match name {
        "prop1" => Ok(not_gate_witness("prop1", "Not gate with x[a] = 1.5 eps and x[v] = 1/2 (eps = 0.1)")),
        "issue2" => Ok(not_gate_witness("issue2", "Unchanged Boolean gate of fan-out <= 2: same witness as prop1")),
        "issue3" => Ok(issue3()),
        "issue4" => Ok(issue4()),
        "footnote9" => Ok(footnote9()),
        "prop5" => Ok(prop5()),
        other => Err(FixtureError::Unknown(other.into())),
    }
}

fn verify_check(circuit: &str, assignment: &str, concept: SolutionConcept<f64>, expect: Expect) -> Check {
    Check::Verify { circuit: circuit.into(), assignment: assignment.into(), concept, expect }
}

fn not_gate_witness(name: &'static str, summary: &'static str) -> Fixture {
    let gc = format!("{name}.gc");
    let asn = format!("{name}.asn");
    Fixture {
        name,
        summary,
        files: vec![(gc.clone(), "input a;\nv = not(a);\n".into()), (asn.clone(), "a = 0.15\nv = 0.5\n".into())],
        checks: vec![
            verify_check(&gc, &asn, SolutionConcept::Weak { eps: 0.1 }, Expect::Pass),
            verify_check(&gc, &asn, SolutionConcept::Weak { eps: 0.2 }, Expect::Fail),
            verify_check(&gc, &asn, SolutionConcept::Strong { eps: 0.1 }, Expect::Fail),
        ],
    }
}

/// Arithmetic node `v` read by a Not gate and two Scale gates.
pub fn issue3_circuit() -> Circuit<f64> {
    let mut c = Circuit::new();
    c.add_node("s");
    c.push(GateType::Copy, ["s"], "v");
    c.push(GateType::Not, ["v"], "w");
    c.push(GateType::Scale(0.5), ["v"], "p");
    c.push(GateType::Scale(1.0 / 3.0), ["v"], "q");
    c
}

/// Tolerance `to_fanout2` is run at for the issue-3 fixture.
pub const ISSUE3_EPS: f64 = 0.2;

/// The fan-out-2 reduction of [`issue3_circuit`], its output tolerance, and a
/// weak solution of the reduction in which the copy of `v` read by the Not
/// gate is not approximately Boolean while `x[v]` is, and `x[w] = 1/2`.
pub fn issue3_reduced() -> (Circuit<f64>, f64, Assignment<f64>) {
    let r = to_fanout2(&issue3_circuit(), ISSUE3_EPS).expect("fixture parameters are in range");
    let eps_out = r.eps_out.expect("fanout2 reports eps_out");
    let concept = SolutionConcept::Weak { eps: eps_out };
    let w = NodeId::from("w");
    // Every gate output at the low end of its admissible band drags the
    // distributed copies below 1 - eps_out.
    let x = sample_forward(&r.circuit, &concept, &mut |n, iv| match iv {
        None => 1.0,
        Some(iv) if *n == w && iv.contains(0.5) => 0.5,
        Some(iv) => inset(iv, 0.0),
    })
    .expect("reduction is acyclic")
    .expect("every gate admits an output");
    (r.circuit, eps_out, x)
}

fn issue3() -> Fixture {
    let (reduced, eps_out, x) = issue3_reduced();
    let files = vec![
        ("issue3.gc".to_string(), serialize_circuit(&issue3_circuit())),
        ("issue3_reduced.gc".to_string(), serialize_circuit(&reduced)),
        ("issue3.asn".to_string(), serialize_assignment(&x)),
    ];
    Fixture {
        name: "issue3",
        summary: "Arithmetic output read by a Not gate, distributed by the fan-out 2 reduction at eps = 0.2",
        files,
        checks: vec![
            verify_check("issue3_reduced.gc", "issue3.asn", SolutionConcept::Weak { eps: eps_out }, Expect::Pass),
            verify_check("issue3.gc", "issue3.asn", SolutionConcept::Weak { eps: eps_out }, Expect::Fail),
            verify_check("issue3.gc", "issue3.asn", SolutionConcept::Weak { eps: ISSUE3_EPS }, Expect::Fail),
            verify_check("issue3_reduced.gc", "issue3.asn", SolutionConcept::Strong { eps: eps_out }, Expect::Fail),
        ],
    }
}

pub const ISSUE4_CIRCUIT: &str = "\
# Node a is left unconstrained.
z = const(0.3);
b = cmp(z, a);
c = scale(1/2, b);
d = scale(1/3, b);
e = scale(1/4, b);
";

/// Double-negation fan-out tree on `b`. `e` reads `b21`.
pub const ISSUE4_REDUCED: &str = "\
z = const(0.3);
b = cmp(z, a);
b1_n = not(b);
b1 = not(b1_n);
b2_n = not(b);
b2 = not(b2_n);
b11_n = not(b1);
b11 = not(b11_n);
b12_n = not(b1);
b12 = not(b12_n);
b21_n = not(b2);
b21 = not(b21_n);
c = scale(1/2, b11);
d = scale(1/3, b12);
e = scale(1/4, b21);
";

/// Interior nodes `*_n` hold one minus the chain input.
pub const ISSUE4_ASSIGNMENT: &str = "\
a = 0.3
z = 0.3
b = 0.5
b1_n = 0.5
b1 = 0.8
b2_n = 0.5
b2 = 0.2
b11_n = 0.2
b11 = 0.8
b12_n = 0.2
b12 = 0.8
b21_n = 0.8
b21 = 0.2
c = 0.4
d = 4/15
e = 1/20
";

fn issue4() -> Fixture {
    Fixture {
        name: "issue4",
        summary: "Double negations distributing a non-Boolean value create independent copies",
        files: vec![
            ("issue4.gc".into(), ISSUE4_CIRCUIT.into()),
            ("issue4_reduced.gc".into(), ISSUE4_REDUCED.into()),
            ("issue4.asn".into(), ISSUE4_ASSIGNMENT.into()),
        ],
        checks: vec![
            verify_check("issue4_reduced.gc", "issue4.asn", SolutionConcept::Weak { eps: 0.01 }, Expect::Pass),
            verify_check("issue4.gc", "issue4.asn", SolutionConcept::Weak { eps: 0.01 }, Expect::Fail),
            Check::Discrepancy {
                circuit: "issue4.gc".into(),
                assignment: "issue4.asn".into(),
                eps: 0.01,
                expect: Expect::Fail,
            },
        ],
    }
}

/// Term `n` of the sequence `x[a1] = 2/n`, `x[v] = 0`, a weak `1/n`-solution of `v = not(a1)`.
pub fn footnote9_term(n: u32) -> Assignment<f64> {
    [("a1", 2.0 / f64::from(n)), ("v", 0.0)].into_iter().collect()
}

pub fn footnote9_limit() -> Assignment<f64> {
    [("a1", 0.0), ("v", 0.0)].into_iter().collect()
}

pub const FOOTNOTE9_TERMS: [u32; 3] = [4, 10, 100];
/// Tolerance at which the limit point is checked.
pub const FOOTNOTE9_LIMIT_EPS: f64 = 1e-6;

fn footnote9() -> Fixture {
    let gc = "footnote9.gc".to_string();
    let mut files = vec![(gc.clone(), "input a1;\nv = not(a1);\n".to_string())];
    let mut checks = Vec::new();
    for n in FOOTNOTE9_TERMS {
        let asn = format!("footnote9_n{n}.asn");
        files.push((asn.clone(), serialize_assignment(&footnote9_term(n))));
        checks.push(verify_check(&gc, &asn, SolutionConcept::Weak { eps: 1.0 / f64::from(n) }, Expect::Pass));
    }
    files.push(("footnote9_limit.asn".into(), serialize_assignment(&footnote9_limit())));
    checks.push(verify_check(
        &gc,
        "footnote9_limit.asn",
        SolutionConcept::Weak { eps: FOOTNOTE9_LIMIT_EPS },
        Expect::Fail,
    ));
    Fixture {
        name: "footnote9",
        summary: "Weak solutions x^n at eps = 1/n whose limit is not a weak solution",
        files,
        checks,
    }
}

fn prop5() -> Fixture {
    let eps = 1.0 / 24.0;
    let input = 0.5 + 2.0 * eps;
    let profile: Assignment<f64> = [("a", input), ("b", input), ("v", 0.0)].into_iter().collect();
    Fixture {
        name: "prop5",
        summary: "And gadget profile p[a] = p[b] = 1/2 + 2 eps, p[v] = 0 at eps = 1/24",
        files: vec![("prop5.asn".into(), serialize_assignment(&profile))],
        checks: vec![Check::Prop5 { profile: "prop5.asn".into(), eps, wsne: Expect::Pass, strong: Expect::Fail }],
    }
}
