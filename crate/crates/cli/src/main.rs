//! `gckit`: verify, rewrite and solve generalized circuits from the command line.
//!
//! Exit codes: 0 success or property holds, 1 property fails, 2 usage or
//! parse error, 3 solver budget exhausted.

// `!(x > 0)` style guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use gckit::analysis::{
    certify_gadget, probe_monotonicity, solve, AnalysisError, ConceptFamily, SolveBudget, SolveMethod, SolveOutcome,
    TargetRow,
};
use gckit::circuit::{validate, GateKind, GateType};
use gckit::concepts::{verify, ConceptError, SolutionConcept};
use gckit::dsl::{parse_assignment, parse_circuit, parse_number, serialize_assignment, serialize_circuit};
use gckit::fixtures::{
    all_fixtures, fixture, parse_manifest, run_check, scale_discrepancies, FixtureError, FIXTURE_NAMES,
};
use gckit::games::{
    check_prop6, find_beta_threshold, gadget_sweep, prop5_eps_bound, prop5_exact_threshold, prop5_profile, GadgetKind,
    GameError, BETA_MATCH_TOLERANCE,
};
use gckit::scalar::format_number;
use gckit::transforms::{
    boolean_gadget, eliminate_booleans, normalize, regularize, to_fanout2, TransformError, TransformResult,
};
use gckit::{Assignment, Circuit};

const SEED_VAR: &str = "GCKIT_SEED";

#[derive(Parser, Debug)]
#[command(name = "gckit", version, about = "Generalized circuit toolkit")]
struct Cli {
    /// Worker threads for sweeps and searches. Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Report format for sweeps.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check structural invariants of a circuit.
    Validate { circuit: PathBuf },
    /// Check an assignment against every gate.
    Verify(VerifyArgs),
    /// Rewrite a circuit and write it with a `.meta` sidecar.
    Transform(TransformArgs),
    /// Snap Boolean-gate inputs of a weak solution to 0, 1/2 or 1.
    Normalize(NormalizeArgs),
    /// Search for a solution.
    Solve(SolveArgs),
    /// Look for a verdict flip between two tolerances.
    ProbeMonotonicity(ProbeArgs),
    /// Interval-certify the comparison gadget replacing a Boolean gate.
    Certify(CertifyArgs),
    /// Game gadget analyses.
    #[command(subcommand)]
    Game(GameCommand),
    /// Write a named fixture, list fixtures, or check manifests.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConceptName {
    Weak,
    Strong,
    Beta,
    Truncated,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = ConceptName::Weak)]
    concept: ConceptName,
    /// Boolean premise distance from 1/2 (beta concept only).
    #[arg(long, value_parser = unit_number)]
    beta: Option<f64>,
    /// Range `[0, 1/K]` (truncated concept only).
    #[arg(long = "K", value_name = "K")]
    k: Option<u32>,
}

impl FamilyArgs {
    fn family(&self) -> Result<ConceptFamily<f64>, clap::Error> {
        let conflict = |msg: &str| Cli::command().error(ErrorKind::ArgumentConflict, msg);
        match self.concept {
            ConceptName::Beta => {}
            _ if self.beta.is_some() => return Err(conflict("--beta requires --concept beta")),
            _ => {}
        }
        if self.concept != ConceptName::Truncated && self.k.is_some() {
            return Err(conflict("--K requires --concept truncated"));
        }
        let missing = |msg: &str| Cli::command().error(ErrorKind::MissingRequiredArgument, msg);
        Ok(match self.concept {
            ConceptName::Weak => ConceptFamily::Weak,
            ConceptName::Strong => ConceptFamily::Strong,
            ConceptName::Beta => {
                ConceptFamily::Beta { beta: self.beta.ok_or_else(|| missing("--concept beta needs --beta"))? }
            }
            ConceptName::Truncated => {
                ConceptFamily::TruncatedStrong { k: self.k.ok_or_else(|| missing("--concept truncated needs --K"))? }
            }
        })
    }
}

#[derive(Args, Debug)]
struct ConceptArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_parser = unit_number)]
    eps: f64,
}

impl ConceptArgs {
    fn concept(&self) -> Result<SolutionConcept<f64>, clap::Error> {
        let c = self.family.family()?.at(self.eps);
        c.validate().map_err(|e| Cli::command().error(ErrorKind::ValueValidation, e.to_string()))?;
        Ok(c)
    }
}

/// Decimal or `p/q` in `[0, 1]`.
fn unit_number(s: &str) -> Result<f64, String> {
    parse_number::<f64>(s)
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[command(flatten)]
    concept: ConceptArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Pass {
    BooleanEliminate,
    Fanout2,
    Regularize,
}

impl Pass {
    fn name(self) -> &'static str {
        match self {
            Pass::BooleanEliminate => "boolean-eliminate",
            Pass::Fanout2 => "fanout2",
            Pass::Regularize => "regularize",
        }
    }
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long, value_enum)]
    pass: Pass,
    /// Required by boolean-eliminate and fanout2.
    #[arg(long, value_parser = unit_number)]
    eps: Option<f64>,
    input: PathBuf,
    /// Defaults to `<input stem>.<pass>.gc` next to the input.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long, value_parser = unit_number)]
    eps: f64,
    /// Write here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    concept: ConceptArgs,
    #[arg(long, default_value_t = SolveBudget::default().iterations)]
    iterations: usize,
    #[arg(long, default_value_t = SolveBudget::default().restarts)]
    restarts: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_parser = unit_number)]
    small: f64,
    #[arg(long, value_parser = unit_number)]
    large: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Not,
    And,
    Or,
}

impl Kind {
    fn gadget(self) -> GadgetKind {
        match self {
            Kind::Not => GadgetKind::Not,
            Kind::And => GadgetKind::And,
            Kind::Or => GadgetKind::Or,
        }
    }

    fn gate(self) -> GateKind {
        match self {
            Kind::Not => GateKind::Not,
            Kind::And => GateKind::And,
            Kind::Or => GateKind::Or,
        }
    }
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long, value_enum)]
    gadget: Kind,
    /// Target strong tolerance.
    #[arg(long, value_parser = unit_number)]
    eps: f64,
    /// Tolerance the gadget is propagated at; defaults to eps/2.
    #[arg(long, value_parser = unit_number)]
    inner: Option<f64>,
    /// Input grid pitch; defaults to eps/4.
    #[arg(long, value_parser = unit_number)]
    pitch: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum GameCommand {
    /// Admissible p[v] at every input grid point, with the beta row verdict.
    GadgetSweep {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = unit_number)]
        eps: f64,
        #[arg(long, value_parser = unit_number)]
        beta: f64,
        #[arg(long, value_parser = unit_number)]
        pitch: f64,
    },
    /// The And gadget profile p[a] = p[b] = 1/2 + 2 eps, p[v] = 0.
    Prop5 {
        #[arg(long, value_parser = unit_number, default_value = "1/24")]
        eps: f64,
        /// WSNE tolerance for the reported bound.
        #[arg(long, value_parser = unit_number, default_value = "0")]
        eps_prime: f64,
    },
    /// Sweep all three gadgets against the beta rows.
    Prop6 {
        #[arg(long, value_parser = unit_number)]
        beta: f64,
        #[arg(long, value_parser = unit_number)]
        eps: f64,
        #[arg(long, value_parser = unit_number)]
        pitch: f64,
    },
    /// Smallest beta at which a gadget sweep passes.
    BetaThreshold {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = unit_number)]
        eps: f64,
        #[arg(long, value_parser = unit_number)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
struct FixturesArgs {
    /// Fixture to write; lists all fixtures when omitted.
    name: Option<String>,
    /// Directory to write into.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
    /// Run every fixture's manifest.
    #[arg(long, conflicts_with_all = ["name", "check"])]
    check_all: bool,
    /// Run a manifest file against the files next to it.
    #[arg(long, conflicts_with = "name")]
    check: Option<PathBuf>,
}

/// Exit status plus the message printed to stderr.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn fails(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<clap::Error> for Failure {
    fn from(e: clap::Error) -> Self {
        Failure::usage(e.render().to_string())
    }
}

impl From<ConceptError> for Failure {
    fn from(e: ConceptError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Infeasible(_) => Failure::fails(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<FixtureError> for Failure {
    fn from(e: FixtureError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::NotRegular(_) | TransformError::NotASolution(_) | TransformError::Uncertified(_) => {
                Failure::fails(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    parse_circuit(&read(path)?).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn load_assignment(path: &Path) -> Result<Assignment, Failure> {
    parse_assignment(&read(path)?).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn verdict(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn cmd_validate(path: &Path) -> Outcome {
    let c = load_circuit(path)?;
    let report = validate(&c);
    for d in &report.defects {
        println!("{d}");
    }
    println!("{} gates, {} nodes: {}", c.gates().len(), c.nodes().len(), if report.ok { "valid" } else { "invalid" });
    Ok(verdict(report.ok))
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let concept = args.concept.concept()?;
    let c = load_circuit(&args.circuit)?;
    let x = load_assignment(&args.assignment)?;
    let report = verify(&c, &x, &concept)?;
    print!("{}", report.render(&c));
    let extra = x.iter().filter(|(n, _)| !c.contains_node(n)).count();
    if extra > 0 {
        println!("ignored values for {extra} nodes outside the circuit");
    }
    if !report.is_solution {
        for d in scale_discrepancies(&c, &x, concept.eps()).iter().filter(|d| d.violated()) {
            println!("discrepancy: {d}");
        }
    }
    println!("{concept}: {}", if report.is_solution { "solution" } else { "not a solution" });
    Ok(verdict(report.is_solution))
}

/// Sidecar text: tolerance, node mapping and notes.
fn metadata(pass: Pass, eps: Option<f64>, r: &TransformResult<f64>) -> String {
    let mut s = String::new();
    let num = |x: Option<f64>| x.map_or("unchanged".to_string(), format_number);
    let _ = writeln!(s, "pass = {}", pass.name());
    let _ = writeln!(s, "eps_in = {}", num(eps));
    let _ = writeln!(s, "eps_out = {}", num(r.eps_out));
    let _ = writeln!(s, "max_fan_out = {}", gckit::circuit::max_fan_out(&r.circuit));
    for n in &r.preserved_nodes {
        let _ = writeln!(s, "node {n} -> {n}");
    }
    for n in &r.fresh_nodes {
        let origin = n.as_str().split('$').next().unwrap_or("");
        let _ = writeln!(s, "fresh {n} <- {origin}");
    }
    for note in &r.notes {
        let _ = writeln!(s, "note {note}");
    }
    for d in &r.unrepaired {
        let _ = writeln!(s, "unrepaired {d}");
    }
    s
}

fn cmd_transform(args: &TransformArgs) -> Outcome {
    let need_eps = || args.eps.ok_or_else(|| Failure::usage(format!("--pass {} needs --eps", args.pass.name())));
    if args.pass == Pass::Regularize && args.eps.is_some() {
        return Err(Failure::usage("--pass regularize takes no --eps"));
    }
    let c = load_circuit(&args.input)?;
    let r = match args.pass {
        Pass::BooleanEliminate => eliminate_booleans(&c, need_eps()?)?,
        Pass::Fanout2 => to_fanout2(&c, need_eps()?)?,
        Pass::Regularize => regularize(&c)?,
    };
    let out = args.output.clone().unwrap_or_else(|| {
        let stem = args.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        args.input.with_file_name(format!("{stem}.{}.gc", args.pass.name()))
    });
    let mut meta = out.clone().into_os_string();
    meta.push(".meta");
    write(&out, &serialize_circuit(&r.circuit))?;
    write(Path::new(&meta), &metadata(args.pass, args.eps, &r))?;
    println!(
        "{}: {} gates -> {} gates, {} fresh nodes, eps_out {}",
        args.pass.name(),
        c.gates().len(),
        r.circuit.gates().len(),
        r.fresh_nodes.len(),
        r.eps_out.map_or("unchanged".to_string(), format_number)
    );
    println!("wrote {} and {}", out.display(), Path::new(&meta).display());
    for d in &r.unrepaired {
        println!("unrepaired: {d}");
    }
    Ok(verdict(r.unrepaired.is_empty()))
}

fn cmd_normalize(args: &NormalizeArgs) -> Outcome {
    let c = load_circuit(&args.circuit)?;
    let x = load_assignment(&args.assignment)?;
    let y = normalize(&c, &x, args.eps)?;
    let text = serialize_assignment(&y);
    match &args.output {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn seed() -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(s) => {
            s.trim().parse().map_err(|_| Failure::usage(format!("{SEED_VAR} must be an unsigned integer, got `{s}`")))
        }
        Err(_) => Ok(0),
    }
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let concept = args.concept.concept()?;
    let c = load_circuit(&args.circuit)?;
    let budget =
        SolveBudget { iterations: args.iterations, restarts: args.restarts, seed: seed()?, ..SolveBudget::default() };
    match solve(&c, &concept, &budget)? {
        SolveOutcome::Found { assignment, method } => {
            let how = match method {
                SolveMethod::Iteration { restart, steps } => format!("iteration, restart {restart}, {steps} steps"),
                SolveMethod::Grid { point } => format!("grid search, point {point}"),
            };
            let text = format!("# {concept} solution found by {how}\n{}", serialize_assignment(&assignment));
            match &args.output {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        SolveOutcome::NotFound => {
            println!("no solution found within the budget (this says nothing about existence)");
            Ok(3)
        }
    }
}

fn cmd_probe(args: &ProbeArgs) -> Outcome {
    let family = args.family.family()?;
    for eps in [args.small, args.large] {
        family.at(eps).validate()?;
    }
    let c = load_circuit(&args.circuit)?;
    let x = load_assignment(&args.assignment)?;
    match probe_monotonicity(&c, &x, args.small, args.large, family)? {
        Some(w) => {
            println!(
                "witness: solution at eps={} but not at eps={}; first rejected gate {}",
                format_number(w.eps_small),
                format_number(w.eps_large),
                c.gates()[w.gate.0]
            );
            Ok(1)
        }
        None => {
            println!("no witness");
            Ok(0)
        }
    }
}

fn cmd_certify(args: &CertifyArgs) -> Outcome {
    let inner = args.inner.unwrap_or(args.eps / 2.0);
    let pitch = args.pitch.unwrap_or(args.eps / 4.0);
    let (gadget, inputs, output) = boolean_gadget(args.gadget.gate(), args.eps)?;
    let target = TargetRow {
        gate_type: GateType::plain(args.gadget.gate()).expect("Boolean gates have no parameter"),
        concept: SolutionConcept::Strong { eps: args.eps },
    };
    let cert = certify_gadget(&gadget, &inputs, &output, pitch, &SolutionConcept::Strong { eps: inner }, &target)?;
    println!(
        "{} gadget, target strong eps={}, inner eps={}, pitch {}: {} points",
        args.gadget.gadget().name(),
        format_number(args.eps),
        format_number(inner),
        format_number(pitch),
        cert.points
    );
    if let (Some(p), Some(iv)) = (&cert.counterexample, &cert.output_interval) {
        let at: Vec<String> = p.iter().map(|(n, v)| format!("{n}={}", format_number(*v))).collect();
        println!("counterexample at {}: output enclosure {iv}", at.join(", "));
    }
    println!("{}", if cert.certified { "certified" } else { "not certified" });
    Ok(verdict(cert.certified))
}

fn cmd_game(cmd: &GameCommand, format: Format) -> Outcome {
    let csv = format == Format::Csv;
    match *cmd {
        GameCommand::GadgetSweep { kind, eps, beta, pitch } => {
            if !(pitch > 0.0) {
                return Err(Failure::usage("--pitch must be positive"));
            }
            let rows = gadget_sweep(kind.gadget(), eps, beta, pitch);
            let two = kind.gadget().arity() == 2;
            if csv {
                println!("{}u0,u1,pv_lo,pv_hi,row_ok", if two { "a,b," } else { "a," });
            }
            for r in &rows {
                let inputs: Vec<String> = r.inputs.iter().map(|v| v.to_string()).collect();
                if csv {
                    println!("{},{},{},{},{},{}", inputs.join(","), r.u0, r.u1, r.pv.0, r.pv.1, r.row_ok);
                } else {
                    println!(
                        "inputs ({}) u0={} u1={} p[v] in [{}, {}] {}",
                        inputs.join(", "),
                        r.u0,
                        r.u1,
                        r.pv.0,
                        r.pv.1,
                        if r.row_ok { "ok" } else { "VIOLATED" }
                    );
                }
            }
            Ok(verdict(rows.iter().all(|r| r.row_ok)))
        }
        GameCommand::Prop5 { eps, eps_prime } => {
            let p = prop5_profile(eps);
            println!("eps = {}, p[a] = p[b] = {}, p[v] = 0", format_number(eps), format_number(p.input));
            println!("u0 = {}, u1 = {}", p.u0, p.u1);
            println!("eps-WSNE: {}", if p.wsne_ok { "yes" } else { "no" });
            println!("strong And row: {} ({})", if p.strong_row_ok { "holds" } else { "violated" }, p.strong_clause);
            println!("bound at eps' = {}: {}", format_number(eps_prime), format_number(prop5_eps_bound(eps_prime)));
            println!("exact threshold at eps' = {}: {}", format_number(eps_prime), prop5_exact_threshold(eps_prime));
            Ok(verdict(p.wsne_ok && !p.strong_row_ok))
        }
        GameCommand::Prop6 { beta, eps, pitch } => {
            let report = check_prop6(beta, eps, pitch)?;
            if csv {
                println!("kind,inputs,pv,clause");
                for f in &report.failures {
                    let inputs: Vec<String> = f.inputs.iter().map(|v| v.to_string()).collect();
                    println!("{},{},{},\"{}\"", f.kind.name(), inputs.join(" "), f.pv, f.clause);
                }
            } else {
                for (kind, n) in &report.points {
                    println!("{}: {n} grid points", kind.name());
                }
                for f in &report.failures {
                    println!("violation {}: inputs {:?}, p[v] = {}: {}", f.kind.name(), f.inputs, f.pv, f.clause);
                }
                println!("{} violations", report.failures.len());
            }
            Ok(verdict(report.failures.is_empty()))
        }
        GameCommand::BetaThreshold { kind, eps, tol } => {
            let t = find_beta_threshold(kind.gadget(), eps, tol)?;
            let matched = t.matches.unwrap_or("neither candidate");
            if csv {
                println!("kind,eps,beta_star,lo,hi,pitch,matches");
                println!(
                    "{},{},{},{},{},{},{matched}",
                    kind.gadget().name(),
                    t.eps,
                    t.beta_star,
                    t.bracket.0,
                    t.bracket.1,
                    t.pitch
                );
            } else {
                println!("{} gadget, eps={}, pitch {}", kind.gadget().name(), t.eps, t.pitch);
                println!("beta* = {} (bracket [{}, {}])", t.beta_star, t.bracket.0, t.bracket.1);
                println!("matches: {matched} (within {BETA_MATCH_TOLERANCE})");
            }
            Ok(0)
        }
    }
}

fn cmd_fixtures(args: &FixturesArgs) -> Outcome {
    if args.check_all {
        let mut ok = true;
        for f in all_fixtures() {
            for (check, outcome) in f.check_all() {
                let (pass, detail) = match outcome {
                    Ok(o) => (o.ok, o.detail),
                    Err(e) => (false, e.to_string()),
                };
                ok &= pass;
                println!("{} {}: {check}: {detail}", if pass { "PASS" } else { "FAIL" }, f.name);
            }
        }
        return Ok(verdict(ok));
    }
    if let Some(manifest) = &args.check {
        let dir = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
        let checks = parse_manifest(&read(manifest)?)?;
        let files = |n: &str| fs::read_to_string(dir.join(n)).ok();
        let mut ok = true;
        for check in &checks {
            let o = run_check(check, &files)?;
            ok &= o.ok;
            println!("{} {check}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        }
        return Ok(verdict(ok));
    }
    let Some(name) = &args.name else {
        for n in FIXTURE_NAMES {
            println!("{n}: {}", fixture(n)?.summary);
        }
        return Ok(0);
    };
    let f = fixture(name)?;
    fs::create_dir_all(&args.dir).map_err(|e| Failure::usage(format!("{}: {e}", args.dir.display())))?;
    for (file, text) in &f.files {
        write(&args.dir.join(file), text)?;
        println!("wrote {file}");
    }
    write(&args.dir.join(f.manifest_name()), &f.manifest())?;
    println!("wrote {}", f.manifest_name());
    Ok(0)
}

fn run(cli: &Cli) -> Outcome {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(Failure::usage("--jobs must be at least 1"));
        }
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Validate { circuit } => cmd_validate(circuit),
        Command::Verify(a) => cmd_verify(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Solve(a) => cmd_solve(a),
        Command::ProbeMonotonicity(a) => cmd_probe(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Game(g) => cmd_game(g, cli.format),
        Command::Fixtures(a) => cmd_fixtures(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let msg = f.message.trim_end();
            if msg.starts_with("error:") {
                eprintln!("{msg}");
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(f.code)
        }
    }
}
