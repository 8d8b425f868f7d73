use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gckit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gckit")).current_dir(dir).args(args).env_remove("GCKIT_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn prop1_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&gckit(dir.path(), &["fixtures", "prop1"])), 0);
    dir
}

#[test]
fn verify_exit_codes() {
    let d = prop1_dir();
    let p = d.path();
    let verify = |extra: &[&str]| {
        let mut args = vec!["verify", "--circuit", "prop1.gc", "--assignment", "prop1.asn"];
        args.extend_from_slice(extra);
        code(&gckit(p, &args))
    };
    assert_eq!(verify(&["--eps", "0.1"]), 0);
    assert_eq!(verify(&["--eps", "0.2"]), 1);
    assert_eq!(verify(&["--concept", "strong", "--eps", "0.1"]), 1);
    assert_eq!(verify(&["--concept", "beta", "--beta", "0.3", "--eps", "0.05"]), 1);
    // Under K = 2 the Not row only asks for x[v] >= 1/4 - eps.
    assert_eq!(verify(&["--concept", "truncated", "--K", "2", "--eps", "0.05"]), 0);
}

#[test]
fn invalid_concept_combinations_are_usage_errors() {
    let d = prop1_dir();
    let base = ["verify", "--circuit", "prop1.gc", "--assignment", "prop1.asn"];
    for extra in [
        &["--eps", "0.1", "--beta", "0.3"][..],
        &["--concept", "beta", "--eps", "0.1"],
        &["--concept", "truncated", "--eps", "0.1"],
        &["--concept", "strong", "--eps", "0.1", "--K", "3"],
        &["--concept", "truncated", "--K", "2", "--eps", "0.3"],
        &["--concept", "truncated", "--K", "1", "--eps", "0.1"],
        &["--concept", "beta", "--beta", "0.1", "--eps", "0.2"],
        &["--eps", "1.5"],
        &[],
    ] {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        assert_eq!(code(&gckit(d.path(), &args)), 2, "{extra:?}");
    }
}

#[test]
fn parse_errors_and_missing_files_exit_2() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("bad.gc"), "v = const(1.5);\n").unwrap();
    fs::write(d.path().join("broken.gc"), "v = not(;\n").unwrap();
    for f in ["bad.gc", "broken.gc", "missing.gc"] {
        assert_eq!(code(&gckit(d.path(), &["validate", f])), 2, "{f}");
    }
    let o = gckit(d.path(), &["validate", "broken.gc"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:9"), "{o:?}");
    assert_eq!(code(&gckit(d.path(), &["fixtures", "nope"])), 2);
    assert_eq!(code(&gckit(d.path(), &["frobnicate"])), 2);
}

#[test]
fn validate_reports_defects() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("ok.gc"), "input a;\nv = not(a);\n").unwrap();
    fs::write(d.path().join("dup.gc"), "v = not(a);\nv = copy(a);\n").unwrap();
    assert_eq!(code(&gckit(d.path(), &["validate", "ok.gc"])), 0);
    let o = gckit(d.path(), &["validate", "dup.gc"]);
    assert!(code(&o) == 1 || code(&o) == 2, "{o:?}");
}

#[test]
fn solver_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    fs::write(p.join("loop.gc"), "v = not(v);\n").unwrap();
    fs::write(
        p.join("seven.gc"),
        "v1 = not(v7);\nv2 = not(v1);\nv3 = not(v2);\nv4 = not(v3);\nv5 = not(v4);\nv6 = not(v5);\nv7 = not(v6);\n",
    )
    .unwrap();
    let solve = |args: &[&str], seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gckit"));
        c.current_dir(p).args(args).env_remove("GCKIT_SEED");
        if let Some(s) = seed {
            c.env("GCKIT_SEED", s);
        }
        c.output().unwrap()
    };
    let found = solve(&["solve", "--circuit", "loop.gc", "--concept", "strong", "--eps", "0.05"], Some("7"));
    assert_eq!(code(&found), 0);
    assert!(stdout(&found).contains("v = "));
    // No restarts and too many nodes for the grid: nothing is searched.
    let none = solve(&["solve", "--circuit", "seven.gc", "--eps", "0.1", "--restarts", "0"], None);
    assert_eq!(code(&none), 3);
    let bad = solve(&["solve", "--circuit", "loop.gc", "--eps", "0.1"], Some("abc"));
    assert_eq!(code(&bad), 2);
}

#[test]
fn probe_reports_weak_witness_only() {
    let d = prop1_dir();
    let probe = |concept: &str| {
        code(&gckit(
            d.path(),
            &[
                "probe-monotonicity",
                "--circuit",
                "prop1.gc",
                "--assignment",
                "prop1.asn",
                "--concept",
                concept,
                "--small",
                "0.1",
                "--large",
                "0.2",
            ],
        ))
    };
    assert_eq!(probe("weak"), 1);
    assert_eq!(probe("strong"), 0);
}

#[test]
fn transform_is_deterministic_and_writes_sidecar() {
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let d = tempfile::tempdir().unwrap();
        assert_eq!(code(&gckit(d.path(), &["fixtures", "issue4"])), 0);
        let o = gckit(d.path(), &["transform", "--pass", "fanout2", "--eps", "0.1", "issue4.gc"]);
        assert_eq!(code(&o), 0, "{o:?}");
        let gc = fs::read(d.path().join("issue4.fanout2.gc")).unwrap();
        let meta = fs::read_to_string(d.path().join("issue4.fanout2.gc.meta")).unwrap();
        assert!(meta.contains("eps_out = "));
        assert!(meta.contains("max_fan_out = 2"));
        assert!(meta.contains("node b -> b"));
        outputs.push((gc, meta));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn transform_flag_rules() {
    let d = prop1_dir();
    let t = |args: &[&str]| code(&gckit(d.path(), args));
    assert_eq!(t(&["transform", "--pass", "boolean-eliminate", "--eps", "0.1", "prop1.gc"]), 0);
    assert_eq!(t(&["transform", "--pass", "boolean-eliminate", "--eps", "0.5", "prop1.gc"]), 2);
    assert_eq!(t(&["transform", "--pass", "fanout2", "prop1.gc"]), 2);
    assert_eq!(t(&["transform", "--pass", "regularize", "--eps", "0.1", "prop1.gc"]), 2);
    assert_eq!(t(&["transform", "--pass", "regularize", "prop1.gc", "-o", "r.gc"]), 0);
    assert!(d.path().join("r.gc.meta").exists());
}

#[test]
fn normalize_snaps_values() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.gc"), "input a;\nv = not(a);\nw = not(v);\n").unwrap();
    fs::write(d.path().join("x.asn"), "a = 0.03;\nv = 0.98;\nw = 0.02;\n").unwrap();
    let o = gckit(d.path(), &["normalize", "--circuit", "c.gc", "--assignment", "x.asn", "--eps", "0.05"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let out = stdout(&o);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["a = 0", "v = 1", "w = 0.02"]);
    fs::write(d.path().join("y.asn"), "a = 0.5;\nv = 0.4;\nw = 0.3;\n").unwrap();
    let o = gckit(d.path(), &["normalize", "--circuit", "c.gc", "--assignment", "y.asn", "--eps", "0.05"]);
    let out = stdout(&o);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["a = 0.5", "v = 0.5", "w = 0.3"]);
}

#[test]
fn certify_and_games() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    assert_eq!(code(&gckit(p, &["certify", "--gadget", "and", "--eps", "0.05"])), 0);
    let prop5 = gckit(p, &["game", "prop5"]);
    assert_eq!(code(&prop5), 0);
    assert!(stdout(&prop5).contains("eps-WSNE: yes"));
    assert_eq!(code(&gckit(p, &["game", "prop6", "--beta", "0.3", "--eps", "0.05", "--pitch", "0.01"])), 0);
    assert_eq!(code(&gckit(p, &["game", "prop6", "--beta", "0.2", "--eps", "0.05", "--pitch", "0.01"])), 2);
    let sweep = gckit(
        p,
        &[
            "--format",
            "csv",
            "game",
            "gadget-sweep",
            "--kind",
            "not",
            "--eps",
            "0.05",
            "--beta",
            "0.3",
            "--pitch",
            "0.25",
        ],
    );
    let out = stdout(&sweep);
    assert_eq!(out.lines().next().unwrap(), "a,u0,u1,pv_lo,pv_hi,row_ok");
    assert_eq!(out.lines().count(), 6);
}

#[test]
fn fixtures_list_write_and_check() {
    let d = tempfile::tempdir().unwrap();
    let list = stdout(&gckit(d.path(), &["fixtures"]));
    for name in ["prop1", "issue2", "issue3", "issue4", "footnote9", "prop5"] {
        assert!(list.lines().any(|l| l.starts_with(&format!("{name}:"))), "{name}");
    }
    let all = gckit(d.path(), &["fixtures", "--check-all"]);
    assert_eq!(code(&all), 0, "{}", stdout(&all));
    assert!(stdout(&all).lines().all(|l| l.starts_with("PASS")));
    assert_eq!(code(&gckit(d.path(), &["fixtures", "issue3", "--dir", "out"])), 0);
    let check = gckit(d.path(), &["fixtures", "--check", "out/issue3.manifest"]);
    assert_eq!(code(&check), 0, "{}", stdout(&check));
}

#[test]
fn output_is_independent_of_jobs() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    fs::write(p.join("loop.gc"), "input a;\nb = not(c);\nc = add(b, a);\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["--format", "csv", "game", "prop6", "--beta", "0.3", "--eps", "0.05", "--pitch", "0.02"],
        vec![
            "--format",
            "csv",
            "game",
            "gadget-sweep",
            "--kind",
            "and",
            "--eps",
            "0.05",
            "--beta",
            "0.3",
            "--pitch",
            "0.05",
        ],
        vec!["solve", "--circuit", "loop.gc", "--concept", "strong", "--eps", "0.1"],
        vec!["certify", "--gadget", "or", "--eps", "0.1"],
    ];
    for args in runs {
        let outs: Vec<(i32, String)> = ["1", "4"]
            .iter()
            .map(|j| {
                let mut a = vec!["--jobs", j];
                a.extend(&args);
                let o = gckit(p, &a);
                (code(&o), stdout(&o))
            })
            .collect();
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
    assert_eq!(code(&gckit(p, &["--jobs", "0", "fixtures"])), 2);
}
