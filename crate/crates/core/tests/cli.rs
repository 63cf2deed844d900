use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starcons")).args(args).env_remove("STARCONS_THREADS").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn number(s: &str) -> f64 {
    s.trim().parse().unwrap()
}

#[test]
fn slem_examples() {
    let s = number(&stdout(&["slem", "--topology", "symmetric-star", "--m", "3", "--n", "3"]));
    assert!((s - 0.91294).abs() < 1e-5);
    let s = number(&stdout(&["slem", "--topology", "kcs-star", "--m", "3", "--n", "3", "--k", "2"]));
    assert!((s - 0.893816).abs() < 1e-6);
    let s = number(&stdout(&["slem", "--topology", "symmetric-star", "--m", "3", "--n", "3", "--method", "eigen"]));
    assert!((s - 0.91294).abs() < 1e-5);
}

#[test]
fn slem_check_reports_both_methods() {
    let out = stdout(&["slem", "--topology", "ccs-star", "--m", "2", "--n", "7", "--check"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("closed_form,eigen,difference"));
    let v: Vec<f64> = lines.next().unwrap().split(',').map(number).collect();
    assert!((v[0] - 0.866025).abs() < 1e-6);
    assert!((v[1] - 0.866025).abs() < 1e-6);
    assert!(v[2] < 1e-9);
}

#[test]
fn k_max_grid_table() {
    let out = stdout(&["table", "--id", "1"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,m=1,m=2,m=3,m=4,m=5,m=6,m=7,m=8");
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[1], "2,2,7,15,26,41,58,79,104");
}

#[test]
fn slem_comparison_table() {
    let out = stdout(&["table", "--id", "2"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        assert!((number(f[2]) - number(f[4])).abs() < 1e-5, "{r}");
    }
}

#[test]
fn quantized_table_shape() {
    let out = stdout(&["table", "--id", "3", "--trials", "200", "--seed", "42"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 13);
    let cols = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols));
    let out =
        stdout(&["table", "--id", "4", "--trials", "50", "--bits", "8", "--weighting", "optimal", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
}

#[test]
fn curve_figure() {
    assert_eq!(stdout(&["fig", "--id", "2", "--k-max-only"]).trim(), "15");
    let out = stdout(&["fig", "--id", "2"]);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("k,slem"));
    let best = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse::<usize>().unwrap(), number(f[1]))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert_eq!(best.0, 15);
}

#[test]
fn trajectory_figure() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("traj");
    stdout(&["fig", "--id", "4", "--seed", "7", "--out", prefix.to_str().unwrap()]);
    let last_row = |name: &str| {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let last = text.lines().last().unwrap().to_string();
        last.split(',').skip(1).map(number).collect::<Vec<f64>>()
    };
    let p = last_row("traj_probabilistic.csv");
    assert!(p.iter().all(|&x| x == p[0]));
    let u = last_row("traj_uniform.csv");
    assert!(u.iter().any(|&x| x != u[0]));
}

#[test]
fn verify_suites_pass() {
    for suite in ["slackness", "interlacing", "stratification"] {
        let out = run(&["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(!v[0]["cases"].as_array().unwrap().is_empty());
    }
}

#[test]
fn simulate_flags_and_config_agree() {
    let flags = stdout(&[
        "simulate",
        "--topology",
        "symmetric-star",
        "--m",
        "2",
        "--n",
        "3",
        "--weighting",
        "optimal",
        "--bits",
        "4",
        "--trials",
        "300",
        "--seed",
        "9",
    ]);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"topology":{"family":"symmetric-star","m":2,"n":3},"weighting":"optimal","bits":4,"scheme":"probabilistic","trials":300,"seed":9}"#,
    )
    .unwrap();
    assert_eq!(stdout(&["simulate", "--config", cfg.to_str().unwrap()]), flags);
    assert!(flags
        .starts_with("bits,weighting,scheme,psi,eta,mu,rho,trials,consensus_trials,seed\n4,optimal,probabilistic,"));
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"topology":{"family":"symmetric-star","m":2,"n":3},"colour":"blue"}"#).unwrap();
    assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn graph_weights_and_spectrum() {
    let g = stdout(&["graph", "--topology", "symmetric-star", "--m", "3", "--n", "5"]);
    assert_eq!(g.lines().count(), 16);
    let w = stdout(&["weights", "--topology", "symmetric-star", "--m", "3", "--n", "5", "--format", "dense"]);
    assert_eq!(w.lines().count(), 16);
    assert!((number(w.lines().next().unwrap().split(',').next().unwrap()) + 3.0 / 7.0).abs() < 1e-15);
    let s = stdout(&["spectrum", "--topology", "symmetric-star", "--m", "3", "--n", "5"]);
    let vals: Vec<f64> = s.lines().skip(1).map(number).collect();
    assert_eq!(vals.len(), 16);
    assert!(vals.windows(2).all(|p| p[0] >= p[1]));
    let json = stdout(&["weights", "--topology", "ccs-star", "--m", "2", "--n", "4", "--format", "json"]);
    serde_json::from_str::<serde_json::Value>(&json).unwrap();
}

#[test]
fn charfn_and_kmax() {
    let out = stdout(&["charfn", "--family", "symmetric-star", "--m", "3", "--n", "3", "--points", "50"]);
    assert_eq!(out.lines().next(), Some("theta,residual"));
    assert_eq!(out.lines().count(), 51);
    assert_eq!(stdout(&["kmax", "--m", "3", "--n", "2"]).trim(), "15");
}

#[test]
fn optimize_and_slackness_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("h.csv");
    let out = stdout(&[
        "optimize",
        "--topology",
        "symmetric-star",
        "--m",
        "2",
        "--n",
        "3",
        "--history",
        hist.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["slem"].as_f64().unwrap() - v["closed_form_slem"].as_f64().unwrap()).abs() < 1e-3);
    assert!(std::fs::read_to_string(hist).unwrap().starts_with("iteration,best_slem"));
    let v: serde_json::Value = serde_json::from_str(&stdout(&["slackness", "--m", "3", "--n", "5"])).unwrap();
    for (_, r) in v["residuals"].as_object().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["table", "--id", "9"]).status.code(), Some(1));
    assert_eq!(run(&["slem", "--topology", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["slem", "--topology", "symmetric-star", "--m", "0"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(1));
}

#[test]
fn help_lists_defaults() {
    let help = String::from_utf8(run(&["table", "--help"]).stdout).unwrap();
    assert!(help.contains("[default: 10000]"));
    assert!(help.contains("[default: 42]"));
    let help = String::from_utf8(run(&["fig", "--help"]).stdout).unwrap();
    assert!(help.contains("[default: 30]"));
}
