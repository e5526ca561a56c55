use std::path::Path;
use std::process::{Command, Output};

use jch_cli::config::KEY_DOCS;

fn jch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jch"))
        .args(args)
        .env_remove("JCH_THREADS")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn run_to(args: &[&str], path: &Path) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--out", p]);
    let out = jch(&full);
    assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    out
}

const SMALL_GRID: [&str; 6] = [
    "--set",
    "grid.delta_points=9",
    "--set",
    "grid.delta_c_points=4",
    "--set",
    "model.n_sites=3",
];

#[test]
fn measure_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    run_to(&["measure", "--seed", "42"], &a);
    run_to(&["measure", "--seed", "42"], &b);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["shots"], 10_000);
    assert_eq!(v["counts"].as_array().unwrap().len(), 4);
    assert_eq!(v["p"].as_array().unwrap().len(), 4);
    assert!(v["var"].is_f64());
    let c = dir.path().join("c.json");
    run_to(&["measure", "--seed", "43"], &c);
    assert_ne!(bytes, std::fs::read(&c).unwrap());
}

#[test]
fn measure_on_mott_state_has_zero_variance() {
    let out = jch(&[
        "measure",
        "--seed",
        "1",
        "--set",
        "measure.state=mott",
        "--set",
        "model.delta=-2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["var"].as_f64(), Some(0.0));
    assert_eq!(v["counts"], serde_json::json!([0, 10000, 0, 0]));
}

#[test]
fn measure_requires_a_seed() {
    assert_eq!(jch(&["measure"]).status.code(), Some(2));
}

#[test]
fn scan_output_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let mut one = vec!["scan", "--threads", "1"];
    one.extend(SMALL_GRID);
    let mut four = vec!["scan", "--threads", "4"];
    four.extend(SMALL_GRID);
    run_to(&one, &a);
    run_to(&four, &b);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("delta,delta_c,n_sites,model,var,ratio,ground_energy,degenerate")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 36);
    assert!(rows[0].starts_with("-5,10,3,effective,"));
}

#[test]
fn scan_json_mirrors_csv_fields() {
    let mut args = vec!["scan", "--format", "json"];
    args.extend(SMALL_GRID);
    let out = jch(&args);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 36);
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    for k in [
        "delta",
        "delta_c",
        "n_sites",
        "model",
        "var",
        "ratio",
        "ground_energy",
        "degenerate",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

#[test]
fn ratio_map_leaves_var_empty() {
    let out = jch(&[
        "ratio",
        "--set",
        "grid.delta_points=3",
        "--set",
        "grid.delta_c_points=2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[4], "");
    assert_eq!(fields[6], "");
}

#[test]
fn exit_codes() {
    // unknown key
    assert_eq!(
        jch(&["scan", "--set", "grid.bogus=1"]).status.code(),
        Some(2)
    );
    // effective model outside its validity bound
    assert_eq!(
        jch(&["spectrum", "--set", "model.delta_c=5"]).status.code(),
        Some(2)
    );
    // full-model scan above the configured guard
    let out = jch(&[
        "scan",
        "--set",
        "grid.model=full",
        "--set",
        "model.n_sites=4",
        "--set",
        "grid.max_dim=500",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    // integration step far beyond stability
    let out = jch(&["sweep", "--set", "ramp.dt=2.0"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("try dt"));
    // unwritable output
    let out = jch(&["spectrum", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    // svg only for plot commands
    assert_eq!(jch(&["spectrum", "--svg"]).status.code(), Some(2));
    // malformed thread count in the environment
    let out = Command::new(env!("CARGO_BIN_EXE_jch"))
        .args(["spectrum"])
        .env("JCH_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_win_over_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[model]\ndelta_c = 20.0\n\n[spectrum]\nlevels = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = jch(&["spectrum", "--config", c, "--format", "json"]);
    assert!(from_file.status.success());
    let v: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    assert_eq!(v["kappa"].as_f64(), Some(0.05));
    assert_eq!(v["energies"].as_array().unwrap().len(), 3);
    let overridden = jch(&[
        "spectrum",
        "--config",
        c,
        "--format",
        "json",
        "--set",
        "model.delta_c=40",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&overridden.stdout).unwrap();
    assert_eq!(v["kappa"].as_f64(), Some(0.025));
    std::fs::write(&cfg, "[model]\ndelta_k = 20.0\n").unwrap();
    assert_eq!(jch(&["spectrum", "--config", c]).status.code(), Some(2));
}

#[test]
fn size_figure_has_three_labeled_curves() {
    let out = jch(&["sizes", "--svg", "--set", "sizes.points=11"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert_eq!(svg.matches("class=\"legend\"").count(), 3);
    for label in ["n = 2", "n = 3", "n = 4"] {
        assert!(svg.contains(label));
    }
}

#[test]
fn phase_figures_render() {
    let mut args = vec!["boundary", "--svg"];
    args.extend(SMALL_GRID);
    let out = jch(&args);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains("<circle"));
    assert!(svg.contains("kappa/U_eff = 0.28"));
    let out = jch(&[
        "ratio",
        "--svg",
        "--set",
        "grid.delta_points=21",
        "--set",
        "grid.delta_c_points=11",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("<path d=\"M"));
}

#[test]
fn sweep_summary_reports_adiabatic_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = run_to(&["sweep"], &path);
    let summary = stderr(&out);
    let fidelity: f64 = summary
        .split("final fidelity ")
        .nth(1)
        .and_then(|s| s.split(',').next())
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| panic!("no fidelity in `{summary}`"));
    assert!(fidelity >= 0.99, "{summary}");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,fidelity,norm,var_site0\n"));
    assert_eq!(text.lines().count(), 102);
}

#[test]
fn help_documents_every_config_key() {
    let sections = [
        ("spectrum", vec!["model", "spectrum", "run"]),
        ("scan", vec!["model", "grid", "run"]),
        ("ratio", vec!["model", "grid", "run"]),
        ("boundary", vec!["model", "grid", "boundary", "run"]),
        ("compare", vec!["model", "compare", "run"]),
        ("sizes", vec!["model", "sizes", "run"]),
        ("sweep", vec!["model", "ramp", "run"]),
        ("measure", vec!["model", "measure", "run"]),
    ];
    let mut seen = std::collections::BTreeSet::new();
    for (cmd, used) in &sections {
        let out = jch(&[cmd, "--help"]);
        assert!(out.status.success());
        let help = String::from_utf8(out.stdout).unwrap();
        for flag in [
            "--config",
            "--out",
            "--format",
            "--svg",
            "--seed",
            "--threads",
            "--set",
        ] {
            assert!(help.contains(flag), "{cmd} --help lacks {flag}");
        }
        for (key, _, _) in KEY_DOCS {
            if used.contains(&key.split('.').next().unwrap()) {
                assert!(help.contains(key), "{cmd} --help lacks {key}");
                seen.insert(*key);
            }
        }
    }
    assert_eq!(seen.len(), KEY_DOCS.len());
}
