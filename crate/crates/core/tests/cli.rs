use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jacketopt"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().unwrap()
}

fn model_args() -> Vec<String> {
    vec![
        "--model".into(),
        data("model.jct.json").display().to_string(),
        "--sections".into(),
        data("sections.sec.json").display().to_string(),
    ]
}

fn with(cmd: &str, extra: &[&str]) -> Output {
    let mut a = vec![cmd.to_string()];
    a.extend(model_args());
    a.extend(extra.iter().map(|s| s.to_string()));
    exe().args(&a).output().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["sweep", "--help"]).status.code(), Some(0));
}

#[test]
fn missing_model_is_a_user_error() {
    let out = run(&["gen", "--sections", "x.sec.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--model"));
}

#[test]
fn unknown_file_is_a_user_error() {
    let out = run(&["simulate", "--model", "nope.jct.json", "--sections", "nope.sec.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn zero_workers_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("m.json");
    let out = with("gen", &["--workers", "0", "--out", mesh.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_simulate_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mesh = d.join("mesh.json");
    assert!(with("gen", &["--out", mesh.to_str().unwrap()]).status.success());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&mesh).unwrap()).unwrap();
    assert!(m["nodes"].as_array().is_some_and(|n| !n.is_empty()));
    assert!(d.join("mesh.manifest.json").exists());

    let result = d.join("result.json");
    let out = with("simulate", &["--label", "ORIG", "--out", result.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.join("result.manifest.json")).unwrap()).unwrap();
    let inputs = manifest["inputs"].as_array().unwrap();
    assert!(inputs.iter().any(|i| i["source"] == "builtin:waves.json"));
    assert!(inputs.iter().all(|i| i["sha256"].as_str().unwrap().len() == 64));

    let rep = d.join("rep");
    let out = run(&[
        "report",
        result.to_str().unwrap(),
        "--strategy",
        "3",
        "--out",
        rep.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(rep.join("report.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("ORIG,1790.5,"));
    assert!(lines[2].starts_with("limits (strategy 3)"));
    assert!(rep.join("report.md").exists() && rep.join("margins.csv").exists());
}

#[test]
fn report_needs_baseline_for_relative_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let result = dir.path().join("r.json");
    assert!(with("simulate", &["--support", "fixed", "--out", result.to_str().unwrap()])
        .status
        .success());
    let out = run(&["report", result.to_str().unwrap(), "--strategy", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_names_missing_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"label": "x", "result": {}}"#).unwrap();
    let out = run(&["report", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mass_t"));
}

#[test]
fn batch_gen_writes_model_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = jacketopt::defaults::ga_config();
    let base = jacketopt::defaults::original_params();
    let x0 = cfg.grid.snap(&cfg.grid.values_of(&base).unwrap());
    let named = cfg.grid.named(&cfg.grid.decode(&x0));
    let batch = dir.path().join("vectors.json");
    std::fs::write(&batch, serde_json::to_string(&vec![named.clone(), named]).unwrap()).unwrap();
    let out_dir = dir.path().join("models");
    let out = with(
        "gen",
        &["--batch", batch.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..2 {
        assert!(out_dir.join(format!("model-{k:03}.jct.json")).exists());
        assert!(out_dir.join(format!("model-{k:03}.sec.json")).exists());
    }
    let a = std::fs::read(out_dir.join("model-000.sec.json")).unwrap();
    let b = std::fs::read(out_dir.join("model-001.sec.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tiny_optimize_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("ga");
    let out = with(
        "optimize",
        &[
            "--pop",
            "4",
            "--generations",
            "2",
            "--seed",
            "3",
            "--out",
            out_dir.to_str().unwrap(),
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["ga_history.csv", "best.jct.json", "best.sec.json", "deviations.csv", "summary.json", "manifest.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let hist = std::fs::read_to_string(out_dir.join("ga_history.csv")).unwrap();
    assert!(hist.lines().count() >= 2);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["attempts"][0]["seed"], 3);
}
