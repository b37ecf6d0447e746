use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tightframe_cli::bankfile::BankFile;
use tightframe_cli::bundled::bundled;
use tightframe_cli::{execute, RunConfig, SubcommandKind};

fn tool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tightframe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_bank(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.bank.json"));
    bundled(name).unwrap().write(&path).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn haar_uep_passes_with_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let bank = write_bank(dir.path(), "haar");
    let out = tool(&["--out", s(dir.path()), "verify-uep", s(&bank)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-uep.report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert!(report["report"]["max_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["config"]["grid"], 4096);
    assert_eq!(report["config"]["tol_uep"], 1e-12);
    assert!(dir.path().join("verify-uep.worst.csv").exists());
}

#[test]
fn perturbed_highpass_fails_with_worst_points() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = bundled("haar").unwrap();
    for c in file.filters[1].coefficients.as_mut().unwrap() {
        c.re *= 0.9;
    }
    let bank = dir.path().join("perturbed.bank.json");
    file.write(&bank).unwrap();
    let out = tool(&["--out", s(dir.path()), "verify-uep", s(&bank)]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL") && stdout.contains("worst t"), "{stdout}");
}

#[test]
fn counterexample_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = tool(&["--out", s(dir.path()), "counterexample", "--j", "1..6"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(dir.path().join("counterexample.table.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(&row[0], (i + 1).to_string());
        assert_eq!(&row[1], "4");
        let pairing: f64 = row[2].parse().unwrap();
        let one: f64 = row[3].parse().unwrap();
        assert!(pairing > one && (one - 3.0).abs() < 1e-6);
    }
}

#[test]
fn bank_round_trip_reproduces_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::default();
    for name in ["linear-spline", "haar-oep"] {
        let first = write_bank(dir.path(), name);
        let reread = BankFile::read(&first).unwrap();
        let second = dir.path().join(format!("{name}.copy.json"));
        reread.write(&second).unwrap();
        assert_eq!(std::fs::read_to_string(&first).unwrap(), std::fs::read_to_string(&second).unwrap());
        let kind = if name == "haar-oep" { SubcommandKind::VerifyOep } else { SubcommandKind::VerifyUep };
        let a = execute(kind, Some(&first), &config, dir.path()).unwrap();
        let b = execute(kind, Some(&second), &config, dir.path()).unwrap();
        assert_eq!(a.report.max_residual.to_bits(), b.report.max_residual.to_bits());
        assert_eq!(a.report.verdict, b.report.verdict);
    }
}

#[test]
fn completion_output_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let bank = write_bank(dir.path(), "haar");
    let out = tool(&["--out", s(dir.path()), "--grid", "1024", "complete", s(&bank)]);
    assert_eq!(out.status.code(), Some(0));
    let completed = dir.path().join("complete.bank.json");
    // lowpass stays a polynomial; the completed highpasses are grid samples
    let file = BankFile::read(&completed).unwrap();
    assert_eq!(file.filters.len(), 3);
    assert!(file.filters[0].coefficients.is_some());
    assert!(file.filters[1..].iter().all(|f| f.samples.as_ref().is_some_and(|s| s.resolution == 1024)));
    let out = tool(&["--out", s(dir.path()), "verify-uep", s(&completed)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes_separate_parse_and_precondition_failures() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(tool(&["--out", s(dir.path()), "verify-uep", s(&garbage)]).status.code(), Some(2));
    assert_eq!(tool(&["--out", s(dir.path()), "verify-uep", "/nonexistent/bank.json"]).status.code(), Some(2));
    assert_eq!(tool(&["--bogus-flag"]).status.code(), Some(2));
    assert_eq!(tool(&["--range", "5..1", "counterexample"]).status.code(), Some(2));

    let haar = write_bank(dir.path(), "haar");
    // no weight in the Haar bank
    assert_eq!(tool(&["--out", s(dir.path()), "verify-oep", s(&haar)]).status.code(), Some(3));
    assert_eq!(
        tool(&["--out", s(dir.path()), "--tol", "0", "verify-uep", s(&haar)]).status.code(),
        Some(3)
    );

    let mut flat = bundled("haar").unwrap();
    flat.dilation = vec![1];
    let path = dir.path().join("flat.bank.json");
    flat.write(&path).unwrap();
    assert_eq!(tool(&["--out", s(dir.path()), "verify-uep", s(&path)]).status.code(), Some(3));

    let mut wrong = bundled("quincunx-haar").unwrap();
    wrong.gamma_dual = Some(vec![vec!["0".into(), "0".into()], vec!["1/2".into(), "0".into()]]);
    let path = dir.path().join("wrong.bank.json");
    wrong.write(&path).unwrap();
    assert_eq!(tool(&["--out", s(dir.path()), "verify-uep", s(&path)]).status.code(), Some(3));

    let mut sub_qmf = bundled("haar").unwrap();
    for c in sub_qmf.filters[0].coefficients.as_mut().unwrap() {
        c.re *= 1.1;
    }
    let path = dir.path().join("loud.bank.json");
    sub_qmf.write(&path).unwrap();
    assert_eq!(tool(&["--out", s(dir.path()), "complete", s(&path)]).status.code(), Some(3));
}

#[test]
fn config_file_is_applied_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let bank = write_bank(dir.path(), "haar");
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{ "grid": 256, "tol_uep": 1e-9 }"#).unwrap();
    let out = tool(&["--out", s(dir.path()), "--config", s(&cfg), "--grid", "512", "verify-uep", s(&bank)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-uep.report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["grid"], 512);
    assert_eq!(report["config"]["tol_uep"], 1e-9);

    std::fs::write(&cfg, r#"{ "unknown_key": 1 }"#).unwrap();
    let out = tool(&["--out", s(dir.path()), "--config", s(&cfg), "verify-uep", s(&bank)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn odd_grid_is_raised_to_a_compatible_size() {
    let dir = tempfile::tempdir().unwrap();
    let bank = write_bank(dir.path(), "haar");
    let out = tool(&["--out", s(dir.path()), "--grid", "1023", "verify-uep", s(&bank)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-uep.report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["grid"], 1024);
}

#[test]
fn bundled_matrix_matches_expected_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = tool(&["--out", s(dir.path()), "examples", "--selftest"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    let mut reader = csv::Reader::from_path(dir.path().join("selftest.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 31);
    assert!(rows.iter().all(|r| &r[4] == "true"));
    for name in ["haar", "linear-spline", "shannon-fmra", "quincunx-haar"] {
        assert!(rows.iter().filter(|r| &r[0] == name).count() >= 7);
    }
}
