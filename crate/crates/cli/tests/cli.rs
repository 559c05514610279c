use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-fem"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&read(path)).unwrap()
}

fn error_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text
        .lines()
        .find(|l| l.starts_with('{'))
        .expect("error JSON on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn spectrum_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = run(&[
            "spectrum",
            "--n",
            "150",
            "--levels",
            "4",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for f in ["spectrum.csv", "spectrum.json"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
    let csv = read(&a.join("spectrum.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "level,usual_fem,stabilized_fem,exact,label_usual,label_stab,rel_err_stab"
    );
    assert!(lines.all(|l| l.split(',').count() == 7));
    let report = json(&a.join("spectrum.json"));
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
    assert_eq!(report["settings"]["n"][0], 150);
}

#[test]
fn every_number_has_twelve_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "spectrum",
        "--n",
        "120",
        "--levels",
        "3",
        "--method",
        "supg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = read(&dir.path().join("spectrum.csv"));
    for line in csv.lines().skip(1) {
        for (i, field) in line.split(',').enumerate() {
            if i == 0 || field.is_empty() || field.starts_with(|c: char| c.is_alphabetic()) {
                continue;
            }
            let mantissa = field.split('e').next().unwrap();
            let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
            assert!(digits.trim_start_matches('0').len() >= 12, "{field}");
        }
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"n": 130, "levels": 4, "method": "supg", "format": ["json"]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--levels",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!out_dir.join("spectrum.csv").exists());
    let report = json(&out_dir.join("spectrum.json"));
    assert_eq!(report["settings"]["n"][0], 130);
    assert_eq!(report["settings"]["levels"], 2);
    assert_eq!(report["settings"]["method"], "supg");
    assert_eq!(report["settings"]["b"].as_f64(), Some(48.0));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"nodes": 100}"#).unwrap();
    let out = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["kind"], "config");
}

#[test]
fn invalid_inputs_exit_with_code_two() {
    for args in [
        &["spectrum", "--kappa", "0"][..],
        &["spectrum", "--epsilon", "-1"],
        &["spectrum", "--n", "100,200"],
        &["spectrum", "--no-such-flag"],
        &["pollution-report", "--method", "supg"],
        &["spectrum", "--c", "calibrate", "--z", "80"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_json(&out)["error"]["exit_code"], 2);
    }
}

#[test]
fn empty_window_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "spectrum",
        "--b",
        "0.0001",
        "--n",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"]["kind"], "numerical");
}

#[test]
fn kappa_minus_one_prints_caveat() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "spectrum",
        "--z",
        "1",
        "--kappa",
        "-1",
        "--method",
        "supg",
        "--n",
        "100",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Dirichlet only"), "{err}");
    let report = json(&dir.path().join("spectrum.json"));
    assert!(!report["caveats"].as_array().unwrap().is_empty());
}

#[test]
fn two_point_convergence_is_low_confidence() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "convergence",
        "--n",
        "100,200",
        "--levels",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(&dir.path().join("convergence_supg.csv"));
    assert!(csv.starts_with("level,n100,n200,exact,rate,rate_points,low_confidence\n"));
    assert!(csv.lines().nth(1).unwrap().ends_with(",2,true"));
    let tsv = read(&dir.path().join("convergence_supg.tsv"));
    assert_eq!(tsv.lines().next().unwrap(), "n\tlevel\trel_error");
    assert_eq!(tsv.lines().count(), 5);
    let report = json(&dir.path().join("convergence.json"));
    let slope = report["studies"][0]["levels"][0]["rate"]["slope"]
        .as_f64()
        .unwrap();
    assert!(slope < -1.5, "{slope}");
}

#[test]
fn convergence_needs_two_counts() {
    let out = run(&["convergence", "--n", "200"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pollution_report_counts_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "pollution-report",
        "--z",
        "1",
        "--kappa",
        "-2",
        "--n",
        "100",
        "--levels",
        "3",
        "--b",
        "120",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&dir.path().join("pollution_report.json"));
    assert!(report["spurious"]["galerkin"]["instilled"].is_u64());
    assert!(report["spurious"]["supg"]["coincidence"].is_u64());
}

#[test]
fn extended_writes_kappa_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "extended",
        "--kappas",
        "-2,2,-3",
        "--n",
        "200",
        "--levels",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(&dir.path().join("extended_supg.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "row,kappa=-2,kappa=2,kappa=-3");
    assert!(lines[1].starts_with("1,-1829.6"));
    assert!(lines[1].ends_with(",,"));
    assert!(lines[3].split(',').all(|f| !f.is_empty()));
    let point = run(&["extended", "--nucleus", "point"]);
    assert_eq!(point.status.code(), Some(2));
}

#[test]
fn calibrate_reports_light_speed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["calibrate-c", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let report = json(&dir.path().join("calibration.json"));
    let c = report["light_speed"].as_f64().unwrap();
    assert!((137.0359..137.0361).contains(&c));
    assert!(report["max_relative_error"].as_f64().unwrap() <= 1e-10);
    assert!(report["default_max_relative_error"].as_f64().unwrap() <= 5e-7);
    assert_eq!(report["targets"].as_array().unwrap().len(), 29);
}

#[test]
fn pencil_dump_is_triplets() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("pencil");
    let out = run(&[
        "spectrum",
        "--method",
        "galerkin",
        "--n",
        "60",
        "--levels",
        "1",
        "--dump-pencil",
        dump.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let left = read(&dump.join("galerkin_kappa-2_n60_left.csv"));
    assert_eq!(left.lines().next().unwrap(), "row,col,value");
    let entries: std::collections::HashMap<(usize, usize), f64> = left
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                (f[0].parse().unwrap(), f[1].parse().unwrap()),
                f[2].parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(entries.len(), 2 * (2 * (3 * 60 - 2)));
    for ((i, j), v) in &entries {
        let t = entries[&(*j, *i)];
        assert!((v - t).abs() <= 1e-11 * v.abs().max(1.0), "({i},{j})");
    }
    assert!(dump.join("galerkin_kappa-2_n60_right.csv").exists());
}
