use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schroedsym"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("schroedsym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_group_passes() {
    let out = run(&["verify", "group", "--seed", "7"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("group.associativity") && text.contains("0 failed"));
}

#[test]
fn verify_liealg_linear_example() {
    let out = run(&[
        "verify", "liealg", "--family", "linear", "--k", "1", "--alpha", "0", "--beta", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("K1 = L+ - kT1^2") && text.contains("I3 = 3/16"));
    assert!(!text.contains("liealg.quadratic"));
}

#[test]
fn same_seed_same_json() {
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    for p in [&a, &b] {
        let out = run(&[
            "verify",
            "all",
            "--seed",
            "11",
            "--format",
            "json",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let parsed: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    let checks = parsed.as_array().unwrap();
    assert!(checks.len() > 100);
    for c in checks {
        for field in ["name", "anchor", "pass", "value", "tol", "seconds"] {
            assert!(c.get(field).is_some(), "missing {field}");
        }
    }
    let report = run(&["report", a.to_str().unwrap(), "--format", "text"]);
    assert_eq!(report.status.code(), Some(0));
}

#[test]
fn failing_check_exits_one() {
    let out = run(&[
        "verify", "residual", "--family", "linear", "--trials", "2", "--tol", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));

    let path = scratch("failing.json");
    let json = r#"[{"name":"x","anchor":"a","pass":false,"value":1.0,"tol":0.5,"seconds":0.0}]"#;
    std::fs::write(&path, json).unwrap();
    let out = run(&["report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("FAILED x"));
}

#[test]
fn empty_report_exits_zero() {
    let path = scratch("empty.json");
    std::fs::write(&path, "[]").unwrap();
    let out = run(&["report", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(run(&["verify", "nothing"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "group", "--k", "0"]).status.code(), Some(2));
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "seed = 3\nomega = fast\n").unwrap();
    let out = run(&["verify", "group", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("omega"), "{err}");
}

#[test]
fn flags_win_over_config_file() {
    let cfg = scratch("good.cfg");
    std::fs::write(&cfg, "# run settings\nformat = json\nfamily = quadratic\n").unwrap();
    let out = run(&[
        "verify",
        "liealg",
        "--config",
        cfg.to_str().unwrap(),
        "--family",
        "linear",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with('['));
    assert!(text.contains("liealg.linear") && !text.contains("liealg.quadratic"));
}

fn records(path: &PathBuf) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn demo_identity_reproduces_input() {
    let path = scratch("identity.txt");
    let out = run(&[
        "demo-transform",
        "--element",
        "identity",
        "--solution",
        "f1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = records(&path);
    assert_eq!(rows.len(), 200);
    for r in &rows {
        assert_eq!(r.len(), 7);
        assert_eq!((r[5], r[6]), (1.0, 0.0));
    }
}

#[test]
fn demo_random_element_keeps_residual_small() {
    let path = scratch("random.txt");
    let out = run(&[
        "demo-transform",
        "--solution",
        "f1",
        "--seed",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for r in records(&path) {
        let scale = r[2].hypot(r[3]);
        assert!(r[4] <= 1e-9 * scale);
    }
}

#[test]
fn demo_theta_ratio_is_an_eighth_root_of_unity() {
    let path = scratch("theta.txt");
    let out = run(&[
        "demo-transform",
        "--solution",
        "theta",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = records(&path);
    let (re0, im0) = (rows[0][5], rows[0][6]);
    let arg = im0.atan2(re0) * 8.0;
    assert!((arg.sin()).abs() < 1e-8 && (arg.cos() - 1.0).abs() < 1e-8);
    for r in &rows {
        assert!((r[5] - re0).abs() < 1e-9 && (r[6] - im0).abs() < 1e-9);
    }
}
