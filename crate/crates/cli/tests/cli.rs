use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_newton-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn polygon_and_hasse_commands() {
    let o = run(&["polygon", "--p", "7", "--d", "2", "--e", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("arithmetic = hodge"));
    assert!(stdout(&o).contains("vertices: [0, 1, 2, 3]"));
    let o = run(&["hasse", "--p", "11", "--d", "3", "--e", "1"]);
    assert!(stdout(&o).starts_with("H = 9·x_1·x_3³·x_{-1}"));
    let o = run(&["polygon", "--p", "6", "--d", "2", "--e", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not prime"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&[
        "verify",
        "--p",
        "7",
        "--d",
        "2",
        "--e",
        "1",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("instances: 252"));
    for f in ["report.json", "instances.csv", "run_stats.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let o = run(&[
        "verify",
        "--p",
        "11",
        "--d",
        "3",
        "--e",
        "1",
        "--a",
        "1,0,0,1,1",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("GenericMatch"));
    let o = run(&[
        "verify", "--p", "11", "--d", "3", "--e", "1", "--mode", "sample", "--count", "3",
        "--seed", "1", "--guard", "100",
    ]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&[
        "verify", "--p", "11", "--d", "3", "--e", "1", "--mode", "sample", "--count", "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"p": 7, "d": 3, "e": 2, "mode": "sample", "count": 20, "seed": 5}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&[
            "verify",
            "--config",
            path(&cfg),
            "--seed",
            "6",
            "--out",
            path(out),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("threshold p >= 3D not met"));
    }
    let ra = fs::read_to_string(a.join("report.json")).unwrap();
    assert_eq!(ra, fs::read_to_string(b.join("report.json")).unwrap());
    assert!(ra.contains("\"seed\": 6"));
}

#[test]
fn cache_hits_reproduce_results() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let args = |out: &str| {
        vec![
            "verify".to_string(),
            "--p".into(),
            "11".into(),
            "--d".into(),
            "3".into(),
            "--e".into(),
            "1".into(),
            "--mode".into(),
            "sample".into(),
            "--count".into(),
            "30".into(),
            "--seed".into(),
            "2".into(),
            "--cache".into(),
            path(&cache).into(),
            "--spot-check".into(),
            "0.5".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let cold = dir.path().join("cold");
    let warm = dir.path().join("warm");
    let o1 = Command::new(env!("CARGO_BIN_EXE_newton-lab"))
        .args(args(path(&cold)))
        .output()
        .unwrap();
    let o2 = Command::new(env!("CARGO_BIN_EXE_newton-lab"))
        .args(args(path(&warm)))
        .output()
        .unwrap();
    assert_eq!(o1.status.code(), o2.status.code());
    assert_eq!(
        fs::read_to_string(cache.as_path()).unwrap().lines().count(),
        30
    );
    assert_eq!(
        fs::read_to_string(cold.join("report.json")).unwrap(),
        fs::read_to_string(warm.join("report.json")).unwrap()
    );
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(warm.join("run_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["cache_hits"], 30);
    assert_eq!(stats["cache_spot_checks"], 15);
    fs::write(&cache, "garbage\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_newton-lab"))
        .args(args(path(&warm)))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn crosscheck_and_oracle() {
    let o = run(&[
        "crosscheck",
        "--p",
        "7",
        "--d",
        "2",
        "--e",
        "1",
        "--mode",
        "sample",
        "--count",
        "5",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("identical: 5/5"));
    let o = run(&[
        "crosscheck",
        "--p",
        "7",
        "--d",
        "2",
        "--e",
        "1",
        "--mode",
        "sample",
        "--count",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("identical: 0/0"));
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "oracle",
        "--p",
        "7",
        "--d",
        "2",
        "--e",
        "1",
        "--a",
        "1,0,2,3",
        "--engines",
        "both",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NP: (0,0),(1,0),(2,1/2),(3,3/2)"));
    let diag: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("diagnostics/a_1_0_2_3.json")).unwrap(),
    )
    .unwrap();
    assert!(diag["gamma"].as_array().unwrap().len() > 10);
    assert!(diag["matrix_valuations"].as_array().is_some());
}

#[test]
fn dwork_only_campaign() {
    let o = run(&[
        "verify",
        "--p",
        "7",
        "--d",
        "2",
        "--e",
        "1",
        "--mode",
        "sample",
        "--count",
        "4",
        "--seed",
        "3",
        "--engines",
        "dwork",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("NP = arithmetic: 4"));
}
