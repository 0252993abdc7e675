use std::fs;
use std::process::Command;

use harness::config::{Constants, ExperimentConfig};

fn cpdilute() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cpdilute"));
    cmd.env("CPDILUTE_THREADS", "1");
    cmd
}

#[test]
fn unknown_experiment_exits_with_code_two() {
    let out = cpdilute().args(["experiment", "no-such-thing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("griffiths-1d"));
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::preset("griffiths-1d").unwrap();
    cfg.graph.sizes = vec![300];
    cfg.replicates = 4;
    cfg.t_max = 50.0;
    cfg.constants = Some(Constants { gamma2: Some(0.5), ..Default::default() });
    let config = dir.path().join("config.json");
    fs::write(&config, cfg.to_json()).unwrap();

    let run = |name: &str| {
        let out = dir.path().join(name);
        let run = cpdilute()
            .args(["experiment", "griffiths-1d", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        fs::read(out.join("aggregate.csv")).unwrap()
    };
    let a = run("a");
    assert!(!a.is_empty());
    assert_eq!(a, run("b"));
}

#[test]
fn oracle_check_flags_a_skewed_rate() {
    let out = cpdilute()
        .args(["oracle-check", "--replicates", "20000", "--lambda-skew", "0.2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL k2_simulation"));
}

#[test]
fn gen_writes_an_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let run = cpdilute()
        .args(["gen", "--family", "path1d", "--size", "5", "--mode", "bond", "--p", "1", "--seed", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n 5 "));
    assert_eq!(lines.count(), 4);
}
