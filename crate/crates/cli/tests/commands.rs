//! Drives the `meshtopo` binary through a full generate-to-render chain.

use std::path::Path;
use std::process::{Command, Output};

fn meshtopo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshtopo"))
        .current_dir(dir)
        .env_remove("MESH_TOPO_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = meshtopo(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn chain(dir: &Path) {
    ok(dir, &["generate", "-n", "60", "--seed", "4", "-o", "dep.json"]);
    ok(dir, &["build", "dep.json", "--strategy", "original", "-o", "orig.json"]);
    ok(dir, &["build", "dep.json", "--strategy", "dt", "-o", "dt.json", "--voronoi-out", "vor.json"]);
    ok(dir, &["prune", "dt.json", "--max-priority", "3", "-o", "sd.json", "--log", "log.json"]);
    ok(dir, &["sweep", "orig.json", "-o", "cross.json"]);
    ok(dir, &["analyze", "sd.json", "-o", "report.json", "--csv", "metrics.csv"]);
    ok(dir, &["simulate", "sd.json", "--flows", "8", "--duration", "2", "--flow-topology", "orig.json", "-o", "sim.csv"]);
    ok(dir, &["render", "dt.json", "--voronoi", "-o", "dt.svg"]);
}

const FILES: [&str; 11] = [
    "dep.json", "orig.json", "dt.json", "vor.json", "sd.json", "log.json", "cross.json", "report.json", "metrics.csv",
    "sim.csv", "dt.svg",
];

#[test]
fn subcommands_compose_and_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    chain(a.path());
    chain(b.path());
    for f in FILES {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
    let log: serde_json::Value = serde_json::from_str(&read(a.path(), "log.json")).unwrap();
    assert!(log.is_object());
    let metrics = read(a.path(), "metrics.csv");
    assert!(metrics.starts_with("kind,n,seed,total_degree,avg_degree,avg_range_m,avg_interference_rate,crossings\n"));
    assert!(metrics.lines().nth(1).unwrap().starts_with("dt,60,4,"));
    assert!(read(a.path(), "dt.svg").starts_with("<svg"));
}

#[test]
fn seed_flag_wins_over_environment() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    let run_env = |seed: &str, extra: &[&str], out: &str| {
        let mut args = vec!["generate", "-n", "20", "-o", out];
        args.extend_from_slice(extra);
        let status = Command::new(env!("CARGO_BIN_EXE_meshtopo"))
            .current_dir(dir)
            .env("MESH_TOPO_SEED", seed)
            .args(&args)
            .status()
            .unwrap();
        assert!(status.success());
    };
    run_env("9", &[], "env9.json");
    run_env("3", &["--seed", "9"], "flag9.json");
    run_env("3", &[], "env3.json");
    assert_eq!(read(dir, "env9.json"), read(dir, "flag9.json"));
    assert_ne!(read(dir, "env9.json"), read(dir, "env3.json"));
}

#[test]
fn bad_input_exits_nonzero_with_a_diagnostic() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path();
    std::fs::write(dir.join("bad.json"), r#"{"area": {"w": 10, "h": 10}, "nodes": [{"id": 0, "x": 1, "y": 1}], "links": [[0, 7]]}"#)
        .unwrap();
    let out = meshtopo(dir, &["analyze", "bad.json"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("links[0]"), "{err}");

    let out = meshtopo(dir, &["analyze", "missing.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    let out = meshtopo(dir, &["build", "bad.json", "--strategy", "nope", "-o", "x.json"]);
    assert!(!out.status.success());
}

#[test]
fn strategies_are_listed() {
    let d = tempfile::tempdir().unwrap();
    let text = String::from_utf8(ok(d.path(), &["strategies"]).stdout).unwrap();
    for name in ["original", "dt", "dt_sd", "sweep", "brute_force", "range", "link"] {
        assert!(text.split_whitespace().any(|w| w == name), "{name} missing from {text}");
    }
}
