use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mgcbs(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgcbs"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen_one(dir: &Path, agents: &str, goals: &str) {
    let o = mgcbs(
        &["gen", "--map", "crowded-a", "--agents", agents, "--goals", goals, "--count", "3", "--seed", "5", "--out", "inst"],
        dir,
    );
    assert!(o.status.success(), "{o:?}");
}

#[test]
fn gen_solve_verify_plot_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gen_one(d, "2", "3");
    assert_eq!(fs::read_dir(d.join("inst")).unwrap().count(), 3);

    let mut costs = Vec::new();
    for algo in ["mgcbs", "cbs-astar", "mgcbs-noforest"] {
        let out = format!("{algo}.json");
        let o = mgcbs(&["solve", "--instance", "inst/inst-000.json", "--algo", algo, "--timeout", "10", "--out", &out], d);
        assert!(o.status.success(), "{o:?}");
        let line = stdout(&o);
        assert!(line.starts_with("outcome=solved"), "{line}");
        let sol: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join(&out)).unwrap()).unwrap();
        costs.push(sol["cost"].as_u64().unwrap());

        let v = mgcbs(&["verify", "--instance", "inst/inst-000.json", "--solution", &out], d);
        assert!(v.status.success(), "{v:?}");
    }
    assert!(costs.windows(2).all(|w| w[0] == w[1]), "{costs:?}");

    let p = mgcbs(&["plot", "--instance", "inst/inst-000.json", "--solution", "mgcbs.json", "--out", "p.svg"], d);
    assert!(p.status.success());
    assert!(fs::read_to_string(d.join("p.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gen_one(a.path(), "3", "2");
    gen_one(b.path(), "3", "2");
    for i in 0..3 {
        let name = format!("inst/inst-{i:03}.json");
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
    }
}

#[test]
fn tampered_solution_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    gen_one(d, "2", "2");
    let o = mgcbs(&["solve", "--instance", "inst/inst-001.json", "--out", "s.json"], d);
    assert!(o.status.success());
    let mut sol: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    sol["cost"] = serde_json::json!(sol["cost"].as_u64().unwrap() + 1);
    fs::write(d.join("bad.json"), sol.to_string()).unwrap();

    let v = mgcbs(&["verify", "--instance", "inst/inst-001.json", "--solution", "bad.json"], d);
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&v.stderr).contains("cost-mismatch"));
    let p = mgcbs(&["plot", "--instance", "inst/inst-001.json", "--solution", "bad.json"], d);
    assert_eq!(p.status.code(), Some(2));
}

#[test]
fn usage_and_io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(mgcbs(&["frobnicate"], d).status.code(), Some(1));
    assert_eq!(mgcbs(&["solve", "--instance", "missing.json"], d).status.code(), Some(1));
    assert_eq!(mgcbs(&["gen", "--map", "no-such-map", "--agents", "1", "--goals", "1", "--out", "x"], d).status.code(), Some(1));
    gen_one(d, "2", "2");
    assert_eq!(
        mgcbs(&["solve", "--instance", "inst/inst-000.json", "--algo", "dijkstra"], d).status.code(),
        Some(1)
    );
    assert_eq!(mgcbs(&["--help"], d).status.code(), Some(0));
}

#[test]
fn invalid_instance_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("i.json"),
        r#"{"map":"crowded-a","agents":[{"start":[1,1],"goals":[[0,0]]}]}"#,
    )
    .unwrap();
    let o = mgcbs(&["solve", "--instance", "i.json"], d);
    assert_eq!(o.status.code(), Some(2), "{o:?}");
}

#[test]
fn tiny_timeout_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = mgcbs(
        &["gen", "--map", "maze-32-32-4", "--agents", "8", "--goals", "12", "--seed", "1", "--out", "inst"],
        d,
    );
    assert!(o.status.success());
    let o = mgcbs(&["solve", "--instance", "inst/inst-000.json", "--timeout", "0.001"], d);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "outcome=timeout algo=mgcbs elapsed_s=0.001000");
}

#[test]
fn bench_writes_csv_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = mgcbs(
        &[
            "bench", "--map", "crowded-a", "--agents", "2", "--goals", "2,3", "--count", "3", "--seed", "1", "--timeout", "5",
            "--baseline", "hcbs", "--csv", "out", "--logic-only",
        ],
        d,
    );
    assert!(o.status.success(), "{o:?}");
    let summary = fs::read_to_string(d.join("out/summary.csv")).unwrap();
    assert!(summary.starts_with("map,agents,goals,algorithm,attempted,solved,success_rate,mean_runtime_s,speedup\n"));
    assert_eq!(summary.lines().count(), 1 + 2 * 4);
    let runs = fs::read_to_string(d.join("out/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 3 * 4);
    assert!(fs::read_to_string(d.join("out/optimality.csv")).unwrap().contains("mgcbs,cbs-astar"));
}
