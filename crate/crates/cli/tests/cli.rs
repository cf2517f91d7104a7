use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparse-clifford"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn header(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn every_subcommand_writes_its_schema() {
    let cases: [(&[&str], &str); 5] = [
        (
            &["entropy-scan", "--n", "8", "--trajectories", "2", "--t-max", "1"],
            "t,size,geometry,s,N,entropy_mean_nats,entropy_sem,n_traj",
        ),
        (
            &["tripartite", "--n", "16", "--s", "0", "--trajectories", "4", "--t-max", "2"],
            "t,s,N,geometry,tmi_mean_nats,tmi_sem,n_traj",
        ),
        (
            &["teleport", "--n", "8", "--s", "-1", "--trajectories", "2", "--t-max", "1"],
            "t,j,linear_distance,two_adic_distance,s,N,fidelity_mean_nats,fidelity_sem,n_traj",
        ),
        (
            &["critical-time", "--sizes", "8,16", "--trajectories", "4", "--t-max", "3"],
            "N,s,observable,value,value_err,model,fit_param_1,fit_param_2,residual",
        ),
        (
            &["scaling", "--observable", "t0", "--sizes", "8,16,32", "--s", "-1.5", "--trajectories", "4"],
            "N,s,observable,value,value_err,model,fit_param_1,fit_param_2,residual",
        ),
    ];
    for (args, expected) in cases {
        assert_eq!(header(&run(args)), expected, "{args:?}");
    }
}

#[test]
fn tripartite_rows_match_the_request() {
    let out = run(&["tripartite", "--n", "16", "--s", "0", "--trajectories", "5", "--t-max", "3", "--geometry", "both"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows[0].starts_with("0,0.0,16,linear,0.0,"));
    assert!(rows[4].contains(",treelike,"));
    assert!(rows.iter().all(|r| r.ends_with(",5")));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let paths = ["a.csv", "b.csv", "c.csv"].map(|p| dir.path().join(p));
    let args = |p: &Path, threads: &str| {
        run(&[
            "tripartite", "--n", "32", "--s", "0.5", "--seed", "7", "--trajectories", "20", "--t-max", "6", "--threads",
            threads, "--out", p.to_str().unwrap(),
        ])
    };
    assert!(args(&paths[0], "1").status.success());
    assert!(args(&paths[1], "1").status.success());
    assert!(args(&paths[2], "3").status.success());
    let bytes: Vec<Vec<u8>> = paths.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[0], bytes[2]);
}

#[test]
fn unknown_flag_prints_usage_and_fails() {
    let out = run(&["tripartite", "--n", "16", "--bogus", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n = 16\ns = -1.0\ntrajectories = 3\nt-max = 2\ngeometry = \"treelike\"\n").unwrap();
    let out = run(&["tripartite", "--config", cfg.to_str().unwrap(), "--t-max", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.contains(",-1.0,16,treelike,") && r.ends_with(",3")));

    fs::write(&cfg, "n = 16\nunknown-key = 1\n").unwrap();
    assert!(!run(&["tripartite", "--config", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn invalid_runs_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.csv");
    let out = run(&["tripartite", "--n", "12", "--out", out_path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!out_path.exists());
    let missing = dir.path().join("no-such-dir").join("out.csv");
    let out = run(&["tripartite", "--n", "8", "--trajectories", "2", "--t-max", "1", "--out", missing.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!missing.exists());
}

#[test]
fn json_mirrors_the_csv_with_metadata() {
    let out = run(&["tripartite", "--n", "16", "--trajectories", "3", "--t-max", "2", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["units"], "nats");
    assert!(doc["metadata"]["gates_per_site_rate"].as_f64().unwrap() > 0.0);
    assert!(doc["metadata"]["git_revision"].is_string());
    assert_eq!(doc["metadata"]["spec"]["config"]["n"], 16);
    assert_eq!(doc["columns"].as_array().unwrap().len(), 7);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["N"], 16);
    assert_eq!(rows[0]["tmi_mean_nats"], 0.0);
}
