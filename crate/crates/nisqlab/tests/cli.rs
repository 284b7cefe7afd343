//! End-to-end checks of the binary: flag parsing, file formats, exit codes,
//! and determinism of emitted products.

use std::process::{Command, Output};

fn nisqlab(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nisqlab"));
    cmd.args(args).env_remove("NISQLAB_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    nisqlab(args).output().expect("binary spawns")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    for sub in ["satscan", "anneal", "qaoa", "dqc", "paintshop", "campaign"] {
        assert_eq!(run(&[sub, "--help"]).status.code(), Some(0), "{sub} --help");
    }
}

#[test]
fn paintshop_reports_all_three_methods() {
    let output = run(&["paintshop", "--sequence", "ABCABC"]);
    let text = stdout_of(&output);
    assert!(text.starts_with("sequence,method,changes,first_occurrence_colors"));
    for method in ["exact", "annealed", "greedy"] {
        assert!(text.contains(&format!("ABCABC,{method},")), "missing {method} row");
    }
}

#[test]
fn config_problems_exit_with_code_2() {
    // Variable count out of range.
    assert_eq!(run(&["satscan", "--n", "99"]).status.code(), Some(2));
    // Campaign needs a config file.
    assert_eq!(run(&["campaign"]).status.code(), Some(2));
    // Unreadable problem file.
    assert_eq!(
        run(&["qaoa", "--problem", "/nonexistent/x.cnf"]).status.code(),
        Some(2)
    );
    // Malformed grid text.
    assert_eq!(
        run(&["satscan", "--ratios", "1:bogus:3"]).status.code(),
        Some(2)
    );
    // Zero workers is rejected before any work happens.
    assert_eq!(
        run(&["--workers", "0", "paintshop", "--sequence", "ABAB"]).status.code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_with_code_3() {
    let output = run(&[
        "--out",
        "/nonexistent_directory/report.csv",
        "paintshop",
        "--sequence",
        "ABAB",
    ]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn problem_files_are_recognized_by_extension() {
    let dir = tempfile::tempdir().unwrap();

    let edges = dir.path().join("ring.edges");
    std::fs::write(&edges, "0 1\n1 2\n2 0\n").unwrap();
    let text = stdout_of(&run(&["qaoa", "--problem", edges.to_str().unwrap()]));
    assert!(text.starts_with("index,bits,energy,probability"));

    let cnf = dir.path().join("tiny.cnf");
    std::fs::write(&cnf, "p cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
    assert!(run(&["qaoa", "--problem", cnf.to_str().unwrap()]).status.success());

    let qubo = dir.path().join("problem.json");
    std::fs::write(&qubo, r#"{"n":2,"c":[-1.0,0.0],"q":[[0,1,1.0]],"offset":0.0}"#).unwrap();
    assert!(run(&["qaoa", "--problem", qubo.to_str().unwrap()]).status.success());
}

#[test]
fn campaign_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("campaign.json");
    std::fs::write(
        &config,
        r#"{
            "experiment": "satscan",
            "grid": {"n": [8.0], "ratio": [2.0, 5.0]},
            "instances": 8,
            "seed": 7
        }"#,
    )
    .unwrap();
    let config = config.to_str().unwrap();

    let first = stdout_of(&run(&["--config", config, "campaign"]));
    let rerun = stdout_of(&run(&["--config", config, "campaign"]));
    assert_eq!(first, rerun, "rerun differs");
    assert!(first.starts_with("experiment,n,ratio,instance,seed,"));

    // Worker count must not leak into the product, whether set by flag...
    let serial = stdout_of(&run(&["--config", config, "--workers", "1", "campaign"]));
    assert_eq!(first, serial, "worker flag changed the output");

    // ...or by environment variable.
    let via_env = nisqlab(&["--config", config, "campaign"])
        .env("NISQLAB_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(first, stdout_of(&via_env), "env workers changed the output");

    // A bad environment value is a configuration error.
    let bad_env = nisqlab(&["--config", config, "campaign"])
        .env("NISQLAB_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));

    // The flag wins over a bad environment value.
    let flag_wins = nisqlab(&["--config", config, "--workers", "2", "campaign"])
        .env("NISQLAB_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(first, stdout_of(&flag_wins), "flag should shadow the env");
}

#[test]
fn campaign_json_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("campaign.json");
    std::fs::write(
        &config,
        r#"{"experiment": "paintshop", "grid": {"cars": [3.0]}, "instances": 2, "seed": 1}"#,
    )
    .unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "campaign",
        "--format",
        "json",
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["schema_version"], 1);
    assert_eq!(parsed["records"].as_array().unwrap().len(), 2);
    assert!(parsed["records"][0]["metrics"]["optimal_changes"].is_number());
}

#[test]
fn seed_flag_changes_stochastic_output() {
    let base = stdout_of(&run(&["satscan", "--n", "10", "--ratios", "4", "--instances", "12"]));
    let same = stdout_of(&run(&["satscan", "--n", "10", "--ratios", "4", "--instances", "12"]));
    let other = stdout_of(&run(&[
        "--seed", "9", "satscan", "--n", "10", "--ratios", "4", "--instances", "12",
    ]));
    assert_eq!(base, same);
    assert_ne!(base, other, "different master seeds gave identical scans");
}

#[test]
fn dqc_trace_is_seeded_and_reproducible() {
    let args = ["dqc", "--qubits", "2", "--layers", "2", "--iters", "6"];
    let first = stdout_of(&run(&args));
    let rerun = stdout_of(&run(&args));
    assert_eq!(first, rerun);
    assert!(first.starts_with("iter,loss,max_grid_error"));
    assert_eq!(first.lines().count(), 7, "header plus one row per iteration");
}
