mod common;

use common::run_cli;
use serde_json::Value;

fn json(args: &[&str]) -> Value {
    let out = run_cli(args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn temp_file(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("fw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn exact_json_has_symbolic_annotations() {
    let doc = json(&["exact"]);
    let joint = doc["payload"]["joint"].as_array().unwrap();
    let symbols: Vec<_> = joint.iter().map(|r| r["probability_exact"].as_str().unwrap()).collect();
    assert_eq!(symbols, ["1/12", "1/12", "1/12", "3/4"]);
    assert_eq!(joint[0]["probability"].as_f64(), Some(0.0833333333333));
    assert_eq!(doc["payload"]["marginals"]["P(w=ok | wbar=failsbar)_exact"], "1/10");
    assert_eq!(doc["metadata"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["metadata"]["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["exact", "--format", "markdown"][..],
        &["simulate", "--rounds", "5000", "--seed", "9"],
        &["report", "--format", "csv"],
        &["reason", "--all", "--format", "markdown"],
    ] {
        let a = run_cli(args);
        let b = run_cli(args);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn stamp_only_touches_metadata() {
    let plain = json(&["exact"]);
    let stamped = json(&["exact", "--stamp"]);
    assert_eq!(plain["payload"], stamped["payload"]);
    assert!(stamped["metadata"]["generated_at_unix"].is_u64());
    assert!(plain["metadata"].get("generated_at_unix").is_none());
}

#[test]
fn csv_layout() {
    let out = run_cli(&["simulate", "--rounds", "1000", "--seed", "3", "--format", "csv"]);
    assert_eq!(out.code, 0);
    let rows: Vec<_> = out.stdout.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], "outcome_wbar,outcome_w,probability,stderr");
    for r in &rows[1..] {
        let cells: Vec<_> = r.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert!(!cells[3].is_empty());
    }
    assert!(out.stdout.contains("# seed: 3"));
}

#[test]
fn markdown_uses_six_digits() {
    let out = run_cli(&["exact", "--format", "markdown"]);
    assert!(out.stdout.contains("| okbar | ok | 0.0833333 (1/12) |  |"));
    assert!(out.stdout.contains("P(wbar=okbar): 0.166667 (1/6)"));
}

#[test]
fn seed_defaults_through_environment() {
    // the only test touching the variable
    std::env::set_var(friendly_wigner::cli::SEED_ENV, "77");
    let env = run_cli(&["simulate", "--rounds", "2000"]);
    std::env::remove_var(friendly_wigner::cli::SEED_ENV);
    let flag = run_cli(&["simulate", "--rounds", "2000", "--seed", "77"]);
    assert_eq!(env, flag);
    let doc: Value = serde_json::from_str(&env.stdout).unwrap();
    assert_eq!(doc["metadata"]["seed"], 77);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["simulate", "--rounds", "0", "--seed", "1"][..],
        &["simulate", "--seed", "1"],
        &["simulate", "--rounds", "10", "--workers", "0"],
        &["reason", "--pathway", "nonsense"],
        &["reason", "--pathway", "WBAR:t3,F:t3,FBAR:t3", "--all"],
        &["perspectives", "--agent", "X", "--time", "t1"],
        &["teleport"],
        &[],
    ] {
        let out = run_cli(args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stderr);
        assert!(out.stdout.is_empty());
        assert!(out.stderr.contains("Usage"), "{args:?}: {}", out.stderr);
    }
}

#[test]
fn unknown_pathway_lists_the_nine() {
    let out = run_cli(&["reason", "--pathway", "WBAR:t2,F:t2,FBAR:t2"]);
    assert_eq!(out.code, 2);
    for f in ["t1", "t2", "t3"] {
        for fbar in ["t1", "t2", "t3"] {
            assert!(out.stderr.contains(&format!("WBAR:t3,F:{f},FBAR:{fbar}")));
        }
    }
}

#[test]
fn validation_errors_exit_3() {
    let bad = temp_file("bad.toml", "[initial]\nheads = 0.9\ntails = 0.3\n");
    let out = run_cli(&["exact", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("normalization"), "{}", out.stderr);

    let out = run_cli(&["exact", "--config", "/nonexistent/fw.toml"]);
    assert_eq!(out.code, 3);

    let out = run_cli(&[
        "perspectives",
        "--agent",
        "W",
        "--time",
        "t3",
        "--condition",
        "r=heads",
        "--condition",
        "r=tails",
    ]);
    assert_eq!(out.code, 3);
}

#[test]
fn missing_config_with_default_uses_standard_protocol() {
    let out = run_cli(&["exact", "--config", "/nonexistent/fw.toml", "--default"]);
    assert_eq!(out.code, 0);
    assert_eq!(out, run_cli(&["exact"]));
}

#[test]
fn config_file_changes_hash_and_table() {
    let cfg = temp_file("half.toml", "[initial]\nheads = \"sqrt:1/2\"\ntails = \"sqrt:1/2\"\n");
    let doc = json(&["exact", "--config", cfg.to_str().unwrap()]);
    let standard = json(&["exact"]);
    assert_ne!(doc["metadata"]["config_sha256"], standard["metadata"]["config_sha256"]);
    assert_eq!(doc["payload"]["joint"][0]["probability"].as_f64(), Some(0.125));
}

#[test]
fn reason_all_and_single() {
    let doc = json(&["reason", "--all"]);
    let rows = doc["payload"]["verdicts"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    let eq = rows.iter().find(|r| r["pathway"] == "WBAR:t3,F:t3,FBAR:t3").unwrap();
    assert_eq!(eq["verdict"], "ConsistentPrediction");
    assert_eq!(eq["probability"].as_f64(), Some(0.5));
    assert_eq!(eq["artifact_defined"], false);
    assert_eq!(rows.iter().filter(|r| r["artifact_defined"] == true).count(), 7);

    let one = json(&["reason", "--pathway", "WBAR:t3,F:t2,FBAR:t1"]);
    let rows = one["payload"]["verdicts"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["verdict"], "ContradictionWithQM");

    let improved = json(&["reason", "--pathway", "WBAR:t3,F:t2,FBAR:t1", "--rule", "improved"]);
    let row = &improved["payload"]["verdicts"][0];
    assert_eq!(row["verdict"], "BrokenPremise");
    assert_eq!(row["premise_rule"], "C");
}

#[test]
fn perspectives_of_f_at_t3() {
    let doc = json(&[
        "perspectives",
        "--agent",
        "F",
        "--time",
        "t3",
        "--condition",
        "z=+1/2",
        "--lab",
        "Lbar",
    ]);
    let labs = doc["payload"]["labs"].as_array().unwrap();
    assert_eq!(labs.len(), 1);
    assert_eq!(labs[0]["kind"], "mixed");
    let outcomes = doc["payload"]["outcomes"].as_array().unwrap();
    let okbar = outcomes.iter().find(|r| r["outcome"] == "okbar").unwrap();
    assert_eq!(okbar["probability_exact"], "1/2");
}

#[test]
fn report_flags_both_checks() {
    let doc = json(&["report"]);
    let p = &doc["payload"];
    assert_eq!(p["non_equal_time"]["contradiction"], true);
    assert_eq!(p["equal_time"]["prediction_exact"], "1/2");
    assert_eq!(p["statements"]["consistent"], true);
    let chain = p["message_chain"].as_array().unwrap();
    assert_eq!(chain[0]["effective_probability_exact"], "1/(4-2√2)");
    assert_eq!(chain[1]["effective_probability_exact"], "1/(4+2√2)");
    assert_eq!(p["chain"][4]["value_exact"], "1/12");
}
