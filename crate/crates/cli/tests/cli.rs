//! End-to-end runs of the `dyngame` binary against the shipped documents.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn game(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../games")
        .join(name)
        .display()
        .to_string()
}

struct Run {
    code: i32,
    report: Value,
    stdout: String,
}

fn dyngame(args: &[&str]) -> Run {
    dyngame_env(args, &[])
}

fn dyngame_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dyngame"));
    cmd.args(args).env_remove("DYNGAME_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn dyngame");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 stdout");
    let code = out.status.code().expect("exit code");
    let report: Value = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("stdout is not one JSON report ({e}):\n{stdout}"));
    assert_eq!(report["schema"], "dyngame_report_v1", "{stdout}");
    assert_eq!(report["exit_code"], code as i64, "{stdout}");
    Run { code, report, stdout }
}

#[test]
fn validate_accepts_every_shipped_document() {
    for name in ["example1.game", "example2.game", "example3.game"] {
        let r = dyngame(&["validate", &game(name)]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        assert_eq!(r.report["verdict"], "valid");
        let digest = r.report["inputs"][0]["sha256"].as_str().unwrap();
        assert_eq!(digest.len(), 64);
    }
}

#[test]
fn constant_summary_fails_usi_with_witness() {
    let r = dyngame(&["check-usi", &game("example1.game"), "--player", "B"]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "fails");
    assert_eq!(r.report["payload"]["player"], "bob");
    assert!(!r.report["payload"]["witness"].is_null(), "{}", r.stdout);
}

#[test]
fn full_history_summary_passes_usi() {
    let r = dyngame(&["check-usi", &game("example1.game"), "--player", "alice"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "holds (sampled)");
}

#[test]
fn msi_holds_on_the_signaling_game() {
    let r = dyngame(&["check-msi", &game("example3.game")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "holds (sampled)");
}

#[test]
fn solver_reproduces_the_signaling_value() {
    let r = dyngame(&[
        "solve-bne",
        &game("example3.game"),
        "--eps-geom",
        "0.1,0.5,12",
        "--seed",
        "7",
    ]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "solved");
    let value = 0.2 / 2.0 + 2.0 / 3.0;
    let payoffs = r.report["payload"]["payoffs"].as_array().unwrap();
    assert!((payoffs[0].as_f64().unwrap() - value).abs() <= 1e-6, "{payoffs:?}");
    assert!((payoffs[1].as_f64().unwrap() + value).abs() <= 1e-6, "{payoffs:?}");
    assert_eq!(r.report["seed"], 7);
}

#[test]
fn reports_reproduce_byte_for_byte_without_timestamps() {
    let args =
        ["solve-bne", &game("example3.game"), "--seed", "11", "--no-timestamp"];
    let a = dyngame(&args);
    let b = dyngame(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains("timestamp_unix"));
    assert!(!a.stdout.contains("wall_ms"));

    let timed = dyngame(&["validate", &game("example1.game")]);
    assert!(timed.stdout.contains("timestamp_unix"), "{}", timed.stdout);
}

#[test]
fn verify_accepts_the_closed_form_equilibrium() {
    let r = dyngame(&["verify-bne", &game("example3.game"), "--strategy", "closed"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "equilibrium");
    let gap = r.report["payload"]["max_gap"].as_f64().unwrap();
    assert!(gap <= 1e-6, "{gap}");
}

#[test]
fn tremble_certificate_accepts_the_closed_form_equilibrium() {
    let r = dyngame(&["verify-se", &game("example3.game")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "canonical");
}

#[test]
fn enumeration_finds_exactly_one_payoff_vector() {
    let r = dyngame(&["enumerate-bne", &game("example3.game")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let payoffs = r.report["payload"]["payoffs"].as_array().unwrap();
    assert_eq!(payoffs.len(), 1, "{payoffs:?}");
}

#[test]
fn transfer_carries_the_closed_form_onto_summaries() {
    let r = dyngame(&["transfer-usi", &game("example3.game")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "transferred");
    assert_eq!(r.report["payload"]["report"]["is_equilibrium"], true);
}

#[test]
fn shipped_assessment_is_bayes_consistent_and_rational() {
    let r = dyngame(&["check-wpbe", &game("example2.game")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "accepted");
    assert_eq!(r.report["payload"]["strategy"], "wpbe");
}

#[test]
fn closed_form_equilibrium_is_not_belief_based() {
    let r = dyngame(&["check-belief-based", &game("example3.game")]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "not-belief-based");
    assert!(!r.report["payload"]["witness"].is_null(), "{}", r.stdout);
}

#[test]
fn fixture_replay_passes_for_a_named_fixture() {
    let r = dyngame(&["fixtures", "example1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "all-passed");
    let rows = r.report["payload"]["fixtures"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["name"], "example1");
}

#[test]
fn fixture_replay_passes_for_the_whole_suite() {
    let r = dyngame(&["fixtures", "--all"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "all-passed");
    assert_eq!(r.report["payload"]["failed"], 0);
    assert!(r.report["payload"]["fixtures"].as_array().unwrap().len() >= 7);
}

#[test]
fn garbage_input_exits_three_with_a_report() {
    let dir = std::env::temp_dir().join("dyngame-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.game");
    std::fs::write(&path, "not a section\n").unwrap();
    let r = dyngame(&["validate", path.to_str().unwrap()]);
    assert_eq!(r.code, 3, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "invalid");
    assert_eq!(r.report["payload"]["line"], 1);
}

#[test]
fn unknown_player_is_an_input_error() {
    let r = dyngame(&["check-usi", &game("example1.game"), "--player", "zed"]);
    assert_eq!(r.code, 3, "{}", r.stdout);
    assert_eq!(r.report["verdict"], "input-error");
}

#[test]
fn thread_cap_is_validated_and_recorded() {
    let ok = dyngame_env(&["validate", &game("example1.game")], &[("DYNGAME_THREADS", "4")]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    assert_eq!(ok.report["threads"], 4);

    let bad = dyngame_env(&["validate", &game("example1.game")], &[("DYNGAME_THREADS", "zero")]);
    assert_eq!(bad.code, 3, "{}", bad.stdout);
}
