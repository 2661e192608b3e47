use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn knap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knap"))
        .args(args)
        .current_dir(dir)
        .env_remove("KNAP_SEED")
        .output()
        .expect("run knap")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn keygen(dir: &Path, n: &str, seed: &str) {
    let out = knap(&["keygen", "--n", n, "--seed", seed], dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn keygen_is_reproducible() {
    let dir = TempDir::new().unwrap();
    keygen(dir.path(), "8", "42");
    let private = fs::read(dir.path().join("private.json")).unwrap();
    let public = fs::read(dir.path().join("public.json")).unwrap();
    keygen(dir.path(), "8", "42");
    assert_eq!(fs::read(dir.path().join("private.json")).unwrap(), private);
    assert_eq!(fs::read(dir.path().join("public.json")).unwrap(), public);

    let key: serde_json::Value = serde_json::from_slice(&public).unwrap();
    assert_eq!(key["public"].as_array().unwrap().len(), 8);
}

#[test]
fn keygen_seed_from_environment() {
    let dir = TempDir::new().unwrap();
    keygen(dir.path(), "8", "5");
    let flag = fs::read(dir.path().join("public.json")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_knap"))
        .args(["keygen", "--n", "8", "--public", "env.json", "--private", "env_private.json"])
        .current_dir(dir.path())
        .env("KNAP_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(dir.path().join("env.json")).unwrap(), flag);
}

#[test]
fn keygen_rejects_zero_and_accepts_one() {
    let dir = TempDir::new().unwrap();
    let out = knap(&["keygen", "--n", "0"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("public.json").exists());
    keygen(dir.path(), "1", "0");
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let out = knap(&["keygen", "--n", "8", "--public", "missing/dir/public.json"], dir.path());
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn bad_arguments_are_validation_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&knap(&["keygen", "--n", "8", "--bogus"], dir.path())), 1);
    assert_eq!(code(&knap(&["oracle", "--weights", "1,2"], dir.path())), 1);
    assert_eq!(code(&knap(&["oracle", "--weights", "1,0", "--target", "1"], dir.path())), 1);
    assert_eq!(code(&knap(&["sweep", "--out", "x"], dir.path())), 1);
}

#[test]
fn help_works_for_every_subcommand() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&knap(&["--help"], dir.path())), 0);
    for sub in ["keygen", "encrypt", "decrypt", "attack", "oracle", "solve", "sweep"] {
        let out = knap(&[sub, "--help"], dir.path());
        assert_eq!(code(&out), 0, "{sub}");
        assert!(stdout(&out).contains("Usage"), "{sub}");
    }
}

#[test]
fn encrypt_decrypt_attack_pipeline() {
    let dir = TempDir::new().unwrap();
    keygen(dir.path(), "8", "11");
    let out = knap(&["encrypt", "--public", "public.json", "--message", "ok", "--out", "ct.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = knap(&["decrypt", "--private", "private.json", "--ciphertext", "ct.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim_end(), "ok");

    let out = knap(
        &["attack", "--ciphertext", "ct.json", "--public", "public.json", "--out", "report.json", "--seed", "3"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["plaintext"], "ok");
    assert_eq!(report["plaintext_hex"], "6f6b");
    assert_eq!(report["failed_blocks"].as_array().unwrap().len(), 0);
}

#[test]
fn empty_message_attacks_cleanly() {
    let dir = TempDir::new().unwrap();
    keygen(dir.path(), "8", "1");
    let out = knap(&["encrypt", "--public", "public.json", "--message", "", "--out", "ct.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = knap(&["attack", "--ciphertext", "ct.json", "--public", "public.json", "--out", "r.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["plaintext"], "");
}

#[test]
fn over_capacity_block_is_rejected() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("public.json"), r#"{"public": [1, 2, 4, 8]}"#).unwrap();
    fs::write(dir.path().join("ct.json"), r#"{"n": 4, "byte_len": 1, "blocks": [16, 0]}"#).unwrap();
    let out = knap(&["attack", "--ciphertext", "ct.json", "--public", "public.json", "--out", "r.json"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("16"), "{}", stderr(&out));
}

#[test]
fn unsatisfiable_block_is_a_partial_attack() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("public.json"), r#"{"public": [2, 4, 6, 8]}"#).unwrap();
    fs::write(dir.path().join("ct.json"), r#"{"n": 4, "byte_len": 1, "blocks": [6, 5]}"#).unwrap();
    let out = knap(
        &[
            "attack", "--ciphertext", "ct.json", "--public", "public.json", "--out", "r.json", "--max-gen", "20",
            "--attempts", "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["failed_blocks"], serde_json::json!([1]));
}

#[test]
fn malformed_json_names_the_field() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("public.json"), r#"{"public": [1, 2, 4, 8]}"#).unwrap();
    fs::write(dir.path().join("ct.json"), r#"{"n": 4, "byte_len": "one", "blocks": []}"#).unwrap();
    let out = knap(&["attack", "--ciphertext", "ct.json", "--public", "public.json", "--out", "r.json"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("byte_len"), "{}", stderr(&out));

    let out = knap(&["attack", "--ciphertext", "nope.json", "--public", "public.json", "--out", "r.json"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_lists_solutions() {
    let dir = TempDir::new().unwrap();
    let out = knap(&["oracle", "--weights", "5,7,21,33,37,91", "--target", "112"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "001001 {21, 91}\n1 solutions\n");

    let out = knap(&["oracle", "--weights", "2,4,6", "--target", "5"], dir.path());
    assert_eq!(stdout(&out), "0 solutions\n");

    fs::write(dir.path().join("inst.json"), r#"{"weights": [2, 4, 6, 8, 10, 12], "target": 20}"#).unwrap();
    let out = knap(&["oracle", "--instance", "inst.json"], dir.path());
    assert!(stdout(&out).ends_with("5 solutions\n"), "{}", stdout(&out));

    let out = knap(&["oracle", "--weights", "1,2,3", "--target", "3", "--limit", "2"], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn solve_writes_run_result() {
    let dir = TempDir::new().unwrap();
    let out = knap(
        &["solve", "--weights", "2,4,6,8,10,12", "--target", "20", "--seed", "1", "--max-gen", "200", "--out", "run.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let run: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(run["generations_executed"], 200);
    assert_eq!(run["params_echo"]["seed"], 1);
    assert!(!run["solutions"].as_array().unwrap().is_empty());
}

#[test]
fn small_sweep_config() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("sweep.json"),
        r#"{
            "instances": [{"weights": [2, 4, 6, 8, 10, 12], "target": 20}],
            "crossover_rates": [2.0],
            "mutation_rates": [0.6],
            "repeats": 1,
            "base_params": {"max_generations": 100}
        }"#,
    )
    .unwrap();
    let out = knap(&["sweep", "--config", "sweep.json", "--out", "out", "--seed", "9"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("argmax at cx=2, mut=0.6: yes"), "{}", stdout(&out));
    let cells = fs::read_to_string(dir.path().join("out/sweep_cells.csv")).unwrap();
    assert_eq!(cells.lines().count(), 2);
    assert!(dir.path().join("out/experiment_1.csv").exists());
    assert!(dir.path().join("out/summary.csv").exists());

    fs::write(dir.path().join("bad.json"), r#"{"instances": [], "crossover_rates": [2.0], "mutation_rates": [0.6], "repeats": 1}"#)
        .unwrap();
    assert_eq!(code(&knap(&["sweep", "--config", "bad.json", "--out", "out2"], dir.path())), 1);
}
