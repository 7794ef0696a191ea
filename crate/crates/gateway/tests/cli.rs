mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn clem(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clem"))
        .current_dir(cwd)
        .env_remove("CLEM_CONFIG")
        .args(args)
        .output()
        .expect("clem runs")
}

fn ok(out: &Output) -> String {
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert_eq!(out.status.code(), Some(0), "stdout: {stdout}\nstderr: {}", String::from_utf8_lossy(&out.stderr));
    stdout
}

/// A config file pointing at the shared instances and resources.
fn config(dir: &Path, instances: &Path) -> String {
    let path = dir.join("clem.json");
    let body = json!({
        "instances_dir": instances,
        "resources_dir": common::resources(),
        "results_dir": dir.join("results"),
    });
    std::fs::write(&path, body.to_string()).unwrap();
    path.display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn instances_writes_every_game() {
    let dir = tempfile::tempdir().unwrap();
    let res = common::resources();
    let stdout = ok(&clem(dir.path(), &["instances", "--resources", res.to_str().unwrap(), "--out", "in"]));
    for game in ["taboo", "wordle", "wordle_withclue", "wordle_withcritic", "drawing", "reference", "privateshared"] {
        assert!(dir.path().join("in").join(game).join("instances.json").exists(), "{game}");
    }
    assert!(stdout.contains("216  total"), "{stdout}");
    assert!(stdout.contains("wordle groups 756/756/757"));
}

#[test]
fn run_then_transcribe() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), common::instances_dir());
    let stdout = ok(&clem(
        dir.path(),
        &["--config", &cfg, "run", "--game", "taboo", "--players", "scripted:taboo-describer,scripted:taboo-guesser"],
    ));
    assert!(stdout.starts_with("30 episodes"), "{stdout}");
    let pairing = dir.path().join("results/taboo-describer--taboo-guesser/taboo");
    let records: Vec<_> = std::fs::read_dir(pairing.join("high")).unwrap().collect();
    assert!(!records.is_empty());
    let ep = pairing.join("high/episode_000");
    assert!(ep.join("interactions.json").exists() && ep.join("scores.json").exists());

    ok(&clem(dir.path(), &["--config", &cfg, "transcribe"]));
    let t = std::fs::read_to_string(ep.join("transcript.txt")).unwrap();
    assert!(t.contains("[A<GM]") && t.contains("[GM>B]") && t.contains("[GM<B]"));
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), common::instances_dir());
    let out = Command::new(env!("CARGO_BIN_EXE_clem"))
        .current_dir(dir.path())
        .env("CLEM_CONFIG", &cfg)
        .args(["run", "--game", "reference", "--experiment", "edit_distance_two", "--players", "scripted:perfect"])
        .output()
        .unwrap();
    ok(&out);
    let exp = dir.path().join("results/perfect--perfect/reference/edit_distance_two");
    assert_eq!(std::fs::read_dir(exp).unwrap().count(), 18);
}

#[test]
fn score_replayed_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("in/taboo");
    std::fs::create_dir_all(&inst).unwrap();
    let file = json!({"game": "taboo", "experiments": [{"name": "fixture", "instances": [
        {"id": 0, "target": "expedition", "related": ["journey", "discovery", "exploration"], "level": "fixture"}]}]});
    std::fs::write(inst.join("instances.json"), file.to_string()).unwrap();
    std::fs::write(
        dir.path().join("describer.json"),
        json!([
            "CLUE: A trip taken for a specific purpose.",
            "CLUE: A planned and organized trip with a specific goal in mind."
        ])
        .to_string(),
    )
    .unwrap();
    std::fs::write(dir.path().join("guesser.json"), json!(["GUESS: Journey", "GUESS: expedition"]).to_string())
        .unwrap();
    let cfg = config(dir.path(), &dir.path().join("in"));
    ok(&clem(
        dir.path(),
        &[
            "--config",
            &cfg,
            "run",
            "--game",
            "taboo",
            "--instance",
            "0",
            "--players",
            "replay:describer.json,replay:guesser.json",
        ],
    ));

    let ep = dir.path().join("results/replay-describer--replay-guesser/taboo/fixture/episode_000");
    std::fs::remove_file(ep.join("scores.json")).unwrap();
    let stdout = ok(&clem(dir.path(), &["--config", &cfg, "score"]));
    assert!(stdout.contains("1 records scored"));
    let scores = read_json(&ep.join("scores.json"));
    assert_eq!(scores["game"]["episode"]["speed"], json!(50.0), "{scores}");
}

#[test]
fn bench_emits_the_eight_column_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), common::instances_dir());
    let stdout = ok(&clem(
        dir.path(),
        &["--config", &cfg, "bench", "--pairing", "scripted:perfect", "--pairing", "scripted:violator"],
    ));
    assert!(stdout.contains("perfect--perfect") && stdout.contains("violator--violator"));
    let csv = std::fs::read_to_string(dir.path().join("results/results.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 2 + 8, "{header:?}");
    let violator = csv.lines().find(|l| l.starts_with("violator--violator,% played")).unwrap();
    assert_eq!(violator.split(',').nth(2), Some("0.00"), "{violator}");
    let perfect = csv.lines().find(|l| l.starts_with("perfect--perfect,% played")).unwrap();
    assert!(perfect.split(',').skip(2).all(|c| c == "100.00"), "{perfect}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), common::instances_dir());
    assert_eq!(clem(dir.path(), &[]).status.code(), Some(2));
    assert_eq!(clem(dir.path(), &["dance"]).status.code(), Some(2));
    assert_eq!(clem(dir.path(), &["--help"]).status.code(), Some(0));
    let bad_game = clem(dir.path(), &["--config", &cfg, "run", "--game", "chess", "--players", "scripted:perfect"]);
    assert_eq!(bad_game.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_game.stderr).contains("chess"));
    let bad_spec = clem(dir.path(), &["--config", &cfg, "run", "--game", "taboo", "--players", "robot"]);
    assert_eq!(bad_spec.status.code(), Some(2));
    let bad_id = clem(
        dir.path(),
        &["--config", &cfg, "run", "--game", "taboo", "--instance", "9999", "--players", "scripted:perfect"],
    );
    assert_eq!(bad_id.status.code(), Some(2));
    assert_eq!(clem(dir.path(), &["score", "no/such/dir"]).status.code(), Some(1));
    assert_eq!(clem(dir.path(), &["--config", "missing.json", "score"]).status.code(), Some(1));
}
