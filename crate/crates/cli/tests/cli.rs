use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpcause"))
        .args(args)
        .env_remove("CPCAUSE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn validate_accepts_corpus() {
    let o = run(&["validate", &corpus("pens.cp"), "--story", &corpus("pens.story")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("probability 14/25"));
    for (cp, story) in [
        ("ex5.cp", "ex5.story"),
        ("dice.cp", "dice.story"),
        ("dice6.cp", "dice6.story"),
    ] {
        assert_eq!(code(&run(&["validate", &corpus(cp), "--story", &corpus(story)])), 0);
    }
}

#[test]
fn validate_reports_mass_overflow_with_span() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cp");
    fs::write(&path, "ok <- .\na:0.7; b:0.6 <- ok.\n").unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("ProbabilitySumError"), "{}", err);
    assert!(err.contains("bad.cp:2:1"), "{}", err);
}

#[test]
fn validate_rejects_repeated_law() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("twice.story");
    fs::write(&path, "apply 0 -> prof\napply 0 -> prof\n").unwrap();
    let o = run(&["validate", &corpus("pens.cp"), "--story", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("IllegalStep"));
}

#[test]
fn validate_warns_on_unstratified_theory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.cp");
    fs::write(&path, "a <- ~b.\nb <- ~a.\n").unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("NonStratifiedWarning"), "{}", stderr(&o));
}

#[test]
fn queries() {
    let pens = corpus("pens.cp");
    let o = run(&["query", &pens, "--prob", "nopens"]);
    assert_eq!(stdout(&o).trim(), "P(nopens) = 14/25 (0.56)");
    let o = run(&["query", &pens, "--do", "~prof", "--prob", "nopens"]);
    assert_eq!(stdout(&o).trim(), "P(nopens) = 0");
    let o = run(&["query", &pens, "--do", "prof", "--prob", "nopens", "--format", "json"]);
    assert_eq!(json(&o)["rational"], "4/5");
    let o = run(&["query", &pens, "--cond", "nopens", "prof & ~prof"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("ConditionImpossible"));
}

#[test]
fn dice_distribution() {
    let o = run(&["query", &corpus("dice.cp"), "--dist", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["leaves"].as_array().unwrap().len(), 101);
    assert_eq!(v["total"], "1");
}

#[test]
fn cause_verdicts() {
    let o = run(&[
        "cause",
        &corpus("pens.cp"),
        &corpus("pens.story"),
        "--cause",
        "assistant",
        "--effect",
        "nopens",
        "--definition",
        "hh",
        "--format",
        "json",
    ]);
    let v = json(&o);
    assert_eq!(v["strength_rational"], "0");
    assert_eq!(v["is_cause"], false);
    assert_eq!(v["factors"], serde_json::Value::Null);
    for key in ["cause", "effect", "definition", "strength_decimal", "diagnostics"] {
        assert!(v.get(key).is_some(), "missing {}", key);
    }

    let o = run(&[
        "cause",
        &corpus("ex5.cp"),
        &corpus("ex5.story"),
        "--cause",
        "c",
        "--effect",
        "e",
        "--definition",
        "intermediate",
        "--format",
        "json",
    ]);
    let v = json(&o);
    assert_eq!(v["strength_rational"], "9/10");
    assert_eq!(v["factors"][0]["rational"], "1");
    assert_eq!(v["factors"][1]["rational"], "9/10");
}

#[test]
fn dice_final_strength() {
    let o = run(&[
        "cause",
        &corpus("dice.cp"),
        &corpus("dice.story"),
        "--cause",
        "throw(1,1)",
        "--effect",
        "wincar",
        "--definition",
        "final",
        "--format",
        "json",
    ]);
    let v = json(&o);
    assert_eq!(v["strength_decimal"], "0.899973");
    assert_eq!(v["is_cause"], true);
}

#[test]
fn cause_errors_exit_five() {
    let o = run(&[
        "cause",
        &corpus("pens.cp"),
        &corpus("pens.story"),
        "--cause",
        "ghost",
        "--effect",
        "nopens",
    ]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("CEnotInLeaf"));
}

#[test]
fn rankings() {
    let o = run(&[
        "rank",
        &corpus("pens.cp"),
        "--leaf",
        "prof,assistant,nopens",
        "--effect",
        "nopens",
        "--definition",
        "final",
        "--format",
        "json",
    ]);
    let rows = json(&o);
    let got: Vec<(String, String)> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["cause"].as_str().unwrap().into(),
                r["strength_rational"].as_str().unwrap().into(),
            )
        })
        .collect();
    assert_eq!(
        got,
        [
            ("prof".to_string(), "99/100".to_string()),
            ("assistant".into(), "1/5".into())
        ]
    );

    let o = run(&["rank", &corpus("dice.cp"), &corpus("dice.story"), "--effect", "wincar"]);
    let table = stdout(&o);
    assert!(table.lines().nth(1).unwrap().contains("throw(1,1)"), "{}", table);
}

#[test]
fn translate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "translate",
        &corpus("pen.sm"),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let theory = dir.path().join("pen.cp");
    let text = fs::read_to_string(&theory).unwrap();
    assert!(text.contains("prof:0.7 {0.01} <- ."));
    let story = dir.path().join("pen.0.story");
    let o = run(&["validate", theory.to_str().unwrap(), "--story", story.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let model = dir.path().join("chain.sm");
    fs::write(
        &model,
        "innate a : 0.3\nderived b = a\nderived c = ~b | a\ncontext a=0\n",
    )
    .unwrap();
    let o = run(&[
        "translate",
        model.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "validate",
        dir.path().join("chain.cp").to_str().unwrap(),
        "--story",
        dir.path().join("chain.0.story").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn translate_rejects_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("cyc.sm");
    fs::write(&model, "innate a : 0.3\nderived x = a & y\nderived y = x\n").unwrap();
    let o = run(&["translate", model.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("CyclicDependency"));
}

#[test]
fn sweeps() {
    for theorem in ["1", "2", "lemma2", "order-invariance"] {
        let o = run(&["check", "--theorem", theorem, "--seed", "3", "--count", "10"]);
        assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("0 counterexamples"));
    }
}

#[test]
fn env_seed_overrides_flag() {
    let o = Command::new(env!("CARGO_BIN_EXE_cpcause"))
        .args(["check", "--theorem", "2", "--seed", "3", "--count", "5"])
        .env("CPCAUSE_SEED", "17")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed 17"), "{}", stdout(&o));
    let again = Command::new(env!("CARGO_BIN_EXE_cpcause"))
        .args(["check", "--theorem", "2", "--seed", "3", "--count", "5"])
        .env("CPCAUSE_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(o.stdout, again.stdout);
}
