use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdprelex")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["ttest", "1,2"]), 1);
    assert_eq!(code(&["train-re", "x", "--model", "y", "--dropout", "1.5"]), 1);
    assert_eq!(code(&["ttest", "1,2", "3,4", "--report", "xml"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.conllu");
    assert_eq!(code(&["convert", p(&missing), "-o", p(&dir.path().join("out"))]), 2);

    let bad = dir.path().join("bad.conllu");
    fs::write(&bad, "1\tA\t_\tDT\n").unwrap();
    assert_eq!(code(&["convert", p(&bad), "-o", p(&dir.path().join("out"))]), 2);

    let model = dir.path().join("model");
    fs::write(&model, "not a model\n").unwrap();
    assert_eq!(code(&["parse", p(&bad), "--model", p(&model)]), 2);
    assert_eq!(code(&["ttest", "1,x", "3,4"]), 2);
}

#[test]
fn degenerate_ttest_exits_3() {
    assert_eq!(code(&["ttest", "2,3,4", "1,2,3"]), 3);
}

#[test]
fn ttest_reports() {
    let tsv = ok(&["ttest", "11.1,10.9,11.0,11.2,10.8", "10,10,10,10,10"]);
    assert!(tsv.contains("14.142"), "{}", tsv);
    let json = ok(&["ttest", "1,2,4", "0,0,1", "--report", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["df"], 2);
}

#[test]
fn end_to_end_on_a_small_synthetic_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("corpus");
    ok(&["synth", "-o", p(&corpus), "--documents", "4", "--sentences", "6", "--seed", "3"]);
    let treebank = corpus.join("treebank.conllu");
    assert!(corpus.join("doc001.txt").exists());

    let converted = d.join("train.conllu");
    ok(&["convert", p(&treebank), "-o", p(&converted)]);

    let parser = d.join("parser.model");
    ok(&["train-parser", p(&converted), "--model", p(&parser), "--epochs", "5", "--hidden", "32", "--seed", "1"]);

    let parsed = d.join("parsed.conllu");
    ok(&["parse", p(&treebank), "--model", p(&parser), "-o", p(&parsed)]);
    let json = ok(&["eval-parser", p(&converted), "--model", p(&parser), "--report", "json"]);
    let scores: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(scores["uas"].as_f64().unwrap() > 0.0);

    let paths = d.join("paths.sdp");
    let candidates = d.join("candidates.tsv");
    ok(&[
        "extract-sdp",
        p(&parsed),
        "--corpus",
        p(&corpus),
        "-o",
        p(&paths),
        "--write-candidates",
        p(&candidates),
    ]);
    let lines = fs::read_to_string(&paths).unwrap();
    assert!(lines.lines().count() > 5);
    assert!(lines.lines().all(|l| l.split('\t').count() == 5));

    let again = d.join("paths2.sdp");
    ok(&["extract-sdp", p(&parsed), "--candidates", p(&candidates), "-o", p(&again)]);
    assert_eq!(fs::read_to_string(&again).unwrap(), lines);

    let relex = d.join("relex.model");
    ok(&["train-re", p(&paths), "--model", p(&relex), "--epochs", "2", "--hidden", "8", "--seed", "5"]);
    let predicted = d.join("predicted.sdp");
    let out = run(&["predict-re", p(&paths), "--model", p(&relex), "-o", p(&predicted)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("micro_f1\t"));
    assert_eq!(fs::read_to_string(&predicted).unwrap().lines().count(), lines.lines().count());

    let cv = |confusion: &Path| {
        ok(&[
            "crossval",
            p(&corpus),
            "--tagged",
            p(&treebank),
            "--model",
            p(&parser),
            "--folds",
            "2",
            "--epochs",
            "1",
            "--hidden",
            "8",
            "--seed",
            "9",
            "--confusion",
            p(confusion),
        ])
    };
    let first = cv(&d.join("c1.tsv"));
    let second = cv(&d.join("c2.tsv"));
    assert_eq!(first, second);
    assert!(first.contains("fold1") && first.contains("pooled") && first.contains("average"));
    assert_eq!(fs::read(d.join("c1.tsv")).unwrap(), fs::read(d.join("c2.tsv")).unwrap());
}
