use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn textcode(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_textcode"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = textcode(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = textcode(dir, args);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn prepared(dir: &Path, classes: &str, seed: &str) {
    ok(dir, &["synth", "--out", "syn", "--classes", classes, "--docs-per-class", "60", "--seed", seed]);
    ok(dir, &["prepare", "--input", "syn/records.jsonl", "--out", "corp"]);
}

fn metrics(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn synth_is_reproducible_and_seed_sensitive() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    ok(p, &["synth", "--out", "a", "--classes", "5", "--docs-per-class", "20", "--seed", "7"]);
    ok(p, &["synth", "--out", "b", "--classes", "5", "--docs-per-class", "20", "--seed", "7"]);
    ok(p, &["synth", "--out", "c", "--classes", "5", "--docs-per-class", "20", "--seed", "8"]);
    let a = fs::read(p.join("a/records.jsonl")).unwrap();
    assert_eq!(a, fs::read(p.join("b/records.jsonl")).unwrap());
    assert_ne!(a, fs::read(p.join("c/records.jsonl")).unwrap());
    assert_eq!(
        fs::read(p.join("a/keywords.json")).unwrap(),
        fs::read(p.join("b/keywords.json")).unwrap()
    );
}

#[test]
fn class_sizes_set_per_class_counts() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    ok(p, &["synth", "--out", "s", "--classes", "3", "--class-sizes", "4,5,6"]);
    let text = fs::read_to_string(p.join("s/records.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 15);
}

#[test]
fn eval_of_perfect_predictions_scores_one() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    let scores: Vec<Vec<f64>> = [0, 1, 2, 1, 0]
        .iter()
        .map(|&y| (0..3).map(|j| if j == y { 0.9 } else { 0.05 }).collect())
        .collect();
    let preds = serde_json::json!({ "scores": scores, "labels": [0, 1, 2, 1, 0], "num_classes": 3 });
    fs::write(p.join("p.json"), preds.to_string()).unwrap();
    ok(p, &["eval", "--predictions", "p.json", "--out", "ev", "--top-l", "1,2"]);
    let m = metrics(&p.join("ev/metrics.json"));
    assert_eq!(m["accuracy"], 1.0);
    assert_eq!(m["macro_f1"], 1.0);
}

#[test]
fn pipeline_trains_evaluates_and_explains() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    prepared(p, "6", "2");
    ok(p, &["embed", "--corpus", "corp", "--out", "vec.txt", "--dim", "16", "--iterations", "20", "--min-count", "1"]);
    let model = [
        "--vectors", "vec.txt", "--rnn-width", "16", "--g-width", "32", "--attention-width", "16",
        "--learning-rate", "0.01", "--batch-size", "16", "--max-epochs", "15",
    ];
    let mut args = vec!["train", "--corpus", "corp", "--out", "max.json", "--family", "MAX", "--history", "h.json"];
    args.extend(model);
    ok(p, &args);
    ok(p, &["train", "--corpus", "corp", "--out", "svm.json", "--family", "SVM"]);
    let mut args = vec!["train", "--corpus", "corp", "--out", "maxi.json", "--family", "MAXi"];
    args.extend(model);
    ok(p, &args);

    for m in ["max", "svm", "maxi"] {
        ok(p, &["eval", "--model", &format!("{m}.json"), "--corpus", "corp", "--out", &format!("ev_{m}")]);
    }
    assert!(metrics(&p.join("ev_max/metrics.json"))["accuracy"].as_f64().unwrap() > 0.9);
    assert!(metrics(&p.join("ev_svm/metrics.json"))["accuracy"].as_f64().unwrap() > 0.9);

    ok(p, &["eval", "--model", "maxi.json", "--corpus", "corp", "--out", "ev_f", "--fidelity-model", "max.json"]);
    assert!(metrics(&p.join("ev_f/metrics.json"))["fidelity"].is_number());

    let table = ok(
        p,
        &["compare", "MAX=ev_max/predictions.json", "SVM=ev_svm/predictions.json", "--json", "cmp.json"],
    );
    assert!(table.lines().any(|l| l.starts_with("SVM")));
    assert!(p.join("cmp.json").exists());

    let shown = ok(p, &["explain", "--model", "maxi.json", "--corpus", "corp", "--out", "e.html", "--limit", "3"]);
    assert_eq!(shown.lines().filter(|l| l.starts_with("# document")).count(), 3);
    assert!(fs::read_to_string(p.join("e.html")).unwrap().contains("<span class=\"u "));

    ok(p, &["distill", "--model", "maxi.json", "--corpus", "corp", "--k", "2", "--out", "dist"]);
    let first = fs::read_to_string(p.join("dist/train.jsonl")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    assert!(doc["diagnosis"].as_str().unwrap().split_whitespace().count() <= 2);

    let (c, err) = code(p, &["explain", "--model", "max.json", "--corpus", "corp", "--out", "x.html"]);
    assert_eq!(c, 1, "{err}");
}

#[test]
fn training_is_deterministic_for_a_seed() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    prepared(p, "4", "5");
    let run = |out: &str, seed: &str| {
        ok(
            p,
            &[
                "train", "--corpus", "corp", "--out", out, "--family", "GRU", "--embedding-dim", "8",
                "--rnn-width", "8", "--max-epochs", "3", "--seed", seed,
            ],
        );
        fs::read(p.join(out)).unwrap()
    };
    let a = run("a.json", "1");
    assert_eq!(a, run("b.json", "1"));
    assert_ne!(a, run("c.json", "2"));
}

#[test]
fn gridsearch_writes_ranked_rows_and_records_failures() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    prepared(p, "4", "9");
    fs::write(
        p.join("g.toml"),
        "[maxi]\ng_layers = [0, 1]\nrnn_width = [8]\nmax_epochs = [2]\n",
    )
    .unwrap();
    ok(
        p,
        &[
            "gridsearch", "--corpus", "corp", "--grid", "g.toml", "--family", "MAXi", "--embedding-dim", "8",
            "--jobs", "2", "--out", "g.csv",
        ],
    );
    let csv = fs::read_to_string(p.join("g.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("rank,point,g_layers,max_epochs,rnn_width"));
    // g_layers = 0 is invalid for the interpretable model and ranks last
    assert!(rows[1].starts_with("1,1,1,"));
    assert!(rows[2].starts_with("2,0,0,") && !rows[2].ends_with(','));
}

#[test]
fn config_file_fills_options_and_flags_override() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    prepared(p, "3", "4");
    fs::write(p.join("run.toml"), "family = \"SVM\"\nc = 0.5\nngram_max = 1\n").unwrap();
    ok(p, &["--config", "run.toml", "train", "--corpus", "corp", "--out", "a.json"]);
    ok(p, &["train", "--corpus", "corp", "--out", "b.json", "--family", "SVM", "--c", "0.5", "--ngram-max", "1"]);
    assert_eq!(fs::read(p.join("a.json")).unwrap(), fs::read(p.join("b.json")).unwrap());

    fs::write(p.join("bad.toml"), "famly = \"SVM\"\n").unwrap();
    let (c, err) = code(p, &["--config", "bad.toml", "train", "--corpus", "corp", "--out", "c.json"]);
    assert_eq!(c, 1);
    assert!(err.contains("famly"));
}

#[test]
fn exit_codes_follow_error_kind() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    let (c, err) = code(p, &["train", "--bogus"]);
    assert_eq!(c, 1);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("textcode: "));

    let (c, _) = code(p, &["train", "--corpus", "missing", "--out", "m.json", "--family", "MAX"]);
    assert_eq!(c, 2);

    prepared(p, "3", "1");
    let (c, err) = code(p, &["train", "--corpus", "corp", "--out", "m.json", "--family", "LSTM"]);
    assert_eq!(c, 1);
    assert!(err.contains("LSTM"));

    let (c, _) = code(p, &["train", "--corpus", "corp", "--out", "m.json"]);
    assert_eq!(c, 1);

    fs::write(p.join("broken.json"), "{not json").unwrap();
    let (c, _) = code(p, &["eval", "--predictions", "broken.json", "--out", "ev"]);
    assert_eq!(c, 2);

    assert_eq!(code(p, &["--help"]).0, 0);
}
