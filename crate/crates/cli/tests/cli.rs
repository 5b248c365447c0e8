use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chartdoc-forge")).args(args).output().expect("binary runs")
}

fn generate(out: &Path, seed: &str) -> Output {
    forge(&["generate", "--seed", seed, "--docs", "12", "--jobs", "2", "--out", out.to_str().unwrap()])
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn digest(root: &Path) -> String {
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(root.join("manifest.json")).unwrap()).unwrap();
    m["digest"].as_str().unwrap().to_string()
}

fn answer_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[test]
fn generate_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(generate(&a, "11").status.success());
    assert!(generate(&b, "11").status.success());
    assert_eq!(digest(&a), digest(&b));
    assert_eq!(stdout(&generate(&tmp.path().join("c"), "11")).trim(), digest(&a));
}

#[test]
fn usage_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("ds");
    assert_eq!(forge(&["generate", "--out", out.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(forge(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(forge(&["--help"]).status.code(), Some(0));
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "doc_count = 0\n").unwrap();
    assert_eq!(forge(&["generate", "--seed", "1", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn refuses_non_empty_output_without_force() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("ds");
    fs::create_dir(&out).unwrap();
    fs::write(out.join("keep.txt"), "x").unwrap();
    assert_eq!(generate(&out, "3").status.code(), Some(1));
    assert!(out.join("keep.txt").exists());
    let o = forge(&["generate", "--seed", "3", "--docs", "4", "--force", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!out.join("keep.txt").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn stats_debias_and_evaluate() {
    let tmp = TempDir::new().unwrap();
    let ds = tmp.path().join("ds");
    assert!(generate(&ds, "5").status.success());
    let d = ds.to_str().unwrap();

    let text = forge(&["stats", "--dataset", d]);
    assert!(text.status.success());
    assert!(stdout(&text).contains("documents"));
    let json = forge(&["stats", "--dataset", d, "--json"]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(parsed["total"]["docs"], 12);

    assert!(forge(&["debias", "--dataset", d]).status.success());
    assert!(forge(&["stats", "--dataset", d]).status.success());

    let mut lines = Vec::new();
    let mut total = 0;
    for entry in fs::read_dir(ds.join("qa")).unwrap() {
        for line in fs::read_to_string(entry.unwrap().path()).unwrap().lines() {
            let q: serde_json::Value = serde_json::from_str(line).unwrap();
            if q["answer"].is_null() {
                continue;
            }
            total += 1;
            lines.push(format!("{}\t{}", q["question_id"].as_str().unwrap(), answer_text(&q["answer"]["value"])));
        }
    }
    lines.push("not_a_question\tyes".into());
    let preds = tmp.path().join("preds.tsv");
    fs::write(&preds, lines.join("\n")).unwrap();
    let report = tmp.path().join("out/report.json");
    let o = forge(&["evaluate", "--dataset", d, "--preds", preds.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["overall"]["total"], total);
    assert_eq!(r["overall"]["correct"], total);
    assert_eq!(r["unknown_ids"][0], "not_a_question");
}

#[test]
fn evaluate_rejects_bad_predictions_without_a_report() {
    let tmp = TempDir::new().unwrap();
    let ds = tmp.path().join("ds");
    assert!(forge(&["generate", "--seed", "9", "--docs", "3", "--out", ds.to_str().unwrap()]).status.success());
    let report = tmp.path().join("report.json");
    let run = |preds: &Path| {
        forge(&["evaluate", "--dataset", ds.to_str().unwrap(), "--preds", preds.to_str().unwrap(), "--report", report.to_str().unwrap()])
    };
    assert_eq!(run(&tmp.path().join("missing.tsv")).status.code(), Some(1));
    let dup = tmp.path().join("dup.tsv");
    fs::write(&dup, "a\t1\na\t2\n").unwrap();
    assert_eq!(run(&dup).status.code(), Some(1));
    let malformed = tmp.path().join("bad.tsv");
    fs::write(&malformed, "no tab here\n").unwrap();
    assert_eq!(run(&malformed).status.code(), Some(1));
    assert!(!report.exists());
}

#[test]
fn build_hierarchy_writes_both_formats() {
    let tmp = TempDir::new().unwrap();
    let edges = tmp.path().join("edges.tsv");
    fs::write(&edges, "entity\nanimal\tentity\nplant\tentity\ndog\tanimal\ncat\tanimal\nrose\tplant\ntulip\tplant\n").unwrap();
    let tsv = tmp.path().join("tree.tsv");
    let json = tmp.path().join("tree.json");
    assert!(forge(&["build-hierarchy", "--edges", edges.to_str().unwrap(), "--out", tsv.to_str().unwrap()]).status.success());
    assert!(forge(&["build-hierarchy", "--edges", edges.to_str().unwrap(), "--out", json.to_str().unwrap()]).status.success());
    assert!(fs::read_to_string(&tsv).unwrap().contains("dog\tanimal"));
    serde_json::from_str::<serde_json::Value>(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(forge(&["build-hierarchy", "--edges", "/nonexistent", "--out", tsv.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn render_chart_from_table_and_spec() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("t.csv");
    fs::write(&csv, "year,Spain,Italy,France,Peru\n2020,10.5,8,11,4.25\n").unwrap();
    let (svg, spec, again) = (tmp.path().join("t.svg"), tmp.path().join("t.json"), tmp.path().join("again.svg"));
    let o = forge(&[
        "render-chart", "--spec", csv.to_str().unwrap(), "--subtype", "Vbar", "--seed", "4",
        "--out", svg.to_str().unwrap(), "--spec-out", spec.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));
    assert!(forge(&["render-chart", "--spec", spec.to_str().unwrap(), "--out", again.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(&svg).unwrap(), fs::read(&again).unwrap());
    assert_eq!(forge(&["render-chart", "--spec", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(
        forge(&["render-chart", "--spec", csv.to_str().unwrap(), "--subtype", "Nope", "--out", svg.to_str().unwrap()]).status.code(),
        Some(1)
    );
}
