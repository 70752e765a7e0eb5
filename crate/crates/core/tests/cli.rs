use std::path::Path;
use std::process::{Command, Output};

use linkclust::harness::SynthSpec;
use serde_json::Value;

fn linkclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkclust"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = linkclust(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_spec(dir: &Path) -> std::path::PathBuf {
    let spec = SynthSpec::planted(&[9, 7, 5], 10, 40, 0.8, 0.0, 0.0, 11);
    let path = dir.join("spec.json");
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    path
}

#[test]
fn synth_cluster_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let spec = write_spec(d);
    let corpus = d.join("corpus.jsonl");
    ok(&["synth", "--spec", p(&spec), "--out", p(&corpus)]);
    assert_eq!(std::fs::read_to_string(&corpus).unwrap().lines().count(), 21);

    let (result, seeds, vectors) = (d.join("result.json"), d.join("seeds.json"), d.join("vectors.csv"));
    ok(&[
        "cluster",
        "--corpus",
        p(&corpus),
        "--alpha",
        "0.5",
        "--dump-seeds",
        p(&seeds),
        "--dump-vectors",
        p(&vectors),
        "--out",
        p(&result),
    ]);
    let r = json(&result);
    assert_eq!(r["k_seed"], 3);
    assert_eq!(r["k_final"], 3);
    for c in r["clusters"].as_array().unwrap() {
        assert_eq!(c["origin"], "seed");
        assert!(!c["top_terms"].as_array().unwrap().is_empty());
    }
    let s = json(&seeds);
    assert_eq!(s["k"], 3);
    assert_eq!(s["groups"].as_array().unwrap().len(), 3);
    assert!(s["unseeded"].is_array());
    assert!(std::fs::read_to_string(&vectors)
        .unwrap()
        .starts_with("doc_id,term,weight\n"));

    let csv = ok(&["eval", "--result", p(&result), "--corpus", p(&corpus)]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "method,cluster_id,size,matched_category,purity,entropy,precision,recall"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().skip(1).all(|l| l.contains(",1,0,1,1")), "{csv}");

    let report: Value = serde_json::from_str(&ok(&[
        "eval",
        "--result",
        p(&result),
        "--corpus",
        p(&corpus),
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(report["aggregate"]["purity"], 1.0);
    assert_eq!(report["weighting"], "size");
}

#[test]
fn baselines_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let spec = write_spec(d);
    let corpus = d.join("corpus.jsonl");
    ok(&["synth", "--spec", p(&spec), "--out", p(&corpus)]);

    for method in ["kmeans", "skmeans"] {
        let out: Value = serde_json::from_str(&ok(&[
            "cluster",
            "--corpus",
            p(&corpus),
            "--method",
            method,
            "--k",
            "3",
            "--seed",
            "5",
        ]))
        .unwrap();
        assert_eq!(out["method"], method);
        let placed: usize = out["clusters"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["members"].as_array().unwrap().len())
            .sum::<usize>()
            + out["miscellaneous"].as_array().unwrap().len();
        assert_eq!(placed, 21);
    }

    let cmp = d.join("cmp.csv");
    ok(&[
        "compare",
        "--spec",
        p(&spec),
        "--methods",
        "linked,skmeans",
        "--k",
        "6",
        "--out",
        p(&cmp),
    ]);
    let text = std::fs::read_to_string(&cmp).unwrap();
    assert!(text.starts_with(
        "method,cluster_id,size,matched_category,purity,entropy,precision,recall,k_seed,k_final,runtime_ms\n"
    ));
    assert!(
        text.lines().any(|l| l.starts_with("linked,all,21,,1,0,1,1,3,3,")),
        "{text}"
    );
    assert!(text.lines().any(|l| l.starts_with("skmeans,all,")));
    assert!(!text.lines().any(|l| l.starts_with("kmeans,")));
}

#[test]
fn errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("c.jsonl");
    std::fs::write(
        &corpus,
        "{\"url\":\"http://a\",\"text\":\"x\"}\n{\"url\":\"http://a/\",\"text\":\"y\"}\n",
    )
    .unwrap();
    let out = linkclust(&["cluster", "--corpus", p(&corpus)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let out = linkclust(&["cluster", "--corpus", p(&d.join("missing.jsonl"))]);
    assert!(!out.status.success());

    std::fs::write(&corpus, "{\"url\":\"http://a\",\"text\":\"alpha beta\"}\n").unwrap();
    assert!(!linkclust(&["cluster", "--corpus", p(&corpus), "--alpha", "2"])
        .status
        .success());
    assert!(!linkclust(&["cluster", "--corpus", p(&corpus), "--method", "kmeans"])
        .status
        .success());

    let result = d.join("r.json");
    ok(&["cluster", "--corpus", p(&corpus), "--out", p(&result)]);
    let out = linkclust(&["eval", "--result", p(&result), "--corpus", p(&corpus)]);
    assert!(!out.status.success(), "unlabeled corpus must be rejected");
}

#[test]
fn stats_and_custom_stoplist() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("c.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            "{\"url\":\"http://a\",\"html\":\"<p>Shop Puma shoes</p>\",\"outlinks\":[\"http://b\"],\"label\":\"brand\"}\n",
            "{\"url\":\"http://b\",\"text\":\"Puma shoes sale\",\"label\":\"brand\"}\n"
        ),
    )
    .unwrap();
    let stats: Value = serde_json::from_str(&ok(&["stats", "--corpus", p(&corpus)])).unwrap();
    assert_eq!(stats["n"], 2);
    assert_eq!(stats["edge_count"], 1);
    assert_eq!(stats["category_histogram"]["brand"], 2);

    let stop = d.join("stop.txt");
    std::fs::write(&stop, "shop\nsale\n").unwrap();
    let vectors = d.join("v.csv");
    ok(&[
        "cluster",
        "--corpus",
        p(&corpus),
        "--stoplist",
        p(&stop),
        "--dump-vectors",
        p(&vectors),
    ]);
    let csv = std::fs::read_to_string(&vectors).unwrap();
    assert!(!csv.contains(",shop,") && !csv.contains(",sale,"), "{csv}");
}
