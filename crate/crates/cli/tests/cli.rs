use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topicstab"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "topicstab {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn corpus_train_align_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let texts = dir.path().join("texts");
    fs::create_dir(&texts).unwrap();
    for (name, text) in [
        ("ethics.txt", "Aristotle ethics virtue Kant duty ethics virtue Hume Mill"),
        ("bridges.txt", "steel bridge truss load span steel bridge load"),
        ("mixed.txt", "Kant bridge ethics load virtue span duty truss"),
    ] {
        fs::write(texts.join(name), text).unwrap();
    }
    let stop = dir.path().join("stop.txt");
    fs::write(&stop, "# common\nmill\n").unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    run(&["corpus", "build", "--input", p(&texts), "--output", p(&corpus), "--stoplist", p(&stop)]);

    let text = fs::read_to_string(&corpus).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["D"], 3);
    assert_eq!(header["version"], 1);
    let vocab: Vec<&str> = header["vocabulary"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(vocab.contains(&"ethics") && !vocab.contains(&"mill") && !vocab.contains(&"hume"));
    assert_eq!(text.lines().count(), 4);

    let sample = dir.path().join("sample.jsonl");
    run(&["corpus", "sample", "--input", p(&corpus), "--n", "2", "--seed", "3", "--output", p(&sample)]);
    let sample_text = fs::read_to_string(&sample).unwrap();
    assert_eq!(sample_text.lines().count(), 3);

    let (m1, m2) = (dir.path().join("m1.model"), dir.path().join("m2.model"));
    run(&["train", "--corpus", p(&corpus), "--k", "2", "--seed", "1", "--iters", "50", "--output", p(&m1)]);
    run(&["train", "--corpus", p(&sample), "--k", "3", "--seed", "2", "--alpha", "0.5", "--iters", "50", "--output", p(&m2)]);
    let model_text = fs::read_to_string(&m1).unwrap();
    assert_eq!(model_text.lines().count(), 3);

    let out = dir.path().join("align.json");
    run(&["align", "--m1", p(&m1), "--m2", p(&m2), "--output", p(&out)]);
    let a: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((a["k1"].as_u64(), a["k2"].as_u64()), (Some(2), Some(3)));
    assert_eq!(a["pairs"].as_array().unwrap().len(), 2);
    for key in ["union_vocab_size", "alignment_distance", "topic_overlap"] {
        assert!(a.get(key).is_some(), "{key}");
    }

    run(&["align", "--m1", p(&m1), "--m2", p(&m1), "--divergence", "--output", p(&out)]);
    let a: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(a["alignment_distance"], 0.0);
    assert_eq!(a["topic_overlap"], 1.0);
}

#[test]
fn jsonl_input_and_duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("raw.jsonl");
    fs::write(&input, "{\"id\":\"a\",\"text\":\"cat dog cat\"}\n{\"id\":\"a\",\"text\":\"dog\"}\n").unwrap();
    let out = bin()
        .args(["corpus", "build", "--input", p(&input), "--output", p(&dir.path().join("c.jsonl"))])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate document id: a"));
}

#[test]
fn corrupted_model_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("bad.model");
    fs::write(&m, "{\"version\":1,\"K\":2}\n0.5 0.5\n").unwrap();
    let out = bin()
        .args(["align", "--m1", p(&m), "--m2", p(&m), "--output", p(&dir.path().join("o.json"))])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("format error in V"), "{err}");
}

#[test]
fn synth_experiment_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("synth");
    run(&[
        "experiment", "synth", "--k-true", "3", "--vocab", "40", "--docs", "60", "--doclen", "30",
        "--alpha", "0.3", "--beta-conc", "0.2", "--seed", "5", "--outdir", p(&synth),
    ]);
    let corpus = synth.join("corpus.jsonl");
    assert!(synth.join("true_phi.model").exists());

    let plan = dir.path().join("plan.json");
    fs::write(
        &plan,
        r#"{"k_values":[3],"spanning_count":2,"sample_sizes":[20,40],"replicates_per_size":2,"base_seed":9,"trainer":{"iterations":40}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    run(&["experiment", "run", "--corpus", p(&corpus), "--plan", p(&plan), "--outdir", p(&out), "--threads", "2"]);
    for f in ["metrics.csv", "summary.csv", "report.json", "alignment_distance.svg", "topic_overlap.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(out.join("models/k3/spanning_1.model").exists());
    assert!(out.join("models/k3/sample_n40_r1.model").exists());
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1 + 2 + 2 * 2 * 2);

    // the true topics can be aligned against a trained model
    let align_out = dir.path().join("truth.json");
    run(&[
        "align", "--m1", p(&out.join("models/k3/spanning_0.model")), "--m2", p(&synth.join("true_phi.model")),
        "--output", p(&align_out),
    ]);

    let again = dir.path().join("again");
    run(&["report", "--in", p(&out.join("report.json")), "--outdir", p(&again)]);
    for f in ["metrics.csv", "summary.csv", "alignment_distance.svg", "topic_overlap.svg"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }
    run(&["report", "--in", p(&out.join("report.json")), "--outdir", p(&again), "--linear-x"]);
    let svg = fs::read_to_string(again.join("topic_overlap.svg")).unwrap();
    assert!(svg.contains("data-x-scale=\"linear\""));
}
