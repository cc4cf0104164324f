mod common;

use std::process::Command;

use common::{flagged_in_report, id_pairs, run, s, toy, toy_pipeline};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_synthaudit"))
}

#[test]
fn help_exits_zero() {
    let out = bin().args(["audit", "--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("--synthetic-dir") && text.contains("--threshold"));
}

#[test]
fn missing_required_flag_is_usage_error() {
    let out = bin()
        .args(["nn-search", "--queries", "q.emb", "--out", "pairs.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--corpus") && err.contains("Usage"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(bin().arg("memorize").output().unwrap().status.code(), Some(1));
}

#[test]
fn missing_input_is_usage_error_and_bad_data_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = s(&dir.path().join("nope.csv"));
    assert_eq!(run(&["wilcoxon", "--values", &missing]), 1);

    let header_only = dir.path().join("audit.csv");
    std::fs::write(&header_only, "synthetic_id,real_id,cosine,distance,flagged\n").unwrap();
    let out = s(&dir.path().join("summary.csv"));
    assert_eq!(run(&["summarize", "--audit", &s(&header_only), "--out", &out]), 2);
    let rep = s(&dir.path().join("rep"));
    assert_eq!(run(&["report", "--audit", &s(&header_only), "--out-dir", &rep]), 2);

    let bad_threshold = run(&["summarize", "--audit", &s(&header_only), "--threshold", "1.5", "--out", &out]);
    assert_eq!(bad_threshold, 1);
}

#[test]
fn toy_pipeline_finds_the_planted_copies() {
    let dir = tempfile::tempdir().unwrap();
    let r = toy_pipeline(dir.path());
    let planted = id_pairs(&toy().join("planted.csv"));
    assert_eq!(planted.len(), 5);
    assert_eq!(flagged_in_report(&r.report_dir.join("report.json")), planted);
    assert_eq!(flagged_in_report(&r.audit_report), planted);

    let summary = std::fs::read_to_string(&r.summary).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("Specialty,Distance,Image Pairs,Pairs ≤ 0.15"));
    assert_eq!(lines.count(), 3);
    let svg = std::fs::read_to_string(r.report_dir.join("roc.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 9);
}

#[test]
fn report_matches_shipped_schema() {
    let dir = tempfile::tempdir().unwrap();
    let r = toy_pipeline(dir.path());
    let schema_path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for path in [r.report_dir.join("report.json"), r.audit_report.clone()] {
        let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", path.display());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = toy_pipeline(a.path());
    let rb = toy_pipeline(b.path());
    let read = |p: &std::path::Path| std::fs::read(p).unwrap();
    for (x, y) in [
        (&ra.pairs, &rb.pairs),
        (&ra.audit, &rb.audit),
        (&ra.summary, &rb.summary),
        (&ra.wilcoxon, &rb.wilcoxon),
        (&ra.ci, &rb.ci),
    ] {
        assert_eq!(read(x), read(y), "{}", x.display());
    }
    assert_eq!(read(&ra.report_dir.join("roc.svg")), read(&rb.report_dir.join("roc.svg")));
    assert_eq!(read(&ra.report_dir.join("summary.csv")), read(&rb.report_dir.join("summary.csv")));
    let img = |d: &std::path::Path| read(&d.join("img/syn_radiology_01.png"));
    assert_eq!(img(&ra.dir), img(&rb.dir));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let t = toy();
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "2", "8"] {
        let out = dir.path().join(format!("ci{workers}.json"));
        let code = run(&[
            "bootstrap-diff",
            "--a",
            &s(&t.join("preds_real_2k.csv")),
            "--b",
            &s(&t.join("preds_mixed_1k_1k.csv")),
            "--resamples",
            "300",
            "--workers",
            workers,
            "--out",
            &s(&out),
        ]);
        assert_eq!(code, 0);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let t = toy();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "resamples = 50\nseed = 3\nthreshold = 0.2\n").unwrap();
    let ci = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec![
            "--config".to_string(),
            s(&cfg),
            "bootstrap-diff".into(),
            "--a".into(),
            s(&t.join("preds_real_2k.csv")),
            "--b".into(),
            s(&t.join("preds_real_1k.csv")),
            "--out".into(),
            s(&out),
        ];
        args.extend(extra.iter().map(|e| e.to_string()));
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&argv), 0);
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
        (v["resamples"].as_u64().unwrap(), v["seed"].as_u64().unwrap())
    };
    assert_eq!(ci("a.json", &[]), (50, 3));
    assert_eq!(ci("b.json", &["--seed", "11"]), (50, 11));
}

#[test]
fn seed_defaults_to_seventeen() {
    let t = toy();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ci.json");
    let code = run(&[
        "bootstrap-diff",
        "--a",
        &s(&t.join("preds_real_2k.csv")),
        "--b",
        &s(&t.join("preds_real_1k.csv")),
        "--resamples",
        "20",
        "--out",
        &s(&out),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["seed"], 17);
}

#[test]
fn split_prompt_rank_fid_and_reader_study_run() {
    let t = toy();
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| s(&dir.path().join(n));
    let manifest = s(&t.join("manifest.jsonl"));
    assert_eq!(run(&["split", "--manifest", &manifest, "--out", &d("split.jsonl")]), 0);
    let m = synthaudit::dataio::load_manifest(dir.path().join("split.jsonl")).unwrap();
    assert!(m.records.iter().all(|r| r.split.is_some()));

    assert_eq!(
        run(&["prompt", "--manifest", &manifest, "--template", "An image showing {labels}", "--out", &d("p.jsonl")]),
        0
    );
    let m = synthaudit::dataio::load_manifest(dir.path().join("p.jsonl")).unwrap();
    assert_eq!(m.records[0].prompt.as_deref(), Some("An image showing melanoma"));

    let cands = dir.path().join("cands");
    std::fs::create_dir(&cands).unwrap();
    std::fs::copy(t.join("real.emb"), cands.join("ckpt_same.emb")).unwrap();
    std::fs::copy(t.join("synthetic.emb"), cands.join("ckpt_other.emb")).unwrap();
    assert_eq!(run(&["rank", "--reference", &s(&t.join("real.emb")), "--candidates", &s(&cands), "--out", &d("rank.csv")]), 0);
    let rank = std::fs::read_to_string(dir.path().join("rank.csv")).unwrap();
    assert!(rank.lines().nth(1).unwrap().starts_with("1,ckpt_same,"));

    assert_eq!(run(&["fid", "--a", &s(&t.join("real.emb")), "--b", &s(&t.join("real.emb")), "--out", &d("fid.json")]), 0);
    assert_eq!(
        run(&["reader-study", "--responses", &s(&t.join("responses.csv")), "--out", &d("r.json"), "--out-csv", &d("r.csv")]),
        0
    );
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["std_kind"], "sample");
    assert_eq!(v["per_reader"].as_array().unwrap().len(), 6);
}

#[test]
fn roc_subcommand_writes_curves() {
    let t = toy();
    let dir = tempfile::tempdir().unwrap();
    let curves = dir.path().join("curves.csv");
    let svg = dir.path().join("roc.svg");
    assert_eq!(
        run(&["roc", "--preds", &s(&t.join("preds_real_2k.csv")), "--out-curves", &s(&curves), "--out-svg", &s(&svg)]),
        0
    );
    let text = std::fs::read_to_string(&curves).unwrap();
    assert!(text.starts_with("model,class,threshold,fpr,tpr\npreds_real_2k,melanoma,inf,0.0,0.0\n"));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}
