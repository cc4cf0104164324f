#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub fn toy() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy")
}

pub fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

/// Runs the CLI in-process and returns its exit code.
pub fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["synthaudit"];
    argv.extend_from_slice(args);
    synthaudit_cli::run(argv)
}

/// Outputs of one full toy-fixture pipeline.
pub struct ToyRun {
    pub dir: PathBuf,
    pub pairs: PathBuf,
    pub audit: PathBuf,
    pub audit_report: PathBuf,
    pub summary: PathBuf,
    pub wilcoxon: PathBuf,
    pub ci: PathBuf,
    pub report_dir: PathBuf,
}

/// preprocess → nn-search → audit → summarize → wilcoxon → bootstrap-diff →
/// report, with the bundled embeddings standing in for the encoder. Panics
/// on the first non-zero exit.
pub fn toy_pipeline(dir: &Path) -> ToyRun {
    let t = toy();
    let manifest = s(&t.join("manifest.jsonl"));
    let img = dir.join("img");
    let r = ToyRun {
        dir: dir.to_path_buf(),
        pairs: dir.join("pairs.csv"),
        audit: dir.join("audit.csv"),
        audit_report: dir.join("audit_report.json"),
        summary: dir.join("summary.csv"),
        wilcoxon: dir.join("wilcoxon.json"),
        ci: dir.join("ci.json"),
        report_dir: dir.join("report"),
    };
    let steps: Vec<Vec<String>> = vec![
        vec!["preprocess".into(), "--manifest".into(), manifest.clone(), "--out-dir".into(), s(&img)],
        vec![
            "nn-search".into(),
            "--queries".into(),
            s(&t.join("synthetic.emb")),
            "--corpus".into(),
            s(&t.join("real.emb")),
            "--manifest".into(),
            manifest.clone(),
            "--match".into(),
            "specialty,image_type".into(),
            "--out".into(),
            s(&r.pairs),
        ],
        vec![
            "audit".into(),
            "--pairs".into(),
            s(&r.pairs),
            "--synthetic-dir".into(),
            s(&img),
            "--real-dir".into(),
            s(&img),
            "--threshold".into(),
            "0.15".into(),
            "--manifest".into(),
            manifest.clone(),
            "--out".into(),
            s(&r.audit),
            s(&r.audit_report),
        ],
        vec!["summarize".into(), "--audit".into(), s(&r.audit), "--manifest".into(), manifest.clone(), "--out".into(), s(&r.summary)],
        vec!["wilcoxon".into(), "--values".into(), s(&r.audit), "--column".into(), "distance".into(), "--out".into(), s(&r.wilcoxon)],
        vec![
            "bootstrap-diff".into(),
            "--a".into(),
            s(&t.join("preds_real_2k.csv")),
            "--b".into(),
            s(&t.join("preds_real_1k.csv")),
            "--resamples".into(),
            "500".into(),
            "--out".into(),
            s(&r.ci),
        ],
        vec![
            "report".into(),
            "--audit".into(),
            s(&r.audit),
            "--manifest".into(),
            manifest,
            "--ci".into(),
            s(&r.ci),
            "--roc".into(),
            s(&t.join("preds_real_2k.csv")),
            "--roc".into(),
            s(&t.join("preds_real_1k.csv")),
            "--roc".into(),
            s(&t.join("preds_mixed_1k_1k.csv")),
            "--out-dir".into(),
            s(&r.report_dir),
        ],
    ];
    for step in steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        assert_eq!(run(&args), 0, "step failed: {}", step[0]);
    }
    r
}

/// `(synthetic_id, real_id)` rows of a two-column CSV.
pub fn id_pairs(path: &Path) -> Vec<(String, String)> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let mut v: Vec<(String, String)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    v.sort();
    v
}

pub fn flagged_in_report(report: &Path) -> Vec<(String, String)> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let mut out: Vec<(String, String)> = v["audit"]["flagged_pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["synthetic_id"].as_str().unwrap().to_string(), p["real_id"].as_str().unwrap().to_string()))
        .collect();
    out.sort();
    out
}
