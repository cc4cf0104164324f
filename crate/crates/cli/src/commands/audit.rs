use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde_json::json;
use synthaudit::dataio::read_embeddings;
use synthaudit::memaudit::{audit_with, contact_sheet, AuditConfig, AuditedPair};
use synthaudit::nnsearch::{metadata_keys, nearest_k, AllowAll, CorpusFilter, GroupFilter, MatchField};
use synthaudit::plot::{roc_svg, Panel, Series};
use synthaudit::preprocess::{load_raster, save_png};
use synthaudit::stats::{per_class_auroc, read_predictions, roc_curve, wilcoxon_one_sided};
use synthaudit::RasterImage;

use super::{check_threshold, create_dir, load_manifest, Grouping};
use crate::args::{AuditArgs, NnSearchArgs, ReportArgs, SummarizeArgs};
use crate::report::{AuditSection, NamedInterval, Report, RocSummary};
use crate::tables::{read_audit, read_pairs, write_audit, write_pairs, write_summary};
use crate::{progress, require_input, CliError, CliResult};

fn load_embeddings(path: &Path) -> CliResult<synthaudit::EmbeddingMatrix> {
    require_input(path)?;
    Ok(read_embeddings(path)?)
}

pub fn nn_search(a: NnSearchArgs) -> CliResult {
    let queries = load_embeddings(&a.queries)?;
    let corpus = load_embeddings(&a.corpus)?;
    let fields: Vec<MatchField> = a
        .match_fields
        .iter()
        .filter(|f| !f.trim().is_empty())
        .map(|f| f.parse().map_err(|e: synthaudit::nnsearch::SearchError| CliError::Usage(e.to_string())))
        .collect::<CliResult<_>>()?;
    let filter: Box<dyn CorpusFilter> = if fields.is_empty() {
        Box::new(AllowAll)
    } else {
        let path = a
            .manifest
            .as_ref()
            .ok_or_else(|| CliError::Usage("--match requires --manifest".into()))?;
        let manifest = load_manifest(path)?;
        let qk = metadata_keys(&manifest, queries.ids(), &fields)?;
        let ck = metadata_keys(&manifest, corpus.ids(), &fields)?;
        Box::new(GroupFilter::from_keys(&qk, &ck))
    };
    if a.topk == 0 {
        return Err(CliError::Usage("--topk must be at least 1".into()));
    }
    let found = nearest_k(&queries, &corpus, filter.as_ref(), a.topk, a.workers.workers)?;
    write_pairs(&a.out, &found)?;
    progress(
        "nn-search.done",
        json!({ "queries": queries.len(), "corpus": corpus.len(), "dim": corpus.dim(), "topk": a.topk }),
    );
    Ok(())
}

/// `<dir>/<id>.png`, falling back to JPEG extensions.
fn image_for(dir: &Path, id: &str) -> CliResult<PathBuf> {
    ["png", "jpg", "jpeg"]
        .iter()
        .map(|ext| dir.join(format!("{id}.{ext}")))
        .find(|p| p.exists())
        .ok_or_else(|| CliError::schema(dir, format!("no image for id {id:?}")))
}

/// Image file of every id referenced in `pairs`, checked up front.
fn image_paths(a: &AuditArgs, pairs: &[synthaudit::NeighborPair]) -> CliResult<ImagePaths> {
    let mut paths = ImagePaths::default();
    for p in pairs {
        if !paths.synthetic.contains_key(&p.query_id) {
            paths.synthetic.insert(p.query_id.clone(), image_for(&a.synthetic_dir, &p.query_id)?);
        }
        if !paths.real.contains_key(&p.neighbor_id) {
            paths.real.insert(p.neighbor_id.clone(), image_for(&a.real_dir, &p.neighbor_id)?);
        }
    }
    Ok(paths)
}

#[derive(Default)]
struct ImagePaths {
    synthetic: HashMap<String, PathBuf>,
    real: HashMap<String, PathBuf>,
}

impl ImagePaths {
    fn load(&self, p: &synthaudit::NeighborPair) -> synthaudit::Result<(RasterImage, RasterImage)> {
        Ok((
            load_raster(&self.synthetic[&p.query_id])?,
            load_raster(&self.real[&p.neighbor_id])?,
        ))
    }
}

pub fn audit(a: AuditArgs) -> CliResult {
    check_threshold(a.threshold)?;
    let [audit_csv, report_json] = <[PathBuf; 2]>::try_from(a.out.clone())
        .map_err(|_| CliError::Usage("--out takes AUDIT_CSV REPORT_JSON".into()))?;
    for dir in [&a.synthetic_dir, &a.real_dir] {
        require_input(dir)?;
    }
    let pairs = read_pairs(&a.pairs)?;
    if pairs.is_empty() {
        return Err(CliError::schema(&a.pairs, "no data rows"));
    }
    let cfg = AuditConfig::with_threshold(a.threshold)?;

    let paths = image_paths(&a, &pairs)?;
    let audited = synthaudit::pool::install(a.workers.workers, || audit_with(&pairs, &cfg, |p| paths.load(p)))
        .map_err(|e| CliError::Usage(e.to_string()))??;

    write_audit(&audit_csv, &audited)?;
    let grouping = Grouping::new(&a.group, &audited)?;
    let groups = grouping.summarize(&audited)?;
    let mut report = Report::new(AuditSection::new(a.threshold, grouping.field.clone(), &audited, groups));
    report.echo("command", "audit");
    report.echo("pairs", &a.pairs);
    report.echo("threshold", a.threshold);
    report.echo("patch", cfg.patch);
    report.echo("grid", cfg.grid);
    report.write(&report_json)?;

    if let Some(sheet) = &a.contact_sheet {
        let flagged: Vec<(RasterImage, RasterImage)> = pairs
            .iter()
            .zip(&audited)
            .filter(|(_, r)| r.flagged)
            .map(|(p, _)| paths.load(p))
            .collect::<synthaudit::Result<_>>()?;
        save_png(&contact_sheet(&flagged, 128), sheet)?;
    }
    progress(
        "audit.done",
        json!({ "pairs": audited.len(), "flagged": report.audit.n_flagged, "threshold": a.threshold }),
    );
    Ok(())
}

pub fn summarize(a: SummarizeArgs) -> CliResult {
    check_threshold(a.threshold)?;
    let audited = read_audit(&a.audit)?;
    let grouping = Grouping::new(&a.group, &audited)?;
    let groups = grouping.summarize(&audited)?;
    write_summary(&a.out, &groups, &grouping.label(), a.threshold)?;
    progress("summarize.done", json!({ "groups": groups.len(), "pairs": audited.len() }));
    Ok(())
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// One panel per class, one curve per prediction file.
fn roc_figure(preds: &[(String, synthaudit::ScoredPredictions)]) -> CliResult<(String, Vec<RocSummary>)> {
    let classes = preds[0].1.classes().to_vec();
    for (name, p) in preds {
        if p.classes() != classes.as_slice() {
            return Err(CliError::Usage(format!("{name}: classes differ from the first prediction file")));
        }
    }
    let mut panels: Vec<Panel> = classes
        .iter()
        .map(|c| Panel {
            title: c.clone(),
            series: Vec::new(),
        })
        .collect();
    let mut summaries = Vec::new();
    for (name, p) in preds {
        let aurocs = per_class_auroc(p)?;
        for (k, panel) in panels.iter_mut().enumerate() {
            let curve = roc_curve(&p.class_scores(k), &p.class_labels(k))?;
            panel.series.push(Series {
                label: format!("{name} (AUROC {:.3})", aurocs[k]),
                points: curve.points,
            });
        }
        summaries.push(RocSummary {
            name: name.clone(),
            classes: classes.clone(),
            macro_auroc: aurocs.iter().sum::<f64>() / aurocs.len() as f64,
            per_class_auroc: aurocs,
        });
    }
    Ok((roc_svg(&panels, "FPR", "TPR"), summaries))
}

pub(super) fn load_predictions(paths: &[PathBuf]) -> CliResult<Vec<(String, synthaudit::ScoredPredictions)>> {
    paths
        .iter()
        .map(|p| {
            require_input(p)?;
            Ok((file_stem(p), read_predictions(p)?))
        })
        .collect()
}

type NamedPredictions = (String, synthaudit::ScoredPredictions);

pub(super) fn write_roc_figure(
    paths: &[PathBuf],
    svg_path: Option<&Path>,
) -> CliResult<(Vec<NamedPredictions>, Vec<RocSummary>)> {
    let preds = load_predictions(paths)?;
    let (svg, summaries) = roc_figure(&preds)?;
    if let Some(out) = svg_path {
        std::fs::write(out, svg).map_err(|e| CliError::io(out, e))?;
    }
    Ok((preds, summaries))
}

pub fn report(a: ReportArgs) -> CliResult {
    check_threshold(a.threshold)?;
    let audited = read_audit(&a.audit)?;
    // Re-apply the requested threshold so the report is self-consistent.
    let audited: Vec<AuditedPair> = audited
        .into_iter()
        .map(|p| AuditedPair {
            flagged: synthaudit::memaudit::is_flagged(p.distance, a.threshold),
            ..p
        })
        .collect();
    let grouping = Grouping::new(&a.group, &audited)?;
    let groups = grouping.summarize(&audited)?;
    create_dir(&a.out_dir)?;
    write_summary(&a.out_dir.join("summary.csv"), &groups, &grouping.label(), a.threshold)?;

    let mut report = Report::new(AuditSection::new(a.threshold, grouping.field.clone(), &audited, groups));
    report.echo("command", "report");
    report.echo("audit", &a.audit);
    report.echo("threshold", a.threshold);
    report.echo("mu0", a.mu0);

    let distances: Vec<f64> = audited.iter().map(|p| p.distance).collect();
    match wilcoxon_one_sided(&distances, a.mu0) {
        Ok(w) => report.wilcoxon = Some(w),
        Err(e) => report.notes.push(format!("signed-rank test skipped: {e}")),
    }

    for path in &a.ci {
        require_input(path)?;
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let interval = serde_json::from_str(&text).map_err(|e| CliError::schema(path, e.to_string()))?;
        report.bootstrap.push(NamedInterval {
            name: file_stem(path),
            interval,
        });
    }
    for b in &report.bootstrap {
        if b.interval.degenerate_class_skips > 0 {
            let note = format!(
                "{}: {} class-resample cells skipped as label-degenerate",
                b.name, b.interval.degenerate_class_skips
            );
            report.notes.push(note);
        }
    }

    if !a.roc.is_empty() {
        let (_, summaries) = write_roc_figure(&a.roc, Some(&a.out_dir.join("roc.svg")))?;
        report.roc = summaries;
        report.echo("roc", &a.roc);
    }
    report.echo("ci", &a.ci);
    report.write(&a.out_dir.join("report.json"))?;
    progress(
        "report.done",
        json!({ "pairs": report.audit.n_pairs, "flagged": report.audit.n_flagged, "out_dir": a.out_dir }),
    );
    Ok(())
}
