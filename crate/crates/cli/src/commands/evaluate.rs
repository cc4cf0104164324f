use std::path::PathBuf;

use serde_json::json;
use synthaudit::dataio::read_embeddings;
use synthaudit::fid::{frechet_distance, gaussian_moments, rank_checkpoints};
use synthaudit::stats::{
    bootstrap_auroc_diff, read_responses, reader_study_scores, roc_curve, wilcoxon_one_sided,
    BootstrapOptions,
};

use super::audit::{load_predictions, write_roc_figure};
use super::write_json;
use crate::args::{BootstrapArgs, FidArgs, RankArgs, ReaderArgs, RocArgs, WilcoxonArgs};
use crate::tables::{read_column, write_rows};
use crate::{progress, require_input, CliError, CliResult};

pub fn wilcoxon(a: WilcoxonArgs) -> CliResult {
    let values = read_column(&a.values, &a.column)?;
    let r = wilcoxon_one_sided(&values, a.mu0)?;
    println!(
        "W+ = {} over n = {} ({} zero), p = {:e} ({:?}) for median > {}",
        r.w_plus, r.n, r.n_zeros, r.p_value, r.method, r.mu0
    );
    if let Some(out) = &a.out {
        write_json(out, &r)?;
    }
    Ok(())
}

pub fn roc(a: RocArgs) -> CliResult {
    let (preds, summaries) = write_roc_figure(&a.preds, a.out_svg.as_deref())?;
    if let Some(out) = &a.out_curves {
        let mut rows = Vec::new();
        for (name, p) in &preds {
            for (k, class) in p.classes().iter().enumerate() {
                let curve = roc_curve(&p.class_scores(k), &p.class_labels(k))?;
                for (&(fpr, tpr), t) in curve.points.iter().zip(&curve.thresholds) {
                    rows.push(vec![
                        name.clone(),
                        class.clone(),
                        format!("{t:?}"),
                        format!("{fpr:?}"),
                        format!("{tpr:?}"),
                    ]);
                }
            }
        }
        write_rows(out, &["model", "class", "threshold", "fpr", "tpr"], &rows)?;
    }
    for s in &summaries {
        println!("{}: macro AUROC {:.4}", s.name, s.macro_auroc);
    }
    if let Some(out) = &a.out {
        write_json(out, &summaries)?;
    }
    Ok(())
}

pub fn bootstrap(a: BootstrapArgs) -> CliResult {
    if a.resamples == 0 {
        return Err(CliError::Usage("--resamples must be at least 1".into()));
    }
    let preds = load_predictions(&[a.a.clone(), a.b.clone()])?;
    let ci = bootstrap_auroc_diff(
        &preds[0].1,
        &preds[1].1,
        BootstrapOptions {
            resamples: a.resamples,
            seed: a.seed,
            workers: a.workers.workers,
        },
    )?;
    write_json(&a.out, &ci)?;
    progress(
        "bootstrap-diff.done",
        json!({ "point": ci.point_estimate, "lo": ci.lo, "hi": ci.hi, "resamples": ci.resamples, "seed": ci.seed }),
    );
    Ok(())
}

fn embeddings(path: &PathBuf) -> CliResult<synthaudit::EmbeddingMatrix> {
    require_input(path)?;
    Ok(read_embeddings(path)?)
}

pub fn fid(a: FidArgs) -> CliResult {
    let ma = gaussian_moments(&embeddings(&a.a)?)?;
    let mb = gaussian_moments(&embeddings(&a.b)?)?;
    let value = frechet_distance(&ma, &mb)?;
    println!("{value:.6}");
    if let Some(out) = &a.out {
        write_json(out, &json!({ "fid": value, "n_a": ma.n, "n_b": mb.n, "dim": ma.dim() }))?;
    }
    Ok(())
}

pub fn rank(a: RankArgs) -> CliResult {
    let reference = embeddings(&a.reference)?;
    require_input(&a.candidates)?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.candidates)
        .map_err(|e| CliError::io(&a.candidates, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "emb"))
        .collect();
    files.sort();
    let candidates = files
        .iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, read_embeddings(p)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let ranked = rank_checkpoints(&candidates, &reference, a.workers.workers)?;
    let rows: Vec<Vec<String>> = ranked
        .iter()
        .enumerate()
        .map(|(i, (name, fid))| vec![(i + 1).to_string(), name.clone(), format!("{fid:.9}")])
        .collect();
    write_rows(&a.out, &["rank", "checkpoint", "fid"], &rows)?;
    progress("rank.done", json!({ "candidates": ranked.len() }));
    Ok(())
}

pub fn reader_study(a: ReaderArgs) -> CliResult {
    require_input(&a.responses)?;
    let scores = reader_study_scores(&read_responses(&a.responses)?)?;
    write_json(&a.out, &scores)?;
    if let Some(out) = &a.out_csv {
        let rows: Vec<Vec<String>> = scores
            .per_reader
            .iter()
            .map(|s| {
                vec![
                    s.reader_id.clone(),
                    s.group.clone(),
                    s.n_items.to_string(),
                    format!("{:.4}", s.accuracy),
                    format!("{:.4}", s.mean_confidence),
                ]
            })
            .collect();
        write_rows(out, &["reader_id", "group", "n_items", "accuracy", "mean_confidence"], &rows)?;
    }
    for g in &scores.groups {
        println!("{}: accuracy {} over {} readers", g.group, g.accuracy_percent(), g.n_readers);
    }
    Ok(())
}
