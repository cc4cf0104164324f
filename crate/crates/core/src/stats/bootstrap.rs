use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::roc::TieGroups;
use super::{macro_auroc, ScoredPredictions, StatsError};
use crate::preprocess::percentile;
use crate::rng;

/// Stream offset keeping bootstrap draws apart from other seeded consumers.
const BOOTSTRAP_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapOptions {
    pub resamples: usize,
    pub seed: u64,
    /// 0 selects the global rayon pool.
    pub workers: usize,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            resamples: 2000,
            seed: 17,
            workers: 0,
        }
    }
}

/// Percentile interval of `macro_auroc(A) − macro_auroc(B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub point_estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub resamples: usize,
    pub seed: u64,
    /// Total (resample, class) cells dropped from a macro average because
    /// the class had only one label value in that resample.
    pub degenerate_class_skips: usize,
    /// Resamples where every class was degenerate; they contribute no value.
    pub degenerate_resamples: usize,
}

struct Prepared {
    labels: Vec<Vec<bool>>,
    a: Vec<TieGroups>,
    b: Vec<TieGroups>,
}

impl Prepared {
    fn new(a: &ScoredPredictions, b: &ScoredPredictions) -> Self {
        let k = a.classes().len();
        Prepared {
            labels: (0..k).map(|c| a.class_labels(c)).collect(),
            a: (0..k).map(|c| TieGroups::new(&a.class_scores(c))).collect(),
            b: (0..k).map(|c| TieGroups::new(&b.class_scores(c))).collect(),
        }
    }

    /// Macro difference under per-example multiplicities, with the number of
    /// classes skipped.
    fn difference(&self, weights: &[u32]) -> (Option<f64>, usize) {
        let (mut sa, mut sb, mut used) = (0.0, 0.0, 0usize);
        for c in 0..self.labels.len() {
            let Some(va) = self.a[c].weighted_auroc(&self.labels[c], Some(weights)) else {
                continue;
            };
            let vb = self.b[c]
                .weighted_auroc(&self.labels[c], Some(weights))
                .expect("labels are shared");
            sa += va;
            sb += vb;
            used += 1;
        }
        let skipped = self.labels.len() - used;
        if used == 0 {
            return (None, skipped);
        }
        (Some(sa / used as f64 - sb / used as f64), skipped)
    }
}

/// Multiplicity of each example in resample `index`.
fn resample_weights(seed: u64, index: usize, n: usize, idx: &mut Vec<usize>, w: &mut Vec<u32>) {
    let mut stream = rng::stream(seed, BOOTSTRAP_STREAM + index as u64);
    rng::draw_indices(&mut stream, n, idx);
    w.clear();
    w.resize(n, 0);
    for &i in idx.iter() {
        w[i] += 1;
    }
}

/// Paired bootstrap of the macro-AUROC difference between two models scored
/// on the same examples.
///
/// Resample `r` is drawn from its own stream keyed by `(seed, r)`, and
/// results are gathered in resample order, so the interval is independent of
/// the worker count.
pub fn bootstrap_auroc_diff(
    a: &ScoredPredictions,
    b: &ScoredPredictions,
    opts: BootstrapOptions,
) -> Result<BootstrapCI, StatsError> {
    a.check_paired(b)?;
    if opts.resamples == 0 {
        return Err(StatsError::InvalidInput("resamples must be at least 1".into()));
    }
    let point_estimate = macro_auroc(a)? - macro_auroc(b)?;
    let prepared = Prepared::new(a, b);
    let n = a.len();

    let draws: Vec<(Option<f64>, usize)> = crate::pool::install(opts.workers, || {
        (0..opts.resamples)
            .into_par_iter()
            .map_init(
                || (Vec::with_capacity(n), Vec::with_capacity(n)),
                |(idx, w), r| {
                    resample_weights(opts.seed, r, n, idx, w);
                    prepared.difference(w)
                },
            )
            .collect()
    })
    .map_err(|e| StatsError::Pool(e.to_string()))?;

    let degenerate_class_skips = draws.iter().map(|d| d.1).sum();
    let mut diffs: Vec<f64> = draws.iter().filter_map(|d| d.0).collect();
    let degenerate_resamples = opts.resamples - diffs.len();
    if diffs.is_empty() {
        return Err(StatsError::DegenerateLabels(None));
    }
    diffs.sort_by(f64::total_cmp);
    Ok(BootstrapCI {
        point_estimate,
        lo: percentile(&diffs, 2.5),
        hi: percentile(&diffs, 97.5),
        resamples: opts.resamples,
        seed: opts.seed,
        degenerate_class_skips,
        degenerate_resamples,
    })
}
