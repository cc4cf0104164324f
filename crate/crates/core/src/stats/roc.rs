use serde::Serialize;

use super::{ScoredPredictions, StatsError};

/// Threshold sweep of one class, highest cutoff first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub class_name: String,
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    /// Score cutoff producing each point; the first is `+∞`.
    pub thresholds: Vec<f64>,
}

fn check_inputs(scores: &[f64], labels: &[bool]) -> Result<(), StatsError> {
    if scores.len() != labels.len() {
        return Err(StatsError::InvalidInput(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(StatsError::InvalidInput("scores must be finite".into()));
    }
    if !labels.iter().any(|&l| l) || labels.iter().all(|&l| l) {
        return Err(StatsError::DegenerateLabels(None));
    }
    Ok(())
}

/// One point per distinct score: predicting positive for `score ≥ cutoff`.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve, StatsError> {
    check_inputs(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let p = labels.iter().filter(|&&l| l).count() as f64;
    let q = labels.len() as f64 - p;

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let cutoff = scores[order[i]];
        while i < order.len() && scores[order[i]] == cutoff {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / q, tp as f64 / p));
        thresholds.push(cutoff);
    }
    Ok(RocCurve {
        class_name: String::new(),
        points,
        thresholds,
    })
}

/// Trapezoidal area under a curve's points.
pub fn trapezoid_area(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// Score order with equal scores grouped, reused across bootstrap resamples.
#[derive(Debug, Clone)]
pub(crate) struct TieGroups {
    order: Vec<usize>,
    /// Start offsets into `order` of each run of equal scores, plus `len`.
    bounds: Vec<usize>,
}

impl TieGroups {
    pub(crate) fn new(scores: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let mut bounds = vec![0];
        for i in 1..order.len() {
            if scores[order[i]] != scores[order[i - 1]] {
                bounds.push(i);
            }
        }
        bounds.push(order.len());
        TieGroups { order, bounds }
    }

    /// Mann–Whitney AUROC with example `i` counted `weights[i]` times, or
    /// `None` when the weighted sample lacks a positive or a negative.
    ///
    /// Twice the U statistic is accumulated as an integer, so the result is
    /// the correctly rounded value of the exact rational.
    pub(crate) fn weighted_auroc(&self, labels: &[bool], weights: Option<&[u32]>) -> Option<f64> {
        let w = |i: usize| weights.map_or(1u64, |w| w[i] as u64);
        let (mut twice_u, mut neg_below, mut pos_total) = (0u64, 0u64, 0u64);
        for g in self.bounds.windows(2) {
            let (mut wp, mut wn) = (0u64, 0u64);
            for &i in &self.order[g[0]..g[1]] {
                if labels[i] {
                    wp += w(i);
                } else {
                    wn += w(i);
                }
            }
            twice_u += 2 * wp * neg_below + wp * wn;
            neg_below += wn;
            pos_total += wp;
        }
        if pos_total == 0 || neg_below == 0 {
            return None;
        }
        Some(twice_u as f64 / (2 * pos_total * neg_below) as f64)
    }
}

/// Probability that a random positive outscores a random negative, ties
/// counted one half.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64, StatsError> {
    check_inputs(scores, labels)?;
    Ok(TieGroups::new(scores)
        .weighted_auroc(labels, None)
        .expect("labels checked non-degenerate"))
}

/// AUROC of every class, in class order.
pub fn per_class_auroc(preds: &ScoredPredictions) -> Result<Vec<f64>, StatsError> {
    (0..preds.classes().len())
        .map(|k| {
            auroc(&preds.class_scores(k), &preds.class_labels(k)).map_err(|e| match e {
                StatsError::DegenerateLabels(_) => {
                    StatsError::DegenerateLabels(Some(preds.classes()[k].clone()))
                }
                other => other,
            })
        })
        .collect()
}

/// Unweighted mean of the per-class AUROCs.
pub fn macro_auroc(preds: &ScoredPredictions) -> Result<f64, StatsError> {
    let per_class = per_class_auroc(preds)?;
    Ok(per_class.iter().sum::<f64>() / per_class.len() as f64)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn b(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&x| x == 1).collect()
    }

    /// Direct count over all positive/negative pairs.
    fn pair_count_auroc(scores: &[f64], labels: &[bool]) -> f64 {
        let (mut num, mut pairs) = (0.0, 0.0);
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if labels[i] && !labels[j] {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / pairs
    }

    #[test]
    fn perfect_separation_curve() {
        let c = roc_curve(&[0.9, 0.8, 0.3, 0.2], &b(&[1, 1, 0, 0])).unwrap();
        for p in [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            assert!(c.points.contains(&p));
        }
        assert_eq!(auroc(&[0.9, 0.8, 0.3, 0.2], &b(&[1, 1, 0, 0])).unwrap(), 1.0);
    }

    #[test]
    fn interleaved_curve_matches_hand_sweep() {
        let c = roc_curve(&[0.9, 0.8, 0.3, 0.2], &b(&[1, 0, 1, 0])).unwrap();
        assert_eq!(
            c.points,
            [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        assert_eq!(c.thresholds, [f64::INFINITY, 0.9, 0.8, 0.3, 0.2]);
        assert_eq!(auroc(&[0.9, 0.8, 0.3, 0.2], &b(&[1, 0, 1, 0])).unwrap(), 0.75);
        assert_eq!(trapezoid_area(&c), 0.75);
    }

    #[test]
    fn ties_share_one_point() {
        let c = roc_curve(&[0.5, 0.5, 0.5], &b(&[1, 0, 1])).unwrap();
        assert_eq!(c.points, [(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(auroc(&[0.5, 0.5, 0.5], &b(&[1, 0, 1])).unwrap(), 0.5);
    }

    #[test]
    fn degenerate_labels() {
        assert!(matches!(
            roc_curve(&[0.1, 0.2], &[true, true]),
            Err(StatsError::DegenerateLabels(None))
        ));
        assert!(matches!(auroc(&[0.1, 0.2], &[false, false]), Err(StatsError::DegenerateLabels(_))));
    }

    #[test]
    fn macro_average_examples() {
        // Class x perfectly separated, class y all tied.
        let p = ScoredPredictions::new(
            (0..4).map(|i| i.to_string()).collect(),
            vec!["x".into(), "y".into()],
            vec![0.9, 0.3, 0.8, 0.3, 0.1, 0.3, 0.2, 0.3],
            b(&[1, 1, 1, 0, 0, 1, 0, 0]),
        )
        .unwrap();
        assert_eq!(per_class_auroc(&p).unwrap(), [1.0, 0.5]);
        assert_eq!(macro_auroc(&p).unwrap(), 0.75);

        let single = ScoredPredictions::binary("c", vec![0.9, 0.8, 0.3, 0.2], b(&[1, 0, 1, 0])).unwrap();
        assert_eq!(macro_auroc(&single).unwrap(), 0.75);
    }

    #[test]
    fn four_class_macro_is_mean_of_independent_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 40;
        let scores: Vec<f64> = (0..n * 4).map(|_| (rng.random_range(0..20) as f64) / 20.0).collect();
        let labels: Vec<bool> = (0..n * 4).map(|i| (i / 4 + i % 4) % 3 == 0).collect();
        let p = ScoredPredictions::new((0..n).map(|i| i.to_string()).collect(), (0..4).map(|k| format!("c{k}")).collect(), scores, labels).unwrap();
        let oracle: f64 = (0..4)
            .map(|k| pair_count_auroc(&p.class_scores(k), &p.class_labels(k)))
            .sum::<f64>()
            / 4.0;
        assert!((macro_auroc(&p).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn degenerate_class_is_named() {
        let p = ScoredPredictions::new(
            vec!["0".into(), "1".into()],
            vec!["ok".into(), "flat".into()],
            vec![0.9, 0.5, 0.1, 0.5],
            b(&[1, 1, 0, 1]),
        )
        .unwrap();
        assert!(matches!(macro_auroc(&p), Err(StatsError::DegenerateLabels(Some(c))) if c == "flat"));
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..64).prop_flat_map(|n| {
            (
                proptest::collection::vec((0u8..12).prop_map(|v| v as f64 / 4.0), n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
        .prop_filter("needs both labels", |(_, l)| l.iter().any(|&x| x) && !l.iter().all(|&x| x))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn agrees_with_pair_counting((s, l) in instance()) {
            prop_assert!((auroc(&s, &l).unwrap() - pair_count_auroc(&s, &l)).abs() <= 1e-12);
        }

        #[test]
        fn trapezoid_matches_auroc((s, l) in instance()) {
            let c = roc_curve(&s, &l).unwrap();
            prop_assert!((trapezoid_area(&c) - auroc(&s, &l).unwrap()).abs() <= 1e-12);
            prop_assert_eq!(c.points[0], (0.0, 0.0));
            prop_assert_eq!(*c.points.last().unwrap(), (1.0, 1.0));
            for w in c.points.windows(2) {
                prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
            }
        }

        #[test]
        fn invariant_under_increasing_maps((s, l) in instance()) {
            let moved: Vec<f64> = s.iter().map(|v| (3.0 * v).exp() - 7.0).collect();
            prop_assert_eq!(auroc(&s, &l).unwrap(), auroc(&moved, &l).unwrap());
        }

        #[test]
        fn complement_sums_to_one((s, l) in instance()) {
            let flipped: Vec<bool> = l.iter().map(|x| !x).collect();
            prop_assert_eq!(auroc(&s, &l).unwrap() + auroc(&s, &flipped).unwrap(), 1.0);
        }

        #[test]
        fn weights_match_materialized_resample((s, l) in instance(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = s.len();
            let mut w = vec![0u32; n];
            let (mut rs, mut rl) = (Vec::new(), Vec::new());
            for _ in 0..n {
                let i = rng.random_range(0..n);
                w[i] += 1;
                rs.push(s[i]);
                rl.push(l[i]);
            }
            let weighted = TieGroups::new(&s).weighted_auroc(&l, Some(&w));
            match auroc(&rs, &rl) {
                Ok(v) => prop_assert_eq!(weighted, Some(v)),
                Err(_) => prop_assert_eq!(weighted, None),
            }
        }
    }
}
