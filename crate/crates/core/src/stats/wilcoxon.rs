use serde::Serialize;
use statrs::function::erf::erfc;

use super::StatsError;

/// Largest tie-free sample size evaluated by exact enumeration.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
}

/// One-sided signed-rank test of `median > mu0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// Nonzero differences entering the ranking.
    pub n: usize,
    pub n_zeros: usize,
    pub w_plus: f64,
    /// `P(W ≥ w_plus)` under the null. The normal tail can underflow to 0
    /// for very large, uniformly positive samples.
    pub p_value: f64,
    pub method: WilcoxonMethod,
    /// Continuity-corrected statistic of the normal path.
    pub z: Option<f64>,
    pub mu0: f64,
}

/// Midranks of `values` (1-based) and the sizes of tied runs longer than one.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &o in &order[i..j] {
            ranks[o] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Null upper tail `P(W ≥ w)` for ranks `1..=n`, from the subset-sum counts.
fn exact_upper_tail(n: usize, w: u64) -> f64 {
    let max = n * (n + 1) / 2;
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for r in 1..=n {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let tail: u64 = counts[(w as usize).min(max + 1)..].iter().sum();
    tail as f64 / (1u64 << n) as f64
}

pub fn wilcoxon_one_sided(samples: &[f64], mu0: f64) -> Result<WilcoxonResult, StatsError> {
    if samples.iter().any(|s| !s.is_finite()) || !mu0.is_finite() {
        return Err(StatsError::InvalidInput("samples must be finite".into()));
    }
    let diffs: Vec<f64> = samples.iter().map(|s| s - mu0).filter(|&d| d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(StatsError::AllZeroDifferences);
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = midranks(&magnitudes);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    let base = WilcoxonResult {
        n,
        n_zeros: samples.len() - n,
        w_plus,
        p_value: 0.0,
        method: WilcoxonMethod::Exact,
        z: None,
        mu0,
    };
    if n <= EXACT_MAX_N && ties.is_empty() {
        return Ok(WilcoxonResult {
            p_value: exact_upper_tail(n, w_plus as u64),
            ..base
        });
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    let z = (w_plus - mean - 0.5) / var.sqrt();
    Ok(WilcoxonResult {
        p_value: (0.5 * erfc(z / std::f64::consts::SQRT_2)).min(1.0),
        method: WilcoxonMethod::Normal,
        z: Some(z),
        ..base
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Upper tail from all `2^n` sign assignments of the observed ranks.
    fn enumerate_tail(ranks: &[f64], w: f64) -> f64 {
        let n = ranks.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s >= w {
                hits += 1;
            }
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn five_positive_samples() {
        let r = wilcoxon_one_sided(&[0.2, 0.3, 0.25, 0.4, 0.35], 0.15).unwrap();
        assert_eq!(r.w_plus, 15.0);
        assert_eq!(r.p_value, 0.03125);
        assert_eq!(r.method, WilcoxonMethod::Exact);
    }

    #[test]
    fn three_sample_hand_example() {
        let r = wilcoxon_one_sided(&[0.16, 0.12, 0.20], 0.15).unwrap();
        assert_eq!(r.w_plus, 4.0);
        assert_eq!(r.p_value, 0.375);
    }

    #[test]
    fn zeros_are_dropped() {
        let r = wilcoxon_one_sided(&[0.15, 0.2, 0.15, 0.3], 0.15).unwrap();
        assert_eq!((r.n, r.n_zeros), (2, 2));
        assert_eq!(r.p_value, 0.25);
        assert!(matches!(wilcoxon_one_sided(&[0.15, 0.15], 0.15), Err(StatsError::AllZeroDifferences)));
    }

    #[test]
    fn large_positive_sample_is_significant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..2000).map(|_| 0.15 + rng.random_range(1e-4..0.5)).collect();
        let r = wilcoxon_one_sided(&xs, 0.15).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Normal);
        assert!(r.p_value < 0.001);
    }

    #[test]
    fn ties_use_corrected_normal() {
        // |d| = 0.5, 0.5, 1 → midranks 1.5, 1.5, 3; one pair tied.
        let r = wilcoxon_one_sided(&[0.5, -0.5, 1.0], 0.0).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Normal);
        assert_eq!(r.w_plus, 4.5);
        let var: f64 = 3.0 * 4.0 * 7.0 / 24.0 - 6.0 / 48.0;
        let z = (4.5 - 3.0 - 0.5) / var.sqrt();
        assert!((r.z.unwrap() - z).abs() < 1e-15);
        assert!((r.p_value - 0.5 * erfc(z / std::f64::consts::SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn normal_path_tracks_exact_near_cutover() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..25).map(|_| rng.random_range(-0.5..1.0)).collect();
        let exact = wilcoxon_one_sided(&xs, 0.15).unwrap();
        let mut more = xs.clone();
        more.push(0.15 + 1e-9);
        let approx = wilcoxon_one_sided(&more, 0.15).unwrap();
        assert_eq!(approx.method, WilcoxonMethod::Normal);
        assert!((exact.p_value - approx.p_value).abs() < 0.03);
    }

    proptest! {
        #[test]
        fn exact_matches_sign_enumeration(raw in proptest::collection::hash_set(-1000i32..1000, 1..=12)) {
            let xs: Vec<f64> = raw.iter().filter(|&&v| v != 0).map(|&v| 0.15 + v as f64 / 997.0).collect();
            prop_assume!(!xs.is_empty());
            let mags: Vec<f64> = xs.iter().map(|x| (x - 0.15).abs()).collect();
            let (ranks, ties) = midranks(&mags);
            prop_assume!(ties.is_empty());
            let r = wilcoxon_one_sided(&xs, 0.15).unwrap();
            prop_assert_eq!(r.method, WilcoxonMethod::Exact);
            prop_assert!((r.p_value - enumerate_tail(&ranks, r.w_plus)).abs() <= 1e-12);
            prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
        }
    }
}
