use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::{DataError, Manifest, Split};
use crate::rng;

/// Train/val/test proportions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, DataError> {
        let r = SplitRatios { train, val, test };
        let parts = r.as_array();
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(DataError::InvalidRatios(format!(
                "ratios must be non-negative, got {parts:?}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DataError::InvalidRatios(format!("ratios sum to {sum}, not 1")));
        }
        Ok(r)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.val, self.test]
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

/// Largest-remainder apportionment of `units` over `ratios`. Remainder ties
/// go to the earlier partition.
pub fn apportion(units: usize, ratios: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = ratios.iter().map(|r| r * units as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(units.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum GroupKey {
    Patient(String),
    Record(String),
}

/// Assigns every record to train/val/test at the grouping-unit level.
///
/// Records sharing a `patient_id` form one unit; records without one are their
/// own unit. Units are sorted, permuted by a seed-keyed shuffle and cut into
/// contiguous runs sized by [`apportion`]. The result depends only on the set
/// of units and the seed, never on record order.
pub fn split_dataset(
    manifest: &Manifest,
    ratios: SplitRatios,
    seed: u64,
) -> Result<Manifest, DataError> {
    if manifest.is_empty() {
        return Err(DataError::EmptyManifest);
    }
    let key_of = |r: &super::ImageRecord| match &r.patient_id {
        Some(p) => GroupKey::Patient(p.clone()),
        None => GroupKey::Record(r.id.clone()),
    };

    let mut groups: Vec<GroupKey> = manifest.records.iter().map(key_of).collect();
    groups.sort();
    groups.dedup();
    groups.shuffle(&mut rng::stream(seed, rng::SPLIT_STREAM));

    let counts = apportion(groups.len(), &ratios.as_array());
    let splits = [Split::Train, Split::Val, Split::Test];
    let mut assignment = BTreeMap::new();
    let mut cursor = groups.into_iter();
    for (split, count) in splits.iter().zip(counts) {
        for key in cursor.by_ref().take(count) {
            assignment.insert(key, *split);
        }
    }

    let mut out = manifest.clone();
    for r in &mut out.records {
        r.split = Some(assignment[&key_of(r)]);
    }
    Ok(out)
}
