//! Pixel-space memorization audit.
//!
//! Each synthetic image is compared with its retrieved training neighbor by
//! tiling both into a grid of non-overlapping patches, taking the normalized
//! Euclidean distance `‖p₁ − p₂‖₂ / √(255² · N)` of every corresponding patch
//! pair and keeping the maximum. Pairs at or below the threshold are flagged
//! as potential copies.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nnsearch::NeighborPair;
use crate::preprocess::{resize_center_crop, RasterImage};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("expected a {expected}×{expected} image, got {width}×{height}")]
    WrongSize { expected: u32, width: u32, height: u32 },
    #[error("cannot summarize an empty group")]
    EmptyGroup,
    #[error("invalid audit config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub patch: u32,
    pub grid: u32,
    pub threshold: f64,
    pub image_side: u32,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            patch: 128,
            grid: 4,
            threshold: 0.15,
            image_side: 512,
        }
    }
}

impl AuditConfig {
    pub fn new(patch: u32, grid: u32, threshold: f64, image_side: u32) -> Result<Self, AuditError> {
        let cfg = AuditConfig {
            patch,
            grid,
            threshold,
            image_side,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_threshold(threshold: f64) -> Result<Self, AuditError> {
        let cfg = AuditConfig {
            threshold,
            ..AuditConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AuditError> {
        if self.patch == 0 || self.grid == 0 || self.grid * self.patch != self.image_side {
            return Err(AuditError::InvalidConfig(format!(
                "grid {} × patch {} must equal image side {}",
                self.grid, self.patch, self.image_side
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(AuditError::InvalidConfig(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// One synthetic/real pair after scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditedPair {
    pub synthetic_id: String,
    pub real_id: String,
    pub cosine: f64,
    pub distance: f64,
    pub flagged: bool,
}

/// Distance statistics for one group of audited pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub group: String,
    pub mean: f64,
    /// Sample standard deviation; zero for a single pair.
    pub std: f64,
    pub n_pairs: usize,
    pub n_flagged: usize,
}

impl AuditSummary {
    pub fn flagged_fraction(&self) -> f64 {
        self.n_flagged as f64 / self.n_pairs as f64
    }
}

/// Flag rule: the threshold itself counts as a copy.
#[inline]
pub fn is_flagged(distance: f64, threshold: f64) -> bool {
    distance <= threshold
}

/// Σ(aᵢ − bᵢ)² in exact integer arithmetic.
#[inline]
fn sq_diff_sum(a: &[u8], b: &[u8]) -> u64 {
    // 32768 · 255² < u32::MAX, so each chunk sums without overflow.
    a.chunks(32768)
        .zip(b.chunks(32768))
        .map(|(ca, cb)| {
            ca.iter()
                .zip(cb)
                .map(|(&x, &y)| {
                    let d = x as i32 - y as i32;
                    (d * d) as u32
                })
                .sum::<u32>() as u64
        })
        .sum()
}

/// Maps an exact sum of squared differences over `n` samples to `[0, 1]`.
///
/// Written as `√(S/N)/255`, which equals `√S/√(255²N)` and returns exactly
/// `k/255` when every sample differs by `k`.
#[inline]
pub fn normalized_distance(sum_sq: u64, n: u64) -> f64 {
    (sum_sq as f64 / n as f64).sqrt() / 255.0
}

fn check_same_shape(a: &RasterImage, b: &RasterImage) -> Result<(), AuditError> {
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(AuditError::ShapeMismatch(format!(
            "{}×{}×{} vs {}×{}×{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    Ok(())
}

/// Normalized Euclidean distance between two equally shaped patches. `N`
/// counts every scalar sample, channels included.
pub fn patch_l2_distance(p1: &RasterImage, p2: &RasterImage) -> Result<f64, AuditError> {
    check_same_shape(p1, p2)?;
    if p1.pixels().is_empty() {
        return Err(AuditError::ShapeMismatch("empty patch".into()));
    }
    Ok(normalized_distance(
        sq_diff_sum(p1.pixels(), p2.pixels()),
        p1.pixels().len() as u64,
    ))
}

/// Distance of every grid cell, row-major.
pub fn patch_distances(
    img1: &RasterImage,
    img2: &RasterImage,
    cfg: &AuditConfig,
) -> Result<Vec<f64>, AuditError> {
    cfg.validate()?;
    for img in [img1, img2] {
        if img.width() != cfg.image_side || img.height() != cfg.image_side {
            return Err(AuditError::WrongSize {
                expected: cfg.image_side,
                width: img.width(),
                height: img.height(),
            });
        }
    }
    check_same_shape(img1, img2)?;

    let grid = cfg.grid as usize;
    let c = img1.channels() as usize;
    let span = cfg.patch as usize * c;
    let mut sums = vec![0u64; grid * grid];
    for y in 0..cfg.image_side {
        let (r1, r2) = (img1.row(y), img2.row(y));
        let gy = y as usize / cfg.patch as usize;
        for gx in 0..grid {
            let s = gx * span;
            sums[gy * grid + gx] += sq_diff_sum(&r1[s..s + span], &r2[s..s + span]);
        }
    }
    let n = cfg.patch as u64 * cfg.patch as u64 * c as u64;
    Ok(sums.into_iter().map(|s| normalized_distance(s, n)).collect())
}

/// Maximum patch distance over the grid.
pub fn pair_distance(
    img1: &RasterImage,
    img2: &RasterImage,
    cfg: &AuditConfig,
) -> Result<f64, AuditError> {
    Ok(patch_distances(img1, img2, cfg)?
        .into_iter()
        .fold(0.0, f64::max))
}

fn audited(pair: &NeighborPair, distance: f64, cfg: &AuditConfig) -> AuditedPair {
    AuditedPair {
        synthetic_id: pair.query_id.clone(),
        real_id: pair.neighbor_id.clone(),
        cosine: pair.cosine,
        distance,
        flagged: is_flagged(distance, cfg.threshold),
    }
}

/// Scores in-memory `(synthetic, real, match)` triples, preserving order.
pub fn audit(
    pairs: &[(RasterImage, RasterImage, NeighborPair)],
    cfg: &AuditConfig,
) -> Result<Vec<AuditedPair>, AuditError> {
    pairs
        .par_iter()
        .map(|(s, r, p)| Ok(audited(p, pair_distance(s, r, cfg)?, cfg)))
        .collect()
}

/// Like [`audit`] but loads each image pair on demand, so only a worker's
/// current pair is resident.
pub fn audit_with<F>(
    pairs: &[NeighborPair],
    cfg: &AuditConfig,
    load: F,
) -> crate::Result<Vec<AuditedPair>>
where
    F: Fn(&NeighborPair) -> crate::Result<(RasterImage, RasterImage)> + Sync,
{
    pairs
        .par_iter()
        .map(|p| {
            let (s, r) = load(p)?;
            Ok(audited(p, pair_distance(&s, &r, cfg)?, cfg))
        })
        .collect()
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Per-group summaries, sorted by group key.
pub fn summarize<F>(audited: &[AuditedPair], group_of: F) -> Result<Vec<AuditSummary>, AuditError>
where
    F: Fn(&AuditedPair) -> String,
{
    if audited.is_empty() {
        return Err(AuditError::EmptyGroup);
    }
    let mut groups: BTreeMap<String, Vec<&AuditedPair>> = BTreeMap::new();
    for a in audited {
        groups.entry(group_of(a)).or_default().push(a);
    }
    Ok(groups
        .into_iter()
        .map(|(group, members)| {
            let d: Vec<f64> = members.iter().map(|a| a.distance).collect();
            let (mean, std) = mean_std(&d);
            AuditSummary {
                group,
                mean,
                std,
                n_pairs: members.len(),
                n_flagged: members.iter().filter(|a| a.flagged).count(),
            }
        })
        .collect())
}

/// Side-by-side thumbnails (synthetic left, real right), one pair per row,
/// for eyeballing flagged matches. Grayscale inputs are expanded to RGB.
pub fn contact_sheet(pairs: &[(RasterImage, RasterImage)], thumb: u32) -> RasterImage {
    let gap = 4u32;
    let width = 2 * thumb + 3 * gap;
    let height = (pairs.len() as u32).max(1) * (thumb + gap) + gap;
    let mut sheet = RasterImage::filled(width, height, 3, 255);
    let stride = sheet.stride();
    for (i, (a, b)) in pairs.iter().enumerate() {
        for (col, img) in [a, b].into_iter().enumerate() {
            let t = resize_center_crop(img, thumb);
            let (x0, y0) = (gap + col as u32 * (thumb + gap), gap + i as u32 * (thumb + gap));
            for y in 0..thumb {
                for x in 0..thumb {
                    let src = (y * thumb + x) as usize * t.channels() as usize;
                    let dst = (y0 + y) as usize * stride + (x0 + x) as usize * 3;
                    for ch in 0..3 {
                        let s = if t.channels() == 1 { src } else { src + ch };
                        sheet.pixels_mut()[dst + ch] = t.pixels()[s];
                    }
                }
            }
        }
    }
    sheet
}
