//! Fréchet distance between Gaussian fits of two feature populations.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::dataio::EmbeddingMatrix;

/// Negative results down to this magnitude are rounding noise.
pub const NEGATIVE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum FidError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("feature dimensions differ: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Mean and unbiased covariance of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMoments {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub n: usize,
}

impl GaussianMoments {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

pub fn gaussian_moments(features: &EmbeddingMatrix) -> Result<GaussianMoments, FidError> {
    let (n, d) = (features.len(), features.dim());
    if n < 2 {
        return Err(FidError::TooFewSamples(n));
    }
    let x = DMatrix::from_row_iterator(n, d, features.data().iter().map(|&v| v as f64));
    let mean = x.row_sum().transpose() / n as f64;
    let mut centered = x;
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centered.tr_mul(&centered) / (n - 1) as f64;
    Ok(GaussianMoments {
        mean,
        cov: symmetrize(cov),
        n,
    })
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn eigenvalues_and_vectors(m: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>), FidError> {
    let eig = m
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(FidError::EigenFailure)?;
    Ok((eig.eigenvalues, eig.eigenvectors))
}

/// Principal square root of a symmetric positive semi-definite matrix, with
/// negative eigenvalues clamped to zero.
fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>, FidError> {
    let (vals, vecs) = eigenvalues_and_vectors(m.clone())?;
    let roots = vals.map(|v| v.max(0.0).sqrt());
    Ok(&vecs * DMatrix::from_diagonal(&roots) * vecs.transpose())
}

/// `‖μa−μb‖² + Tr Σa + Tr Σb − 2 Tr (√Σa Σb √Σa)^{1/2}`, clamped at zero.
pub fn frechet_distance(a: &GaussianMoments, b: &GaussianMoments) -> Result<f64, FidError> {
    if a.dim() != b.dim() {
        return Err(FidError::DimMismatch {
            a: a.dim(),
            b: b.dim(),
        });
    }
    let root_a = psd_sqrt(&a.cov)?;
    let inner = symmetrize(&root_a * &b.cov * &root_a);
    let (vals, _) = eigenvalues_and_vectors(inner)?;
    let trace_sqrt: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    let mean_term = (&a.mean - &b.mean).norm_squared();
    let fid = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * trace_sqrt;
    Ok(fid.max(0.0))
}

/// Checkpoints ordered by FID against `reference`, lowest first, ties by
/// name. Candidates are scored on `workers` threads (0 = global pool).
pub fn rank_checkpoints(
    candidates: &[(String, EmbeddingMatrix)],
    reference: &EmbeddingMatrix,
    workers: usize,
) -> Result<Vec<(String, f64)>, FidError> {
    let reference = gaussian_moments(reference)?;
    let scored: Result<Vec<(String, f64)>, FidError> = crate::pool::install(workers, || {
        candidates
            .par_iter()
            .map(|(name, feats)| {
                if feats.dim() != reference.dim() {
                    return Err(FidError::DimMismatch {
                        a: feats.dim(),
                        b: reference.dim(),
                    });
                }
                Ok((name.clone(), frechet_distance(&gaussian_moments(feats)?, &reference)?))
            })
            .collect()
    })
    .map_err(|e| FidError::Pool(e.to_string()))?;
    let mut scored = scored?;
    scored.sort_by(|x, y| x.1.total_cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
    Ok(scored)
}
