//! Memorization auditing toolkit for synthetic medical image datasets.
//!
//! The crate is organized by pipeline stage:
//!
//! * [`dataio`] reads manifests, assigns patient-level splits, renders prompts
//!   and moves embeddings and raw intensity arrays through their binary formats.
//! * [`preprocess`] turns raw scans and 8-bit images into uniform square rasters
//!   and tiles whole-slide images into patches.
//! * [`nnsearch`] runs exact cosine nearest-neighbor search over embeddings.
//! * [`memaudit`] scores synthetic/real pairs with the max-over-patches
//!   normalized Euclidean distance and flags likely copies.
//! * [`stats`] holds ROC/AUROC, the paired bootstrap, the one-sided Wilcoxon
//!   signed-rank test and reader-study scoring.
//! * [`fid`] computes the Fréchet distance between feature populations.

pub mod dataio;
pub mod fid;
pub mod memaudit;
pub mod nnsearch;
pub mod preprocess;
pub mod rng;
pub mod stats;

mod error;
pub mod plot;
pub mod pool;

pub use dataio::{
    EmbeddingMatrix, ImageRecord, ImageType, Manifest, RawIntensityArray, Specialty, Split,
};
pub use error::{Error, Result};
pub use memaudit::{AuditConfig, AuditSummary, AuditedPair};
pub use nnsearch::NeighborPair;
pub use preprocess::RasterImage;
pub use stats::{BootstrapCI, ScoredPredictions};

/// Toolkit version echoed into generated reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
