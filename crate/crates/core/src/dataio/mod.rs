//! Manifests, dataset splits, prompt templating and the binary interchange
//! formats for embeddings (`EMB1`) and raw intensity arrays (`RAW1`).

mod embeddings;
mod manifest;
mod prompt;
mod raw;
mod split;

use std::path::PathBuf;

use thiserror::Error;

pub use embeddings::{read_embeddings, write_embeddings, EmbeddingMatrix, EMB_MAGIC};
pub use manifest::{
    load_manifest, parse_manifest, write_manifest, ImageRecord, ImageType, Manifest, Specialty,
    Split,
};
pub use prompt::{build_prompt, join_labels};
pub use raw::{read_raw, write_raw, RawDtype, RawIntensityArray, RawValues, RAW_MAGIC};
pub use split::{apportion, split_dataset, SplitRatios};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("unknown value {value:?} for field {field}")]
    UnknownEnumValue { field: &'static str, value: String },
    #[error("manifest has no records")]
    EmptyManifest,
    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),
    #[error("template has {slots} slot(s) but {labels} label(s) were supplied")]
    SlotMismatch { slots: usize, labels: usize },
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("file is truncated")]
    TruncatedFile,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("invalid id: {0}")]
    InvalidId(String),
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}
