use thiserror::Error;

use crate::dataio::DataError;
use crate::fid::FidError;
use crate::memaudit::AuditError;
use crate::nnsearch::SearchError;
use crate::preprocess::PreprocessError;
use crate::stats::StatsError;

/// Crate-wide error, one variant per pipeline stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Fid(#[from] FidError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
