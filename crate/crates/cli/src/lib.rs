//! Command-line front end: argument handling, file formats of the pipeline
//! stages and report assembly.

mod args;
mod commands;
mod config;
pub mod report;
pub mod tables;

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;
use thiserror::Error;

pub use args::{Cli, Command, DEFAULT_SEED};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, missing inputs or out-of-range parameters.
    #[error("{0}")]
    Usage(String),
    /// An input file's contents do not match the expected layout.
    #[error("schema error in {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Core(#[from] synthaudit::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn schema(path: &Path, message: impl Into<String>) -> Self {
        CliError::Schema {
            path: path.display().to_string(),
            message: message.into(),
        }
    }
}

macro_rules! core_from {
    ($($t:ty),+) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        })+
    };
}

core_from!(
    synthaudit::dataio::DataError,
    synthaudit::preprocess::PreprocessError,
    synthaudit::nnsearch::SearchError,
    synthaudit::memaudit::AuditError,
    synthaudit::stats::StatsError,
    synthaudit::fid::FidError
);

pub type CliResult<T = ()> = Result<T, CliError>;

/// One JSON object per line on standard error.
pub(crate) fn progress(event: &str, fields: serde_json::Value) {
    let mut obj = serde_json::Map::new();
    obj.insert("event".into(), event.into());
    if let serde_json::Value::Object(m) = fields {
        obj.extend(m);
    }
    eprintln!("{}", serde_json::Value::Object(obj));
}

pub(crate) fn require_input(path: &Path) -> CliResult {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("input not found: {}", path.display())))
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code: 0 success, 1 usage or validation error, 2 data error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
