use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}: container already exists")]
    AlreadyExists(PathBuf),

    #[error("{0}: refusing to overwrite non-container data")]
    ForeignFile(PathBuf),

    #[error("{0}: not a knowledge container")]
    NotAContainer(PathBuf),

    #[error("{path}: unsupported version {found} (supported up to {supported})")]
    UnsupportedVersion {
        path: PathBuf,
        found: u32,
        supported: u32,
    },

    #[error("read-only handle")]
    ReadOnly,

    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("index inconsistency: {0}")]
    IndexInconsistency(String),

    #[error("injected fault after {0} region writes")]
    InjectedFault(usize),

    #[error("empty query")]
    EmptyQuery,

    #[error("degenerate weights: alpha={alpha}, beta={beta}")]
    DegenerateWeights { alpha: f64, beta: f64 },

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("no extractor registered for {0}")]
    NoExtractor(&'static str),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid glob: {0}")]
    Glob(#[from] globset::Error),

    #[error("benchmark invalid: {0}")]
    BenchInvalid(String),

    #[error("nothing to measure: {0}")]
    NothingToMeasure(&'static str),

    #[error("storage: {0}")]
    Storage(#[from] rusqlite::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the caller (bad arguments, contract misuse)
    /// rather than the environment.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::AlreadyExists(_)
                | Error::ForeignFile(_)
                | Error::NotAContainer(_)
                | Error::UnsupportedVersion { .. }
                | Error::ReadOnly
                | Error::EmptyQuery
                | Error::DegenerateWeights { .. }
                | Error::InvalidOption(_)
                | Error::Glob(_)
                | Error::NothingToMeasure(_)
        )
    }
}
