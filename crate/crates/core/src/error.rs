use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: no parseable tweet records", path.display())]
    EmptyCorpus { path: PathBuf },

    #[error("corpus is empty")]
    NoTweets,

    #[error("duplicate tweet id {id:?} (lines {first_line} and {second_line})")]
    DuplicateId {
        id: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("vocabulary is empty after pruning (min_df={min_df}, max_df_ratio={max_df_ratio})")]
    EmptyVocabulary { min_df: usize, max_df_ratio: f64 },

    #[error("every document is empty; nothing to sample")]
    DegenerateCorpus,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("{}:{line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}:{line}: unknown affect category {name:?}", path.display())]
    UnknownCategory {
        path: PathBuf,
        line: usize,
        name: String,
    },

    #[error("partition sizes differ: {left} vs {right} documents")]
    LengthMismatch { left: usize, right: usize },

    #[error("NMI undefined: both partitions have zero entropy")]
    UndefinedNmi,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the environment (missing or unreadable
    /// files) rather than by the content of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
