use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("schema violation at row {row}: {msg}")]
    SchemaViolation { row: usize, msg: String },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("window [{start}, {end}) is not aligned to whole hours")]
    Unaligned { start: i64, end: i64 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("search space of {size} itemsets exceeds the brute-force guard of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },

    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("invalid marginal: {0}")]
    InvalidMarginal(String),

    #[error("MAPE undefined: every actual value is zero")]
    UndefinedMape,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("store format error at line {line}: {msg}")]
    StoreFormat { line: usize, msg: String },

    #[error("benchmark error: {0}")]
    Benchmark(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
