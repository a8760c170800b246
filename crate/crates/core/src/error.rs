use thiserror::Error;

/// Errors produced by the array model, the verifiers and the builders.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("column {column} out of range for an array with {k} columns")]
    ColumnOutOfRange { column: usize, k: usize },

    #[error("level {level} out of range for column {column} (alphabet size {size})")]
    LevelOutOfRange {
        column: usize,
        level: u32,
        size: u32,
    },

    #[error("interaction pins column {column} more than once")]
    DuplicateColumn { column: usize },

    #[error("invalid strength {t}: must satisfy {constraint}")]
    InvalidStrength { t: usize, constraint: String },

    #[error("invalid type vector: {0}")]
    InvalidTypes(String),

    #[error("invalid array shape: {0}")]
    InvalidShape(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error(
        "enumeration of {count} cases exceeds the cap of {cap} (raise DTA_MAX_ENUM to allow it)"
    )]
    EnumerationCap { count: u128, cap: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("missing level names: {0}")]
    MissingNames(String),

    #[error("catalog entry `{id}` failed verification: {reason}")]
    CatalogVerification { id: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
