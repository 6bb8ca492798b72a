use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the toolkit.
///
/// Variants are grouped by [`ErrorKind`], which the command-line runner maps
/// onto process exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("label error: {0}")]
    Label(String),

    #[error("parse error at row {row}, column {column:?}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("size error: {0}")]
    Size(String),

    #[error("stratification error: {0}")]
    Stratification(String),

    #[error("invalid parameter {param:?}: {message}")]
    Validation { param: String, message: String },

    #[error("space file line {line}: {message}")]
    SpaceSyntax { line: usize, message: String },

    #[error("mutation impossible: {0}")]
    MutationImpossible(String),

    #[error("invalid parameter combination: {0}")]
    InvalidCombination(String),

    #[error("shape error: expected {expected} columns, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("state error: {0}")]
    State(String),

    #[error("setup error: {0}")]
    Setup(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("degenerate labels: {0}")]
    Degenerate(String),

    #[error("format error in {context}: {message}")]
    Format { context: String, message: String },

    #[error("run {run}: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Configuration,
    DegenerateData,
    Runtime,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Configuration => 2,
            ErrorKind::DegenerateData => 3,
            ErrorKind::Runtime => 4,
        }
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Format {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub fn validation(param: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            param: param.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Schema(_)
            | Error::Label(_)
            | Error::Parse { .. }
            | Error::Validation { .. }
            | Error::SpaceSyntax { .. }
            | Error::Format { .. }
            | Error::Io { .. } => ErrorKind::Configuration,
            Error::Size(_)
            | Error::Stratification(_)
            | Error::DegenerateGeometry(_)
            | Error::Degenerate(_)
            | Error::UndefinedMetric(_) => ErrorKind::DegenerateData,
            Error::Run { source, .. } => source.kind(),
            _ => ErrorKind::Runtime,
        }
    }
}
