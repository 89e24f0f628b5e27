use std::path::PathBuf;

use greenfabric_core::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{format} parse error at {}: {message}", location(*.line, *.column))]
    Parse {
        format: &'static str,
        line: u64,
        column: Option<u64>,
        message: String,
    },
    #[error("empty input: no records found")]
    EmptyInput,
    #[error("invalid {what}: {}", .violations.join("; "))]
    Invalid {
        what: &'static str,
        violations: Vec<String>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

fn location(line: u64, column: Option<u64>) -> String {
    match column {
        Some(c) => format!("line {line}, column {c}"),
        None => format!("line {line}"),
    }
}

impl Error {
    /// Process exit code: 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn invalid(what: &'static str, violation: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            violations: vec![violation.into()],
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
