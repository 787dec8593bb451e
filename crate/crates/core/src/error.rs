use std::path::PathBuf;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("did not converge: {0}")]
    Convergence(String),
    #[error("training diverged: {0}")]
    Divergence(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("missing upstream artifact: {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Broad failure class, used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Convergence,
    Other,
}

impl Error {
    pub fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => ErrorClass::Config,
            Error::EmptyCorpus(_)
            | Error::Parse { .. }
            | Error::MissingArtifact(_)
            | Error::Io(_)
            | Error::DimensionMismatch(_)
            | Error::Degenerate(_) => ErrorClass::Data,
            Error::Calibration(_) | Error::Convergence(_) | Error::Divergence(_) => {
                ErrorClass::Convergence
            }
            Error::Domain(_) => ErrorClass::Other,
        }
    }

    /// Process exit code: 2 config, 3 data, 4 convergence, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Data => 3,
            ErrorClass::Convergence => 4,
            ErrorClass::Other => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
