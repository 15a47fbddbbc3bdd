use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    #[error("gram matrix could not be factorized (last jitter tried: {jitter:e})")]
    SingularGram { jitter: f64 },

    #[error("point {index} duplicates an existing sample")]
    DuplicatePoint { index: usize },

    #[error("lattice depth {requested} exceeds the maximum depth {max}")]
    ResolutionExhausted { requested: u32, max: u32 },

    #[error("point {0:?} is not on the objective's support lattice")]
    OffSupport(Vec<f64>),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("invalid config:{}", list_issues(.0))]
    ConfigIssues(Vec<ConfigIssue>),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// One problem found while validating a config, located by field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "`{}`: {}", self.path, self.message)
    }
}

fn list_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

impl Error {
    /// True for errors caused by a bad config rather than a failed run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::ConfigIssues(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
