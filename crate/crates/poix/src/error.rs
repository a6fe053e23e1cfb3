use std::path::PathBuf;

/// Errors surfaced by parsing, modelling and pipeline stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("{path}:{line}: coordinate out of range: lat={lat}, lon={lon}")]
    CoordinateRange {
        path: PathBuf,
        line: u64,
        lat: f64,
        lon: f64,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("subsample {0} is degenerate and has no usable data")]
    Degenerate(String),

    #[error("design matrix is rank deficient; offending columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),

    #[error("{0}")]
    Insufficient(String),

    #[error("missing pipeline artifact {path}; run the `{stage}` stage first")]
    MissingArtifact { path: PathBuf, stage: &'static str },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
