use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("block {0} is not placed")]
    Unplaced(usize),

    #[error("blocks {0} and {1} are on {2} layers")]
    LayerMismatch(usize, usize, &'static str),

    #[error("no feasible position for block {0}")]
    Infeasible(usize),

    #[error("position ({x}, {y}) is not available for block {block}")]
    InvalidAction { block: usize, x: u32, y: u32 },

    #[error("episode already terminated")]
    EpisodeTerminal,

    #[error("episode is not finished")]
    EpisodeRunning,

    #[error("unknown rule tag `{0}`")]
    UnknownRule(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable class used as the prefix of CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "invalid",
            Error::Parse { .. } => "parse",
            Error::UnknownSymbol(_) => "unknown-symbol",
            Error::Unplaced(_) => "unplaced",
            Error::LayerMismatch(..) => "layer",
            Error::Infeasible(_) => "infeasible",
            Error::InvalidAction { .. } => "invalid-action",
            Error::EpisodeTerminal | Error::EpisodeRunning => "episode",
            Error::UnknownRule(_) => "unknown-rule",
            Error::Empty(_) => "empty",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
