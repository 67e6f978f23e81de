use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}: line {line}: {message}")]
    Malformed {
        file: String,
        line: u64,
        message: String,
    },

    #[error("{file}: missing column `{column}`")]
    MissingColumn { file: String, column: String },

    #[error("{file}: line {line}: unknown {kind} \"{id}\"")]
    UnknownKey {
        file: String,
        line: u64,
        kind: &'static str,
        id: String,
    },

    #[error("duplicate {kind} \"{id}\"")]
    DuplicateKey { kind: &'static str, id: String },

    #[error("no {0} records")]
    MissingPeriod(&'static str),

    #[error("config: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("design matrix is rank deficient (column {column})")]
    RankDeficient { column: usize },

    #[error("matrix has no positive off-diagonal weight")]
    ZeroMatrix,

    #[error("power iteration did not converge within {max_iter} iterations (last step {last_step:e})")]
    NonConvergence { max_iter: usize, last_step: f64 },

    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the input files or configuration rather
    /// than by the computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Malformed { .. }
                | Error::MissingColumn { .. }
                | Error::UnknownKey { .. }
                | Error::DuplicateKey { .. }
                | Error::MissingPeriod(_)
                | Error::Config(_)
                | Error::InvalidInput(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
