use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty vocabulary: no term reaches the document-frequency threshold")]
    EmptyVocabulary,

    #[error("rank deficient design: columns [{}] are linearly dependent on earlier columns", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("insufficient observations: {rows} rows for {regressors} regressors ({context})")]
    InsufficientObservations {
        rows: usize,
        regressors: usize,
        context: String,
    },

    #[error("unknown {kind} `{name}` (available: {})", .available.join(", "))]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: Vec<String>,
    },

    #[error("bootstrap failed: {failed} of {total} replicates could not be estimated")]
    BootstrapFailures { failed: usize, total: usize },

    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }
}
