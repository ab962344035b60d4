use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("missing {artifact} at {path} (run `{produced_by}` first)")]
    MissingArtifact {
        artifact: &'static str,
        path: PathBuf,
        produced_by: &'static str,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] taxnews_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::MissingArtifact { .. } => "missing_artifact",
            CliError::Io { .. } => "io",
            CliError::Core(_) => "estimation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::MissingArtifact { .. } => 3,
            _ => 1,
        }
    }

    /// Machine-readable form printed on stderr.
    pub fn to_json(&self, command: &str) -> serde_json::Value {
        let mut detail = json!({ "command": command, "kind": self.kind(), "message": self.to_string() });
        match self {
            CliError::Config { key, .. } => detail["key"] = json!(key),
            CliError::MissingArtifact { artifact, path, .. } => {
                detail["artifact"] = json!(artifact);
                detail["path"] = json!(path.display().to_string());
            }
            _ => {}
        }
        json!({ "error": detail })
    }
}
