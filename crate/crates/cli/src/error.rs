use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("missing {file} in {dir}: run `kicktop {producer}` first")]
    MissingArtifact {
        file: String,
        dir: PathBuf,
        producer: &'static str,
    },
    #[error("stale artifact {file}: {reason}; rerun `kicktop {producer}`")]
    StaleArtifact {
        file: String,
        reason: String,
        producer: &'static str,
    },
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CliError>,
    },
    #[error(transparent)]
    Core(#[from] kicked_top::Error),
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
    #[error("{path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
}

impl CliError {
    /// 1 for usage errors, 2 for everything that happens once a stage runs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
