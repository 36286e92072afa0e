use std::path::PathBuf;

use thiserror::Error;

use crate::pipeline::Stage;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("model: {0}")]
    Model(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("malformed artifact {}: {msg}", .path.display())]
    Corrupt { path: PathBuf, msg: String },
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("[{stage}] {source}")]
    Stage { stage: Stage, source: Box<PipelineError> },
}

impl PipelineError {
    /// Process exit status: 2 configuration, 3 model, 4 solver, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            PipelineError::Config(_) | PipelineError::MissingArtifact(_) => 2,
            PipelineError::Model(_) => 3,
            PipelineError::Solver(_) => 4,
            PipelineError::Corrupt { .. } | PipelineError::Io { .. } => 1,
            PipelineError::Stage { source, .. } => source.exit_code(),
        }
    }

    /// The innermost error, without stage tags.
    pub fn root(&self) -> &PipelineError {
        match self {
            PipelineError::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn corrupt(path: impl Into<PathBuf>, msg: impl ToString) -> Self {
        PipelineError::Corrupt { path: path.into(), msg: msg.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Attaches the file path to I/O failures.
pub(crate) trait IoContext<T> {
    fn at(self, path: &std::path::Path) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                PipelineError::MissingArtifact(path.to_path_buf())
            } else {
                PipelineError::Io { path: path.to_path_buf(), source }
            }
        })
    }
}
