use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("validation failed: {0}")]
    Failed(String),
}

impl CliError {
    /// 1 for a failed check, 2 for anything that stopped the run.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Failed(_) => 1,
            Self::Config(_) | Self::Io { .. } => 2,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.as_ref().display().to_string();
        move |source| Self::Io { path, source }
    }
}

impl From<sdou_core::Error> for CliError {
    fn from(e: sdou_core::Error) -> Self {
        Self::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
