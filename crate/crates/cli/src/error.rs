use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("{stage}: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: halfspace_rtm::Error,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn numerical(stage: impl Into<String>, source: halfspace_rtm::Error) -> Self {
        CliError::Numerical { stage: stage.into(), source }
    }

    /// 0 success, 1 validation failure, 2 config or input error, 3 numerical or io failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Numerical { .. } | CliError::Io(_) => 3,
        }
    }
}
