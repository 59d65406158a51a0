use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or experiment config.
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] midsift::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2: arguments/config, 3: input format or I/O, 4: numeric failure.
    pub fn exit_code(&self) -> u8 {
        use midsift::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::InvalidArgument(_) => 2,
                E::Format { .. } | E::Io { .. } => 3,
                E::ResidualSignal { .. } | E::DegenerateFit(_) | E::Numeric(_) => 4,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
