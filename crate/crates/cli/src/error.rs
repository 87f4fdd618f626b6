use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] emerge_core::Error),

    #[error("check failed: {0}")]
    Check(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 config, 3 numerical contract, 4 resource cap, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        use emerge_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Parameter { .. } | E::Dimension(_) | E::BasisMismatch(_) | E::Degenerate(_)) => 2,
            CliError::Core(E::Contract { .. }) | CliError::Check(_) => 3,
            CliError::Core(E::SizeLimit { .. }) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
