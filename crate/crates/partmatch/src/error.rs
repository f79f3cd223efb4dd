use std::path::PathBuf;

use partmatch_core::Error as CoreError;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const INSUFFICIENT_MATCHED: u8 = 4;
    pub const DEGENERATE: u8 = 5;
    pub const UNEQUAL_ARMS: u8 = 6;
    pub const MISSING_GRID_ENTRY: u8 = 7;
    pub const IO: u8 = 8;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: line {line}: {msg}")]
    Parse { path: String, line: u64, msg: String },

    #[error("{path}: {msg}")]
    Format { path: String, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                CoreError::InsufficientMatched { .. } => exit::INSUFFICIENT_MATCHED,
                CoreError::DegenerateData(_)
                | CoreError::DegenerateCorrelation
                | CoreError::InsufficientData { .. } => exit::DEGENERATE,
                CoreError::UnequalArms { .. } => exit::UNEQUAL_ARMS,
                CoreError::MissingGridEntry { .. } | CoreError::NotCalculable { .. } => exit::MISSING_GRID_ENTRY,
                CoreError::Config(_) => exit::USAGE,
                _ => exit::OTHER,
            },
            CliError::Parse { .. } | CliError::Format { .. } => exit::PARSE,
            CliError::Io { .. } => exit::IO,
            CliError::Usage(_) => exit::USAGE,
            CliError::Other(_) => exit::OTHER,
        }
    }
}
