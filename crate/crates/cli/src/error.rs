use std::path::PathBuf;

use thiserror::Error;

/// Exit codes, stable for scripting.
pub mod exit {
    pub const OK: i32 = 0;
    /// Corrupt stego data or failure writing outputs.
    pub const FAILURE: i32 = 1;
    /// Bad arguments or unreadable / unsupported input images.
    pub const INPUT: i32 = 2;
    pub const CAPACITY: i32 = 3;
    pub const INCOMPLETE: i32 = 4;
    pub const NOT_STEGO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] stegograph::Error),
}

impl CliError {
    pub fn input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Self::Input {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        use stegograph::Error as E;
        match self {
            Self::Input { .. } | Self::Usage(_) => exit::INPUT,
            Self::Io { .. } => exit::FAILURE,
            Self::Core(e) => match e {
                E::InsufficientCapacity { .. } | E::PayloadTooLarge { .. } => exit::CAPACITY,
                E::IncompleteSet { .. } | E::IncompletePayload { .. } => exit::INCOMPLETE,
                E::NoStegoFound(_) => exit::NOT_STEGO,
                E::InvalidBitsPerSlot(_)
                | E::InvalidChunkSize
                | E::EmptyKey
                | E::NoCovers
                | E::NoPayloads
                | E::DimensionMismatch { .. } => exit::INPUT,
                _ => exit::FAILURE,
            },
        }
    }
}
