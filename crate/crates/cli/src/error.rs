use std::path::{Path, PathBuf};

use corefud_core::formats::FormatError;
use corefud_core::matching::TokenMismatch;
use corefud_core::model::ParseError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Mismatch { path: PathBuf, source: TokenMismatch },
    #[error("{}: {source}", path.display())]
    Refused { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Input { .. } => EXIT_PARSE,
            CliError::Mismatch { .. } | CliError::Refused { .. } => EXIT_MISMATCH,
            CliError::Io { .. } | CliError::Config(_) => EXIT_CONFIG,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn mismatch(path: &Path, source: TokenMismatch) -> Self {
        CliError::Mismatch { path: path.to_path_buf(), source }
    }

    /// Maps a format error onto the exit-code classes.
    pub fn format(path: &Path, e: FormatError) -> Self {
        match e {
            FormatError::Mismatch(source) => CliError::Mismatch { path: path.to_path_buf(), source },
            FormatError::Refused { .. } => CliError::Refused { path: path.to_path_buf(), source: e },
            other => CliError::Input { path: path.to_path_buf(), message: other.to_string() },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
