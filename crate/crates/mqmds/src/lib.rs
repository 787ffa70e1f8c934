//! File formats, the asset directory, table reproduction and the command
//! line for `mqmds-core`.

pub mod assets;
pub mod cli;
pub mod tables;
pub mod text;

use std::path::PathBuf;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INGREDIENT: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("asset `{name}` is corrupt: {reason}")]
    AssetCorrupt { name: String, reason: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Core(#[from] mqmds_core::Error),
}

impl Error {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        use mqmds_core::Error as C;
        match self {
            Error::Parse { .. } | Error::Io { .. } | Error::Usage(_) => EXIT_USAGE,
            Error::AssetCorrupt { .. } | Error::Verification(_) => EXIT_VERIFICATION,
            Error::Core(C::AssetCorrupt { .. }) => EXIT_VERIFICATION,
            Error::Core(e) if e.is_ingredient() => EXIT_INGREDIENT,
            Error::Core(
                C::VerificationFailed(_) | C::StrengthCheckFailed(_) | C::NotADifferenceScheme(_) | C::Uncertified,
            ) => EXIT_VERIFICATION,
            Error::Core(_) => EXIT_USAGE,
        }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
