use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid code parameters or a bit vector of the wrong length.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Malformed record or file structure.
    #[error("format error: {0}")]
    Format(String),

    #[error("not an MDF4 file: {0}")]
    NotMdf4(String),

    /// Valid MDF4, but a layout this reader does not handle.
    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),

    /// Data decoded but failed an integrity check (nonzero padding, bad trailer, ...).
    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error("truncated input: {0}")]
    Truncated(String),

    #[error("unknown token 0x{0:02x} at offset {1}")]
    UnknownToken(u8, usize),

    #[error("id {id} out of range (limit {limit})")]
    OutOfRange { id: u64, limit: u64 },

    #[error("id {0} exceeds the id space")]
    SpaceExhausted(u64),

    #[error("dictionary mismatch: {0}")]
    DictMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short machine-parsable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Format(_) => "format",
            Error::NotMdf4(_) => "not-mdf4",
            Error::UnsupportedLayout(_) => "unsupported-layout",
            Error::Corrupt(_) => "corrupt",
            Error::Truncated(_) => "truncated",
            Error::UnknownToken(..) => "unknown-token",
            Error::OutOfRange { .. } => "out-of-range",
            Error::SpaceExhausted(_) => "space-exhausted",
            Error::DictMismatch(_) => "dict-mismatch",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
