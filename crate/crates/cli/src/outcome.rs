use std::fs;
use std::path::Path;

use dqmat::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    /// Unsolvable equation, failed check, or wrong key.
    Mismatch = 1,
    /// Bad arguments or unreadable input.
    Usage = 2,
    Numerical = 3,
}

impl Outcome {
    pub fn from_error(e: &Error) -> Outcome {
        match e {
            Error::Unsolvable(_) | Error::KeyMismatch(_) => Outcome::Mismatch,
            Error::Numerical(_) | Error::Degenerate(_) | Error::NotAdjointImage { .. } => Outcome::Numerical,
            Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::Parse { .. }
            | Error::Image(_)
            | Error::Io(_) => Outcome::Usage,
        }
    }

    pub fn verdict(ok: bool) -> Outcome {
        if ok {
            Outcome::Ok
        } else {
            Outcome::Mismatch
        }
    }
}

pub fn write_report(path: Option<&Path>, value: &serde_json::Value) -> dqmat::Result<()> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        fs::write(p, text + "\n")?;
    }
    Ok(())
}
