use std::path::PathBuf;

/// Crate-wide error type.
///
/// Variants are grouped by how the CLI maps them to exit codes: shape
/// problems are distinguishable from plain input problems so batch scripts
/// can tell "bad file" from "mismatched pair".
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Undecodable or unsupported image file.
    #[error("image error on {path}: {message}")]
    Image { path: PathBuf, message: String },

    /// Malformed text input (manifest, landmark file, embedding, report...).
    #[error("parse error: {0}")]
    Parse(String),

    /// Dimension mismatch or geometrically impossible request.
    #[error("shape error: {0}")]
    Shape(String),

    /// Input is structurally fine but degenerate for the requested math
    /// (empty mask, zero-norm embedding, coincident eye centroids...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A batch evaluation where not a single pair could be scored.
    #[error("no evaluable pairs: {0}")]
    NothingEvaluable(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn image(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Image {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
