use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least {needed} points for the fit, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("normal equations are singular (too few distinct x values)")]
    SingularSystem,

    #[error("input sequence is empty")]
    EmptyInput,

    #[error("frame {frame} is outside the transform sequence of length {len}")]
    FrameOutOfRange { frame: usize, len: usize },

    #[error("reference dimensions must be positive, got {w}x{h}")]
    NonPositiveReference { w: f64, h: f64 },

    #[error("no ripple boxes available at frame {frame}")]
    MissingRipple { frame: usize },

    #[error("extrapolation needs at least 3 points and a fitted curve, trajectory has {got}")]
    TooFewPoints { got: usize },

    #[error("frame {frame} arrived after frame {last}")]
    OutOfOrderFrame { frame: usize, last: usize },

    #[error("prediction and ground truth share no frames")]
    NoOverlap,

    #[error("need at least 2 samples, got {got}")]
    TooFewSamples { got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}
