use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical pipeline and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("degenerate density: {0}")]
    DegenerateDensity(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("class {class} is empty")]
    EmptyClass { class: usize },

    #[error(
        "class {class} leaks {leak:.3e} of its mass past the grid edge (threshold {threshold:.0e}); enlarge the grid extents"
    )]
    Leak {
        class: usize,
        leak: f64,
        threshold: f64,
    },

    #[error("kernel ({kx}x{ky} cells) is larger than the grid ({nx}x{ny} cells)")]
    KernelTooLarge {
        kx: usize,
        ky: usize,
        nx: usize,
        ny: usize,
    },

    #[error("quadrature did not converge: last estimates {previous:e} and {last:e}")]
    Quadrature { previous: f64, last: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics (leaks, convergence, degenerate mass)
    /// rather than of the inputs' shape or the filesystem.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateDensity(_) | Error::Leak { .. } | Error::Quadrature { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
