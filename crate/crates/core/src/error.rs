use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// The launch swing needed to close the channel exceeds the supply.
    #[error(
        "link infeasible at {length_mm} mm: launch swing {required_swing_v:.4} V exceeds VDD {vdd_v} V"
    )]
    LinkInfeasible {
        length_mm: f64,
        required_swing_v: f64,
        vdd_v: f64,
    },

    #[error("infinite average power: extinction ratio must be > 0 dB")]
    InfiniteAveragePower,

    #[error("bump pitch {0} um is outside the pitch profile table")]
    UnsupportedPitch(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (last step {last_step_db:.3e} dB, oma {last_oma_dbm:.3} dBm)")]
    NonConvergence {
        iterations: usize,
        last_step_db: f64,
        last_oma_dbm: f64,
    },

    #[error("{0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("plot: {0}")]
    Plot(String),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for input/config problems, false for failures inside a model
    /// evaluated on valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGeometry(_)
                | Error::InvalidParameter { .. }
                | Error::Validation(_)
                | Error::Io { .. }
        )
    }
}
