// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::bumpmap::BumpId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument or configuration value violates a documented invariant.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("coloring failed: bump {bump} needs a fifth color")]
    ColoringFailed { bump: BumpId },

    #[error("curve fit failed: {0}")]
    Fit(String),

    #[error("curve inversion failed: {0}")]
    Inversion(String),

    /// The fault list cannot be simulated (e.g. a bridge component mixes wired-AND and wired-OR).
    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Simulation(_) => 2,
            _ => 1,
        }
    }
}
