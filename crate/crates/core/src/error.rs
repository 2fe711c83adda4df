// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("t = {t} µs lies outside the schedule domain [{start}, {end}] µs")]
    Domain { t: f64, start: f64, end: f64 },

    #[error("mixing angle is undefined when both pump and Stokes amplitudes vanish")]
    UndefinedAngle,

    #[error("singular STAP schedule at t = {t} µs: {reason}")]
    SingularSchedule { t: f64, reason: String },

    #[error("generator is not Hermitian at t = {t} µs (max |H - H^dagger| = {defect:e})")]
    NonHermitian { t: f64, defect: f64 },

    #[error("eigenframe tracking lost at t = {t} µs (best overlap {overlap:.3})")]
    FrameTracking { t: f64, overlap: f64 },

    #[error("RK4 norm drift {drift:e} exceeds 1e-4 at t = {t} µs; use a finer grid")]
    StepSize { t: f64, drift: f64 },

    #[error("invalid configuration `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("invalid counts file: {0}")]
    Counts(String),

    #[error("time grids of the two traces do not match")]
    GridMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Counts(_) | Error::Domain { .. } => 2,
            Error::SingularSchedule { .. }
            | Error::UndefinedAngle
            | Error::NonHermitian { .. }
            | Error::FrameTracking { .. }
            | Error::StepSize { .. }
            | Error::GridMismatch => 3,
            Error::Io(_) => 4,
        }
    }
}
