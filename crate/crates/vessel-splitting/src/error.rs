//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the vessel model, the attitude algebra and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Pitch too close to ±π/2; the Euler-angle kinematic matrix is singular.
    #[error("gimbal lock: pitch {pitch} is within {eps} rad of ±π/2")]
    GimbalLock { pitch: f64, eps: f64 },

    /// Quaternion norm too far from one to be silently renormalized.
    #[error("quaternion norm {norm} deviates from 1 beyond tolerance {tol}")]
    NonUnitQuaternion { norm: f64, tol: f64 },

    /// Matrix handed to `vee` is not skew-symmetric.
    #[error("matrix is not skew-symmetric (‖M + Mᵀ‖ = {deviation})")]
    NotSkewSymmetric { deviation: f64 },

    /// Argument outside the domain of a special function.
    #[error("domain error in {function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },

    /// Configuration file could not be parsed.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
