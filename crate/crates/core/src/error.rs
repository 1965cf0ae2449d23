// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e}, allowed {allowed:e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("undefined mixing angle: both the effective bias and the tunnelling amplitude vanish")]
    UndefinedMixingAngle,

    #[error("degenerate frame: conditional oscillation frequency is zero")]
    DegenerateFrame,

    #[error("qubit B splitting is zero (eps_b = delta_b = 0)")]
    ZeroSplitting,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("conditional table undefined: delta_a = {0} (must be exactly zero)")]
    ConditionalTableUndefined(f64),

    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    RootNotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("step size collapsed to {step:e} at t = {time} (error norm {error_norm:e})")]
    StepSizeCollapse { time: f64, step: f64, error_norm: f64 },

    #[error("norm drift {drift:e} exceeds bound {bound:e} at t = {time}")]
    NormDrift { time: f64, drift: f64, bound: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
