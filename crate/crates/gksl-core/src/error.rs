// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error types shared by all modules.

use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e}, tolerance {tol:.3e})")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("map is not completely positive (Choi eigenvalue {eigenvalue:.3e}, tolerance {tol:.3e})")]
    NotCp { eigenvalue: f64, tol: f64 },

    #[error("Kraus set is not unital (residual {residual:.3e}, tolerance {tol:.3e})")]
    NotUnital { residual: f64, tol: f64 },

    #[error("mixing matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("generator is not canonical (trace residual {residual:.3e})")]
    NotCanonical { residual: f64 },

    #[error("step {t} exceeds the admissible maximum {t_max}")]
    StepTooLarge { t: f64, t_max: f64 },

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("grid is insufficient: {0}")]
    InsufficientGrid(String),

    #[error("cannot pad to length {requested}: set already has {current} operators")]
    PadTooSmall { requested: usize, current: usize },

    #[error("dimension {dim} is outside the supported range {min}..={max}")]
    UnsupportedDim { dim: usize, min: usize, max: usize },

    #[error("eigenvalue iteration failed to converge")]
    EigFailed,
}

pub type Result<T> = std::result::Result<T, CoreError>;
