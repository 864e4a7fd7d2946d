//! Periodic grids, spectral fields and Fourier multipliers.
//!
//! The domain `[-L, L)` is sampled at `N` equispaced points. Transforms are
//! unnormalized in the forward direction (`c_k = sum_j u_j e^{-i xi_k x_j}` up to
//! the phase of the left endpoint), so a constant field 1 has `c_0 = N`.
//! Norms are scaled to match the continuum `L^2(-L, L)` norm on band-limited
//! fields: `||u||^2 = (dx / N) sum_k |c_k|^2`.

mod field;
mod grid;
mod mollifier;
mod ops;

pub use field::{FieldSnapshot, SpectralField};
pub use grid::PeriodicGrid;
pub use mollifier::{bump_profile, mollifier_symbol, MollifierSpec};
pub use ops::{
    apply_kernel, apply_multiplier, commutator_general, commutator_lambda, dealias,
    dealiased_product, derivative, lambda_pow, lambda_s, mollify, second_derivative,
    sobolev_norm, spectral_tail_fraction,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid needs an even number of points >= 8, got {0}")]
    InvalidPointCount(usize),
    #[error("grid half-length must be finite and > 0, got {0}")]
    InvalidHalfLength(f64),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("Sobolev order must be finite and >= 0, got {0}")]
    InvalidOrder(f64),
    #[error("mollifier width {width} is below two grid spacings ({min})")]
    WidthUnresolvable { width: f64, min: f64 },
}

/// Sobolev index `s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SobolevOrder(f64);

impl SobolevOrder {
    pub fn new(s: f64) -> Result<Self, SpectralError> {
        if !s.is_finite() || s < 0.0 {
            return Err(SpectralError::InvalidOrder(s));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `s - k`, failing when the result would be negative.
    pub fn lowered(self, k: f64) -> Result<Self, SpectralError> {
        Self::new(self.0 - k)
    }
}

impl TryFrom<f64> for SobolevOrder {
    type Error = SpectralError;
    fn try_from(s: f64) -> Result<Self, Self::Error> {
        Self::new(s)
    }
}

impl From<SobolevOrder> for f64 {
    fn from(s: SobolevOrder) -> f64 {
        s.0
    }
}
