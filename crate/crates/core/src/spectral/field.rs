use std::fmt::Write as _;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PeriodicGrid, SpectralError};

/// Real field on a periodic grid.
///
/// Physical values are always present; the spectral coefficients are
/// computed on first use and cached.
#[derive(Clone)]
pub struct SpectralField {
    grid: PeriodicGrid,
    values: Vec<f64>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl SpectralField {
    pub fn from_values(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid: grid.clone(), values, coeffs: OnceLock::new() })
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self { grid: grid.clone(), values, coeffs: OnceLock::new() }
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.len()], coeffs: OnceLock::new() }
    }

    pub fn constant(grid: &PeriodicGrid, c: f64) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()], coeffs: OnceLock::new() }
    }

    /// Builds a field from spectral coefficients; the imaginary part of the
    /// inverse transform is discarded.
    pub fn from_coefficients(grid: &PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: coeffs.len() });
        }
        let mut buf = coeffs.clone();
        grid.inverse(&mut buf);
        let values = buf.iter().map(|c| c.re).collect();
        let cell = OnceLock::new();
        let _ = cell.set(coeffs);
        Ok(Self { grid: grid.clone(), values, coeffs: cell })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn coefficients(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            self.grid.forward(&mut buf);
            buf
        })
    }

    /// Makes the spectral representation available.
    pub fn to_spectral(self) -> Self {
        self.coefficients();
        self
    }

    /// Physical values are always valid; kept for symmetry with [`Self::to_spectral`].
    pub fn to_physical(self) -> Self {
        self
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<(), SpectralError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values(&self.grid, self.values.iter().map(|&v| f(v)).collect()).unwrap()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, SpectralError> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values, coeffs: OnceLock::new() })
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product without dealiasing.
    pub fn mul(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |x, y| x + a * y)
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Discrete `L^2` inner product `dx sum_j f_j g_j`.
    pub fn inner(&self, other: &Self) -> Result<f64, SpectralError> {
        self.check_same_grid(other)?;
        Ok(self.grid.dx() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// CSV with header `x,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (j, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.grid.x(j), v);
        }
        out
    }

    pub fn snapshot(&self) -> FieldSnapshot {
        FieldSnapshot { grid: self.grid.clone(), values: self.values.clone() }
    }
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField").field("grid", &self.grid).field("values", &self.values).finish()
    }
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

/// JSON form of a field: `{"grid":{"L":..,"N":..},"values":[..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSnapshot {
    pub grid: PeriodicGrid,
    pub values: Vec<f64>,
}

impl TryFrom<FieldSnapshot> for SpectralField {
    type Error = SpectralError;
    fn try_from(s: FieldSnapshot) -> Result<Self, Self::Error> {
        SpectralField::from_values(&s.grid, s.values)
    }
}
