use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::spectral::SpectralField;

/// Polynomial `g(u) = sum_{k >= 2} a_k u^k`, so `g(0) = g'(0) = 0`.
///
/// `coefficients[0]` is `a_2`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nonlinearity {
    coefficients: Vec<f64>,
}

impl Nonlinearity {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, DynamicsError> {
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!("nonlinearity coefficient {c} is not finite")));
        }
        Ok(Self { coefficients })
    }

    pub fn zero() -> Self {
        Self { coefficients: Vec::new() }
    }

    /// `g(u) = a u^2`.
    pub fn quadratic(a: f64) -> Self {
        Self { coefficients: vec![a] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    pub fn g(&self, u: f64) -> f64 {
        // Horner on u^2 (a_2 + a_3 u + ...)
        let inner = self.coefficients.iter().rev().fold(0.0, |acc, &a| acc * u + a);
        inner * u * u
    }

    pub fn g_prime(&self, u: f64) -> f64 {
        let inner = self
            .coefficients
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, &a)| acc * u + (i + 2) as f64 * a);
        inner * u
    }

    pub fn g_second(&self, u: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, &a)| acc * u + ((i + 2) * (i + 1)) as f64 * a)
    }

    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        u.map(|x| self.g(x))
    }

    pub fn apply_prime(&self, u: &SpectralField) -> SpectralField {
        u.map(|x| self.g_prime(x))
    }
}
