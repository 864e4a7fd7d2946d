use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::SpectralError;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform grid on `[-L, L)` with `N` points.
///
/// FFT plans are built once per grid and shared between clones.
#[derive(Clone)]
pub struct PeriodicGrid {
    half_length: f64,
    n: usize,
    plans: Arc<Plans>,
}

impl PeriodicGrid {
    pub fn new(half_length: f64, n: usize) -> Result<Self, SpectralError> {
        if n < 8 || n % 2 != 0 {
            return Err(SpectralError::InvalidPointCount(n));
        }
        if !half_length.is_finite() || half_length <= 0.0 {
            return Err(SpectralError::InvalidHalfLength(half_length));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) };
        Ok(Self { half_length, n, plans: Arc::new(plans) })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed wavenumber of FFT slot `j`, in `-N/2 ..= N/2 - 1`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular frequency `xi_k = k pi / L` of FFT slot `j`.
    pub fn frequency(&self, j: usize) -> f64 {
        self.wavenumber(j) as f64 * std::f64::consts::PI / self.half_length
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.frequency(j)).collect()
    }

    /// Largest resolved frequency `pi / dx`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.plans.forward.process(buf);
    }

    /// Inverse transform including the `1/N` normalization.
    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.plans.inverse.process(buf);
        let scale = 1.0 / self.n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }

    pub fn refined(&self) -> Self {
        Self::new(self.half_length, 2 * self.n).expect("doubling a valid grid")
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid").field("L", &self.half_length).field("N", &self.n).finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    #[serde(rename = "L")]
    half_length: f64,
    #[serde(rename = "N")]
    n: usize,
}

impl Serialize for PeriodicGrid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GridSpec { half_length: self.half_length, n: self.n }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PeriodicGrid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let spec = GridSpec::deserialize(deserializer)?;
        PeriodicGrid::new(spec.half_length, spec.n).map_err(serde::de::Error::custom)
    }
}
