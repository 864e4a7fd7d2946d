//! Seeded random test fields.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::spectral::{PeriodicGrid, SpectralField};

pub use rand::SeedableRng;

pub type FieldRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FieldRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random trigonometric polynomial with modes `|k| <= max_mode` (in units of
/// `pi / L`) and coefficients uniform in `[-1, 1]` damped by `1 / (1 + k^2)^{decay/2}`.
///
/// The field is defined by its continuum formula, so the same draw on a finer
/// grid samples the same function.
pub fn band_limited(grid: &PeriodicGrid, max_mode: usize, decay: f64, rng: &mut FieldRng) -> SpectralField {
    let base = std::f64::consts::PI / grid.half_length();
    let modes: Vec<(f64, f64, f64)> = (0..=max_mode)
        .map(|k| {
            let damp = (1.0 + (k * k) as f64).powf(-0.5 * decay);
            let a = rng.gen_range(-1.0..1.0) * damp;
            let b = if k == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) * damp };
            (k as f64 * base, a, b)
        })
        .collect();
    SpectralField::from_fn(grid, |x| modes.iter().map(|&(xi, a, b)| a * (xi * x).cos() + b * (xi * x).sin()).sum())
}
