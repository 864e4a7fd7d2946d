use num_complex::Complex64;

use super::{MollifierSpec, SobolevOrder, SpectralError, SpectralField};
use crate::kernels::KernelMeasure;

fn with_symbol(field: &SpectralField, m: impl Fn(usize, f64) -> Complex64) -> SpectralField {
    let grid = field.grid();
    let coeffs = field
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, &c)| c * m(j, grid.frequency(j)))
        .collect();
    SpectralField::from_coefficients(grid, coeffs).expect("same length")
}

/// Multiplies the coefficients by a real even symbol `m(xi_k)`.
pub fn apply_multiplier(field: &SpectralField, m: impl Fn(f64) -> f64) -> SpectralField {
    with_symbol(field, |_, xi| Complex64::new(m(xi), 0.0))
}

/// `B u = mu * u`.
pub fn apply_kernel(kernel: &KernelMeasure, field: &SpectralField) -> SpectralField {
    apply_multiplier(field, |xi| kernel.symbol(xi))
}

/// `D_x`, with the unpaired Nyquist mode set to zero.
pub fn derivative(field: &SpectralField) -> SpectralField {
    let n = field.grid().len();
    with_symbol(field, |j, xi| if j == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, xi) })
}

pub fn second_derivative(field: &SpectralField) -> SpectralField {
    apply_multiplier(field, |xi| -xi * xi)
}

/// `Lambda^s = (1 - D_x^2)^{s/2}` for any real exponent.
pub fn lambda_pow(field: &SpectralField, s: f64) -> SpectralField {
    apply_multiplier(field, |xi| (1.0 + xi * xi).powf(0.5 * s))
}

pub fn lambda_s(field: &SpectralField, order: SobolevOrder) -> SpectralField {
    lambda_pow(field, order.value())
}

/// Discrete `H^s` norm, `((dx/N) sum_k (1 + xi_k^2)^s |c_k|^2)^{1/2}`.
pub fn sobolev_norm(field: &SpectralField, order: SobolevOrder) -> f64 {
    let grid = field.grid();
    let s = order.value();
    let sum: f64 = field
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let xi = grid.frequency(j);
            let w = if s == 0.0 { 1.0 } else { (1.0 + xi * xi).powf(s) };
            w * c.norm_sqr()
        })
        .sum();
    (grid.dx() / grid.len() as f64 * sum).sqrt()
}

/// `J^h`, convolution with the rescaled bump.
pub fn mollify(field: &SpectralField, spec: MollifierSpec) -> Result<SpectralField, SpectralError> {
    let min = 2.0 * field.grid().dx();
    if !(spec.width >= min) {
        return Err(SpectralError::WidthUnresolvable { width: spec.width, min });
    }
    Ok(apply_multiplier(field, |xi| spec.symbol(xi)))
}

/// Two-thirds rule: zero every mode with `|k| > N/3`.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let grid = field.grid();
    let cutoff = grid.len() as i64 / 3;
    with_symbol(field, |j, _| {
        if grid.wavenumber(j).abs() > cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Pointwise product in physical space followed by [`dealias`].
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField, SpectralError> {
    Ok(dealias(&f.mul(g)?))
}

/// `[Lambda^s, f] g = Lambda^s (f g) - f Lambda^s g`.
pub fn commutator_lambda(
    order: SobolevOrder,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    let s = order.value();
    commutator_general(|xi| (1.0 + xi * xi).powf(0.5 * s), f, g)
}

/// `[m(D), f] g = m(D)(f g) - f m(D) g` for a real even symbol `m`.
pub fn commutator_general(
    m: impl Fn(f64) -> f64,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    f.check_same_grid(g)?;
    let fg = dealiased_product(f, g)?;
    let left = apply_multiplier(&fg, &m);
    let mg = apply_multiplier(g, &m);
    let right = dealiased_product(f, &mg)?;
    left.sub(&right)
}

/// Fraction of spectral energy held by modes above the two-thirds cutoff.
pub fn spectral_tail_fraction(field: &SpectralField) -> f64 {
    let grid = field.grid();
    let cutoff = grid.len() as i64 / 3;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (j, c) in field.coefficients().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if grid.wavenumber(j).abs() > cutoff {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}
