use serde::{Deserialize, Serialize};

use super::{DynamicsError, Nonlinearity};
use crate::kernels::KernelMeasure;
use crate::spectral::{self, SobolevOrder, SpectralField};

/// One value of the `H^s` energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReading {
    pub t: f64,
    #[serde(rename = "E_s")]
    pub value: f64,
    pub s: SobolevOrder,
}

/// `sqrt(1/2 \int (B^{1/2} Lambda^s u)^2 + (Lambda^s v)^2 + w (Lambda^s u)^2 dx)`.
///
/// The first two terms are evaluated by Parseval, the weighted one by the
/// trapezoidal rule on the grid.
pub fn energy_functional(
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
    kernel: &KernelMeasure,
    order: SobolevOrder,
) -> Result<f64, DynamicsError> {
    u.check_same_grid(v)?;
    u.check_same_grid(w)?;
    let grid = u.grid();
    let s = order.value();
    let mut c1 = f64::INFINITY;
    let mut quad = 0.0;
    for (j, (cu, cv)) in u.coefficients().iter().zip(v.coefficients()).enumerate() {
        let xi = grid.frequency(j);
        let m = kernel.symbol(xi);
        c1 = c1.min(m);
        let weight = if s == 0.0 { 1.0 } else { (1.0 + xi * xi).powf(s) };
        quad += weight * (m * cu.norm_sqr() + cv.norm_sqr());
    }
    let margin = c1 + w.min();
    if !(margin > 0.0) {
        return Err(DynamicsError::EnergyNotCoercive { margin });
    }
    quad *= grid.dx() / grid.len() as f64;
    let lu = spectral::lambda_s(u, order);
    let weighted: f64 = lu.values().iter().zip(w.values()).map(|(a, b)| b * a * a).sum::<f64>() * grid.dx();
    Ok((0.5 * (quad + weighted)).max(0.0).sqrt())
}

/// `||g(u)||_{H^s} / ||u||_{H^s}`.
pub fn nonlinear_estimate_ratio(
    field: &SpectralField,
    nl: &Nonlinearity,
    order: SobolevOrder,
) -> Result<f64, DynamicsError> {
    let denom = spectral::sobolev_norm(field, order);
    if denom == 0.0 {
        return Err(DynamicsError::ZeroField);
    }
    Ok(spectral::sobolev_norm(&nl.apply(field), order) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;
    use std::f64::consts::PI;

    fn grid() -> PeriodicGrid {
        PeriodicGrid::new(PI, 64).unwrap()
    }

    #[test]
    fn zero_fields_have_zero_energy() {
        let z = SpectralField::zeros(&grid());
        let e = energy_functional(&z, &z, &z, &KernelMeasure::example_measure(), SobolevOrder::new(4.0).unwrap());
        assert_eq!(e.unwrap(), 0.0);
    }

    #[test]
    fn delta_kernel_s0_collapses_to_l2() {
        let g = grid();
        let u = SpectralField::from_fn(&g, |x| x.sin() + 0.3 * (2.0 * x).cos());
        let v = SpectralField::from_fn(&g, |x| 0.5 * (3.0 * x).sin());
        let z = SpectralField::zeros(&g);
        let e = energy_functional(&u, &v, &z, &KernelMeasure::identity(), SobolevOrder::new(0.0).unwrap()).unwrap();
        // direct trapezoid of u^2 + v^2
        let l2: f64 = u.values().iter().chain(v.values()).map(|a| a * a).sum::<f64>() * g.dx();
        assert!((e - (0.5 * l2).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_coercive_weight() {
        let g = grid();
        let u = SpectralField::from_fn(&g, |x| x.sin());
        let w = SpectralField::constant(&g, -1.5);
        let err = energy_functional(&u, &u, &w, &KernelMeasure::identity(), SobolevOrder::new(1.0).unwrap());
        assert!(matches!(err, Err(DynamicsError::EnergyNotCoercive { .. })));
    }

    #[test]
    fn estimate_ratio_scaling() {
        let g = grid();
        let s = SobolevOrder::new(2.0).unwrap();
        let nl = Nonlinearity::quadratic(1.0);
        let u = SpectralField::from_fn(&g, |x| 1e-3 * x.cos().exp());
        let r1 = nonlinear_estimate_ratio(&u, &nl, s).unwrap();
        let r2 = nonlinear_estimate_ratio(&u.scale(2.0), &nl, s).unwrap();
        assert!((r2 / r1 - 2.0).abs() < 1e-12);
        assert!(r1 < 1e-2);
        assert_eq!(nonlinear_estimate_ratio(&u, &Nonlinearity::zero(), s).unwrap(), 0.0);
        assert_eq!(
            nonlinear_estimate_ratio(&SpectralField::zeros(&g), &nl, s),
            Err(DynamicsError::ZeroField)
        );
    }
}
