//! Friedrichs mollifier with the bump `eta(x) = Z exp(-1 / (1 - x^2))` on `(-1, 1)`.
//!
//! `eta_hat` has no closed form. It is tabulated once, together with its
//! derivative, on a uniform frequency grid and evaluated by cubic Hermite
//! interpolation. Past the end of the table it is integrated directly.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::quadrature::CompositeRule;

const TABLE_STEP: f64 = 0.05;
const TABLE_MAX: f64 = 256.0;
const PANELS: usize = 128;
const ORDER: usize = 16;

/// Mollifier of width `h`: convolution with `eta(x / h) / h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub width: f64,
}

impl MollifierSpec {
    pub fn new(width: f64) -> Self {
        Self { width }
    }

    pub fn symbol(&self, xi: f64) -> f64 {
        mollifier_symbol(self.width * xi)
    }
}

fn raw_bump(x: f64) -> f64 {
    let t = 1.0 - x * x;
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

struct BumpTable {
    norm: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    rule: CompositeRule,
}

impl BumpTable {
    fn build() -> Self {
        let rule = CompositeRule::new(0.0, 1.0, PANELS, ORDER);
        let weighted: Vec<f64> = rule.points().iter().map(|&x| raw_bump(x)).collect();
        let half_mass: f64 = weighted.iter().zip(rule.weights()).map(|(f, w)| f * w).sum();
        let norm = 1.0 / (2.0 * half_mass);
        let n = (TABLE_MAX / TABLE_STEP).round() as usize + 1;
        let mut values = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for i in 0..n {
            let omega = i as f64 * TABLE_STEP;
            let (v, d) = transform(&rule, &weighted, norm, omega);
            values.push(v);
            slopes.push(d);
        }
        values[0] = 1.0;
        Self { norm, values, slopes, rule }
    }
}

fn transform(rule: &CompositeRule, bump: &[f64], norm: f64, omega: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for ((&x, &w), &b) in rule.points().iter().zip(rule.weights()).zip(bump) {
        let (s, c) = (omega * x).sin_cos();
        v += w * b * c;
        d -= w * b * x * s;
    }
    (2.0 * norm * v, 2.0 * norm * d)
}

fn table() -> &'static BumpTable {
    static TABLE: OnceLock<BumpTable> = OnceLock::new();
    TABLE.get_or_init(BumpTable::build)
}

/// Normalized bump profile `eta(x)`, unit mass, supported on `[-1, 1]`.
pub fn bump_profile(x: f64) -> f64 {
    table().norm * raw_bump(x)
}

/// `eta_hat(omega) = \int eta(x) e^{-i omega x} dx`; real, even, `eta_hat(0) = 1`.
pub fn mollifier_symbol(omega: f64) -> f64 {
    let t = table();
    let w = omega.abs();
    let pos = w / TABLE_STEP;
    let i = pos.floor() as usize;
    if i + 1 >= t.values.len() {
        let bump: Vec<f64> = t.rule.points().iter().map(|&x| raw_bump(x)).collect();
        return transform(&t.rule, &bump, t.norm, w).0;
    }
    let s = pos - i as f64;
    let (y0, y1) = (t.values[i], t.values[i + 1]);
    let (m0, m1) = (t.slopes[i] * TABLE_STEP, t.slopes[i + 1] * TABLE_STEP);
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass_and_nonnegative() {
        // independent check by a fine midpoint rule
        let n = 200_000;
        let h = 2.0 / n as f64;
        let mass: f64 = (0..n).map(|i| bump_profile(-1.0 + (i as f64 + 0.5) * h) * h).sum();
        assert!((mass - 1.0).abs() < 1e-10, "{mass}");
        assert!((0..100).all(|i| bump_profile(-1.2 + 0.024 * i as f64) >= 0.0));
        assert_eq!(bump_profile(1.0), 0.0);
    }

    #[test]
    fn symbol_properties() {
        assert_eq!(mollifier_symbol(0.0), 1.0);
        for &w in &[0.013, 0.7, 3.3, 17.9, 101.01, 255.99, 300.0] {
            let v = mollifier_symbol(w);
            assert_eq!(v, mollifier_symbol(-w));
            assert!(v.abs() <= 1.0);
        }
    }

    #[test]
    fn interpolation_matches_direct_quadrature() {
        let t = table();
        let bump: Vec<f64> = t.rule.points().iter().map(|&x| raw_bump(x)).collect();
        for &w in &[0.0123, 1.234, 9.87, 42.42, 123.456, 250.01] {
            let direct = transform(&t.rule, &bump, t.norm, w).0;
            assert!((mollifier_symbol(w) - direct).abs() < 1e-9, "omega = {w}");
        }
    }
}
