//! Seeded property suites with pass/fail verdicts.
//!
//! Every suite draws its random fields from one seed, so a run is reproducible
//! and reseeding only changes the sample, not the verdict.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{DynamicsError, Nonlinearity, SimConfig, Simulation, WaveState};
use crate::kernels::{ContinuousDensity, KernelMeasure};
use crate::random::{band_limited, rng};
use crate::spectral::{self, MollifierSpec, PeriodicGrid, SobolevOrder, SpectralError, SpectralField};

pub const SUITES: [&str; 5] = ["commutator", "mollifier", "energy", "dispersion", "delta_h"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("unknown suite {0:?}; expected one of {SUITES:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
}

fn result(name: &str, passed: bool, measured: &[(&str, f64)]) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        passed,
        measured: measured.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

fn periodic_grid(n: usize) -> PeriodicGrid {
    PeriodicGrid::new(PI, n).expect("valid grid")
}

/// Highest mode of the random test fields on `[-pi, pi)`.
const TEST_MODES: usize = 12;

/// `sup ||[Lambda^s, f] D_x g||_{L^2} / (||f||_{H^s} ||g||_{H^s})` over `pairs` seeded draws.
pub fn commutator_ratio_sup(grid: &PeriodicGrid, order: SobolevOrder, pairs: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let l2 = SobolevOrder::new(0.0).expect("valid");
    let mut sup = 0.0f64;
    for _ in 0..pairs {
        let f = band_limited(grid, TEST_MODES, 2.0, &mut r);
        let g = band_limited(grid, TEST_MODES, 2.0, &mut r);
        let c = spectral::commutator_lambda(order, &f, &spectral::derivative(&g)).expect("same grid");
        let ratio = spectral::sobolev_norm(&c, l2) / (spectral::sobolev_norm(&f, order) * spectral::sobolev_norm(&g, order));
        sup = sup.max(ratio);
    }
    sup
}

/// Mollifier widths drawn uniformly in `[4 dx, 16 dx]` of `grid`.
pub fn mollifier_width_pairs(grid: &PeriodicGrid, pairs: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut r = rng(seed);
    let (lo, hi) = (4.0 * grid.dx(), 16.0 * grid.dx());
    (0..pairs)
        .map(|_| loop {
            let a = r.gen_range(lo..hi);
            let b = r.gen_range(lo..hi);
            if a != b {
                break (a, b);
            }
        })
        .collect()
}

/// `sup ||J^{h1} phi - J^{h2} phi||_{H^{s-1}} / (|h1 - h2| ||phi||_{H^s})` over
/// `fields` seeded `phi` and the given width pairs.
pub fn mollifier_ratio_sup(
    grid: &PeriodicGrid,
    order: SobolevOrder,
    widths: &[(f64, f64)],
    fields: usize,
    seed: u64,
) -> Result<f64, SpectralError> {
    let lower = order.lowered(1.0)?;
    let mut r = rng(seed);
    let mut sup = 0.0f64;
    for _ in 0..fields {
        let phi = band_limited(grid, TEST_MODES, 2.0, &mut r);
        let norm = spectral::sobolev_norm(&phi, order);
        for &(h1, h2) in widths {
            let a = spectral::mollify(&phi, MollifierSpec::new(h1))?;
            let b = spectral::mollify(&phi, MollifierSpec::new(h2))?;
            let ratio = spectral::sobolev_norm(&a.sub(&b)?, lower) / ((h1 - h2).abs() * norm);
            sup = sup.max(ratio);
        }
    }
    Ok(sup)
}

/// Frequency of the standing wave `cos(k x) cos(omega t)` measured from a
/// linear run, read off the cosine amplitude at `t_final` (needs `omega T < pi`).
pub fn measured_frequency(kernel: &KernelMeasure, n: usize, k: f64, dt: f64, t_final: f64) -> Result<f64, DynamicsError> {
    let grid = periodic_grid(n);
    let cfg = SimConfig::new(grid.clone(), kernel.clone(), t_final)
        .with_nonlinearity(Nonlinearity::zero())
        .with_dt(dt)
        .periodic_data();
    let sim = Simulation::new(cfg)?;
    let mode = SpectralField::from_fn(&grid, |x| (k * x).cos());
    let init = WaveState::new(mode.clone(), SpectralField::zeros(&grid), 0.0)?;
    let end = sim.integrate(&init, sim.n_steps())?;
    let amp = end.final_state().u.inner(&mode)? / mode.inner(&mode)?;
    Ok(amp.clamp(-1.0, 1.0).acos() / sim.config().t_final)
}

/// Relative drift `max_t |E(t) - E(0)| / E(0)` of the linear energy for seeded data.
pub fn linear_energy_drift(kernel: &KernelMeasure, n: usize, dt: f64, t_final: f64, seed: u64) -> Result<f64, DynamicsError> {
    let grid = periodic_grid(n);
    let cfg = SimConfig::new(grid.clone(), kernel.clone(), t_final)
        .with_nonlinearity(Nonlinearity::zero())
        .with_dt(dt)
        .periodic_data();
    let sim = Simulation::new(cfg)?;
    let mut r = rng(seed);
    let modes = (n / 8).min(TEST_MODES);
    let u = band_limited(&grid, modes, 2.0, &mut r);
    let v = band_limited(&grid, modes, 2.0, &mut r);
    let traj = sim.integrate(&WaveState::new(u, v, 0.0)?, 10)?;
    let e = traj.energies();
    Ok(e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max) / e[0])
}

/// `max_{t > 0} (log E(t) - log E(0)) / t` for the frozen coefficient `w = amp cos x`.
pub fn frozen_growth_rate(n: usize, amp: f64, dt: f64, t_final: f64, seed: u64) -> Result<f64, DynamicsError> {
    let grid = periodic_grid(n);
    let cfg = SimConfig::new(grid.clone(), KernelMeasure::example_measure(), t_final).with_dt(dt).periodic_data();
    let sim = Simulation::new(cfg)?;
    let w = SpectralField::from_fn(&grid, |x| amp * x.cos());
    let mut r = rng(seed);
    let u = band_limited(&grid, 8, 2.0, &mut r);
    let v = band_limited(&grid, 8, 2.0, &mut r);
    let traj = sim.integrate_linear(&WaveState::new(u, v, 0.0)?, 10, |_| w.clone(), &Default::default())?;
    let e0 = traj.samples[0].energy.value;
    Ok(traj
        .samples
        .iter()
        .skip(1)
        .map(|s| (s.energy.value / e0).ln() / s.state.t)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Largest difference between the triangular-kernel multiplier applied to
/// `D_x^2 u` and the central difference `(u(x+h) - 2u(x) + u(x-h)) / h^2` with `h = shift dx`.
pub fn delta_h_error(u: &SpectralField, shift: usize) -> f64 {
    let grid = u.grid();
    let h = shift as f64 * grid.dx();
    let tri = KernelMeasure::new(vec![], vec![ContinuousDensity::triangular(h, 1.0)]).expect("valid kernel");
    let spectral_side = spectral::apply_kernel(&tri, &spectral::second_derivative(u));
    let n = grid.len();
    let vals = u.values();
    (0..n)
        .map(|j| {
            let stencil = (vals[(j + shift) % n] - 2.0 * vals[j] + vals[(j + n - shift) % n]) / (h * h);
            (stencil - spectral_side.values()[j]).abs()
        })
        .fold(0.0, f64::max)
}

fn suite_commutator(seed: u64) -> SuiteResult {
    let s = SobolevOrder::new(2.0).expect("valid");
    let coarse = commutator_ratio_sup(&periodic_grid(256), s, 100, seed);
    let fine = commutator_ratio_sup(&periodic_grid(512), s, 100, seed);
    let change = fine / coarse - 1.0;
    let passed = coarse.is_finite() && fine.is_finite() && change < 0.1;
    result("commutator", passed, &[("sup_ratio_n256", coarse), ("sup_ratio_n512", fine), ("relative_increase", change)])
}

fn suite_mollifier(seed: u64) -> Result<SuiteResult, DiagnosticsError> {
    let s = SobolevOrder::new(2.0).expect("valid");
    let grid = periodic_grid(256);
    let widths = mollifier_width_pairs(&grid, 20, seed);
    let coarse = mollifier_ratio_sup(&grid, s, &widths, 50, seed.wrapping_add(1))?;
    let fine = mollifier_ratio_sup(&grid.refined(), s, &widths, 50, seed.wrapping_add(1))?;
    let change = (fine / coarse - 1.0).abs();
    let passed = coarse.is_finite() && fine.is_finite() && change < 0.1;
    Ok(result("mollifier", passed, &[("sup_ratio_n256", coarse), ("sup_ratio_n512", fine), ("relative_change", change)]))
}

fn suite_energy(seed: u64) -> Result<SuiteResult, DiagnosticsError> {
    let drift = linear_energy_drift(&KernelMeasure::example_measure(), 64, 1e-3, 1.0, seed)?;
    let c_coarse = frozen_growth_rate(64, 0.1, 1e-3, 1.0, seed)?;
    let c_fine = frozen_growth_rate(128, 0.1, 1e-3, 1.0, seed)?;
    let change = (c_fine / c_coarse - 1.0).abs();
    let passed = drift <= 1e-8 && change <= 0.2;
    Ok(result(
        "energy",
        passed,
        &[("relative_drift", drift), ("growth_rate_n64", c_coarse), ("growth_rate_n128", c_fine), ("growth_rate_change", change)],
    ))
}

fn suite_dispersion() -> Result<SuiteResult, DiagnosticsError> {
    let kernel = KernelMeasure::example_measure();
    let mut worst = 0.0f64;
    for k in [1.0, 2.0, 3.0] {
        let exact = kernel.dispersion(k).expect("positive symbol").sqrt();
        let measured = measured_frequency(&kernel, 256, k, 1e-3, 1.0)?;
        worst = worst.max((measured - exact).abs() / exact);
    }
    Ok(result("dispersion", worst <= 1e-6, &[("max_relative_error", worst)]))
}

fn suite_delta_h(seed: u64) -> SuiteResult {
    let grid = periodic_grid(256);
    let mut r = rng(seed);
    let worst = (0..20)
        .map(|_| delta_h_error(&band_limited(&grid, 16, 1.0, &mut r), 8))
        .fold(0.0, f64::max);
    result("delta_h", worst <= 1e-11, &[("max_abs_error", worst)])
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult, DiagnosticsError> {
    match name {
        "commutator" => Ok(suite_commutator(seed)),
        "mollifier" => suite_mollifier(seed),
        "energy" => suite_energy(seed),
        "dispersion" => suite_dispersion(),
        "delta_h" => Ok(suite_delta_h(seed)),
        other => Err(DiagnosticsError::UnknownSuite(other.into())),
    }
}
