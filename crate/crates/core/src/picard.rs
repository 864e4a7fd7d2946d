//! Picard iteration for the nonlinear system through a sequence of
//! frozen-coefficient linear solves.
//!
//! Iterate `n + 1` solves `u_t = v_x`, `v_t = B u_x + w_n u_x` from the common
//! data with `w_n = g'(u^n)`, starting from `(u^0, v^0) = (u_0, v_0)`.

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{DynamicsError, LinearExtras, Sample, Simulation, Trajectory, WaveState};
use crate::spectral::{self, MollifierSpec, SpectralError, SpectralField};

/// Minimum number of coefficient samples per unit time.
pub const MIN_SAMPLES_PER_UNIT: f64 = 8.0;
/// Contraction factor above which an iteration is considered stalled.
pub const STALL_FACTOR: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PicardError {
    #[error("no contraction: factors {previous} and {current} exceed {STALL_FACTOR} at iteration {iteration}")]
    NoContraction { iteration: usize, previous: f64, current: f64 },
    #[error("invalid coefficient samples: {0}")]
    InvalidSamples(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl From<SpectralError> for PicardError {
    fn from(e: SpectralError) -> Self {
        PicardError::Dynamics(e.into())
    }
}

/// A coefficient `w(x, t)` known at discrete times, evaluated between them by
/// cubic Lagrange interpolation on the four nearest samples.
#[derive(Debug, Clone)]
pub struct CoefficientPath {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl CoefficientPath {
    pub fn constant(w: SpectralField) -> Self {
        Self { times: vec![0.0], fields: vec![w] }
    }

    pub fn sampled(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self, PicardError> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(PicardError::InvalidSamples(format!(
                "{} times for {} fields",
                times.len(),
                fields.len()
            )));
        }
        let max_gap = 1.0 / MIN_SAMPLES_PER_UNIT;
        for pair in times.windows(2) {
            let gap = pair[1] - pair[0];
            if !(gap > 0.0) {
                return Err(PicardError::InvalidSamples("times must be strictly increasing".into()));
            }
            if gap > max_gap * (1.0 + 1e-12) {
                return Err(PicardError::InvalidSamples(format!("gap {gap} exceeds {max_gap}")));
            }
        }
        for f in &fields[1..] {
            f.check_same_grid(&fields[0])?;
        }
        Ok(Self { times, fields })
    }

    /// `w = g'(u)` along a sampled trajectory.
    pub fn from_trajectory(traj: &Trajectory, w: impl Fn(&SpectralField) -> SpectralField) -> Result<Self, PicardError> {
        let times = traj.times();
        let fields = traj.samples.iter().map(|s| w(&s.state.u)).collect();
        Self::sampled(times, fields)
    }

    pub fn at(&self, t: f64) -> SpectralField {
        let n = self.times.len();
        if n == 1 {
            return self.fields[0].clone();
        }
        let m = n.min(4);
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        let start = i.saturating_sub(1).min(n - m);
        let nodes = &self.times[start..start + m];
        let weights: Vec<f64> = (0..m)
            .map(|j| {
                (0..m)
                    .filter(|&k| k != j)
                    .map(|k| (t - nodes[k]) / (nodes[j] - nodes[k]))
                    .product()
            })
            .collect();
        let grid = self.fields[0].grid();
        let mut out = vec![0.0; grid.len()];
        for (j, &wj) in weights.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(self.fields[start + j].values()) {
                *o += wj * x;
            }
        }
        SpectralField::from_values(grid, out).expect("same grid")
    }
}

/// Linear solve with coefficient `w(t)`, recording every step.
pub fn solve_frozen(
    sim: &Simulation,
    w_traj: &CoefficientPath,
    init: &WaveState,
    extras: &LinearExtras,
) -> Result<Trajectory, PicardError> {
    if sim.dt() > 1.0 / MIN_SAMPLES_PER_UNIT {
        return Err(PicardError::InvalidSamples(format!(
            "step {} gives fewer than {MIN_SAMPLES_PER_UNIT} samples per unit time",
            sim.dt()
        )));
    }
    Ok(sim.integrate_linear(init, 1, |t| w_traj.at(t), extras)?)
}

/// Sequence of Picard iterates and their successive differences.
#[derive(Debug, Clone)]
pub struct PicardRun {
    /// `(u^0, v^0), (u^1, v^1), ...`, all sampled at every step.
    pub iterates: Vec<Trajectory>,
    /// `sup_t ||u^{n+1} - u^n||_{H^{s-1}} + ||v^{n+1} - v^n||_{H^{s-1}}`
    pub diff_norms: Vec<f64>,
    /// `diff_norms[n + 1] / diff_norms[n]`
    pub contraction_factors: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardSummary {
    pub diff_norms: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    pub converged: bool,
}

impl PicardRun {
    pub fn final_iterate(&self) -> &Trajectory {
        self.iterates.last().expect("at least the initial iterate")
    }

    pub fn summary(&self) -> PicardSummary {
        PicardSummary {
            diff_norms: self.diff_norms.clone(),
            contraction_factors: self.contraction_factors.clone(),
            converged: self.converged,
        }
    }
}

/// `sup_t (||a.u - b.u||_{H^r} + ||a.v - b.v||_{H^r})` over two trajectories sampled at the same times.
pub fn sup_distance(a: &Trajectory, b: &Trajectory, order: spectral::SobolevOrder) -> Result<f64, PicardError> {
    if a.samples.len() != b.samples.len() {
        return Err(PicardError::InvalidSamples(format!(
            "trajectories have {} and {} samples",
            a.samples.len(),
            b.samples.len()
        )));
    }
    let mut sup = 0.0f64;
    for (x, y) in a.samples.iter().zip(&b.samples) {
        let du = spectral::sobolev_norm(&x.state.u.sub(&y.state.u)?, order);
        let dv = spectral::sobolev_norm(&x.state.v.sub(&y.state.v)?, order);
        sup = sup.max(du + dv);
    }
    Ok(sup)
}

/// `sup_t ||u(t)||_{H^r} + ||v(t)||_{H^r}`.
pub fn sup_norm(traj: &Trajectory, order: spectral::SobolevOrder) -> f64 {
    traj.samples
        .iter()
        .map(|s| spectral::sobolev_norm(&s.state.u, order) + spectral::sobolev_norm(&s.state.v, order))
        .fold(0.0, f64::max)
}

fn stationary(sim: &Simulation, init: &WaveState, template: &Trajectory) -> Result<Trajectory, PicardError> {
    let w = sim.config().nonlinearity.apply_prime(&init.u);
    let samples = template
        .samples
        .iter()
        .map(|s| {
            let state = WaveState { t: s.state.t, ..init.clone() };
            sim.sample_state(&state, &w)
        })
        .collect::<Result<Vec<Sample>, DynamicsError>>()?;
    Ok(Trajectory { samples, dt: template.dt, n_steps: template.n_steps })
}

/// Runs at most `max_iters` linear solves, stopping once a difference falls below `tol`.
pub fn picard_solve(sim: &Simulation, init: &WaveState, max_iters: usize, tol: f64) -> Result<PicardRun, PicardError> {
    if max_iters == 0 {
        return Err(PicardError::Dynamics(DynamicsError::InvalidConfig("max_iters must be >= 1".into())));
    }
    if !(tol > 0.0) {
        return Err(PicardError::Dynamics(DynamicsError::InvalidConfig(format!("tol must be > 0, got {tol}"))));
    }
    let order = sim.config().s_norm.lowered(1.0)?;
    let nl = sim.config().nonlinearity.clone();
    let extras = LinearExtras::default();

    let first = solve_frozen(sim, &CoefficientPath::constant(nl.apply_prime(&init.u)), init, &extras)?;
    let mut iterates = vec![stationary(sim, init, &first)?, first];
    let mut diff_norms = Vec::new();
    let mut contraction_factors: Vec<f64> = Vec::new();
    let mut converged = false;
    loop {
        let n = iterates.len();
        let d = sup_distance(&iterates[n - 1], &iterates[n - 2], order)?;
        if let Some(&prev) = diff_norms.last() {
            let factor = if prev > 0.0 { d / prev } else { 0.0 };
            if let Some(&last) = contraction_factors.last() {
                if last > STALL_FACTOR && factor > STALL_FACTOR {
                    return Err(PicardError::NoContraction { iteration: n - 1, previous: last, current: factor });
                }
            }
            contraction_factors.push(factor);
        }
        diff_norms.push(d);
        if d < tol {
            converged = true;
            break;
        }
        if n - 1 >= max_iters {
            break;
        }
        let path = CoefficientPath::from_trajectory(&iterates[n - 1], |u| nl.apply_prime(u))?;
        iterates.push(solve_frozen(sim, &path, init, &extras)?);
    }
    Ok(PicardRun { iterates, diff_norms, contraction_factors, converged })
}

/// `sup_t ||U_{h1} - U_{h2}||_{H^{s-1}} / |h1 - h2|` for the mollified frozen
/// system with coefficient path `w`.
pub fn mollifier_difference_ratio(
    sim: &Simulation,
    w: &CoefficientPath,
    init: &WaveState,
    h1: f64,
    h2: f64,
) -> Result<f64, PicardError> {
    if h1 == h2 {
        return Err(PicardError::InvalidSamples("mollifier widths must differ".into()));
    }
    let order = sim.config().s_norm.lowered(1.0)?;
    let solve = |h: f64| {
        let extras = LinearExtras { forcing: None, mollifier: Some(MollifierSpec::new(h)) };
        solve_frozen(sim, w, init, &extras)
    };
    let a = solve(h1)?;
    let b = solve(h2)?;
    Ok(sup_distance(&a, &b, order)? / (h1 - h2).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        let g = PeriodicGrid::new(1.0, 8).unwrap();
        let times: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect();
        let poly = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t + 3.0 * t * t * t;
        let fields = times.iter().map(|&t| SpectralField::from_fn(&g, |x| x * poly(t))).collect();
        let path = CoefficientPath::sampled(times, fields).unwrap();
        for t in [0.0, 0.03, 0.47, 0.85, 0.9] {
            let w = path.at(t);
            let exact = SpectralField::from_fn(&g, |x| x * poly(t));
            assert!(w.sub(&exact).unwrap().max_abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn sparse_samples_rejected() {
        let g = PeriodicGrid::new(1.0, 8).unwrap();
        let z = SpectralField::zeros(&g);
        let err = CoefficientPath::sampled(vec![0.0, 0.5], vec![z.clone(), z]).unwrap_err();
        assert!(matches!(err, PicardError::InvalidSamples(_)));
    }
}
