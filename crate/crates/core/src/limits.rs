//! Vanishing-dispersion studies: the same data evolved with `B_eps` and with
//! the identity kernel (the p-system), compared in a Sobolev norm as `eps -> 0`.
//!
//! Type 1 uses `B_eps = I + eps beta*` and measures in `H^{s-1}`; type 2 uses
//! the rescaled measure `mu_eps` and measures in `H^{s-3}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, SimConfig, Simulation, WaveState};
use crate::kernels::{perturb_identity, ContinuousDensity, KernelError, KernelMeasure, MASS_TOLERANCE};
use crate::spectral::{self, SobolevOrder, SpectralError};

/// Slack on the fitted envelope for the smaller `eps` values.
pub const ENVELOPE_SLACK: f64 = 1.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("epsilon must be finite and >= 0, got {0}")]
    InvalidEpsilon(f64),
    #[error("invalid epsilon list: {0}")]
    InvalidEpsList(String),
    #[error("kernel total mass is {0}, expected 1")]
    MassNotOne(f64),
    #[error("envelope violated at eps = {eps}, t = {t}: error {error} > {bound}")]
    EnvelopeViolated { eps: f64, t: f64, error: f64, bound: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Which family `B_eps` approaches the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LimitType {
    /// `B_eps = I + eps beta*`
    Type1 { beta: ContinuousDensity },
    /// `B_eps u = mu_eps * u`
    Type2 { mu: KernelMeasure },
}

impl LimitType {
    pub fn default_type1() -> Self {
        LimitType::Type1 { beta: ContinuousDensity::exponential(1.0) }
    }

    pub fn default_type2() -> Self {
        LimitType::Type2 { mu: example_measure() }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LimitType::Type1 { .. } => "type1",
            LimitType::Type2 { .. } => "type2",
        }
    }

    /// Orders lost in the error norm: 1 for type 1, 3 for type 2.
    pub fn derivative_loss(&self) -> f64 {
        match self {
            LimitType::Type1 { .. } => 1.0,
            LimitType::Type2 { .. } => 3.0,
        }
    }

    pub fn sigma(&self, s: SobolevOrder) -> Result<SobolevOrder, LimitError> {
        Ok(s.lowered(self.derivative_loss())?)
    }

    /// Kernel at `eps`; `eps = 0` gives exactly the identity.
    pub fn kernel(&self, eps: f64) -> Result<KernelMeasure, LimitError> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(LimitError::InvalidEpsilon(eps));
        }
        match self {
            LimitType::Type1 { beta } => Ok(perturb_identity(*beta, eps)?),
            LimitType::Type2 { mu } => {
                let mass = mu.total_mass();
                if (mass - 1.0).abs() > MASS_TOLERANCE {
                    return Err(LimitError::MassNotOne(mass));
                }
                if eps == 0.0 {
                    Ok(KernelMeasure::identity())
                } else {
                    Ok(mu.scale(eps)?)
                }
            }
        }
    }
}

/// `mu = (delta_{-1} + 3 delta + delta_1) / 5`.
pub fn example_measure() -> KernelMeasure {
    KernelMeasure::example_measure()
}

/// Error curve of one `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub eps: f64,
    pub times: Vec<f64>,
    /// `||u^eps - u||_{H^sigma} + ||v^eps - v||_{H^sigma}`
    pub errors: Vec<f64>,
    /// Same difference in `H^{s-1}`, reported for type 2 only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors_s_minus_1: Option<Vec<f64>>,
}

/// `0.5 dx / sqrt(c2)` with `c2` the largest upper bound over every kernel the
/// pairs will use, so all runs share one step.
pub fn common_dt(config: &SimConfig, limit: &LimitType, eps_list: &[f64]) -> Result<f64, LimitError> {
    if let Some(dt) = config.dt {
        return Ok(dt);
    }
    let mut c2 = config.clone_with_kernel(KernelMeasure::identity()).kernel_bounds()?.c2;
    for &eps in eps_list {
        c2 = c2.max(config.clone_with_kernel(limit.kernel(eps)?).kernel_bounds()?.c2);
    }
    Ok(0.5 * config.grid.dx() / c2.sqrt())
}

/// Evolves `init` with `B_eps` and with the identity kernel on the same grid
/// and step, returning the error at every `sample_every`-th step.
pub fn run_pair(
    config: &SimConfig,
    limit: &LimitType,
    eps: f64,
    init: &WaveState,
    sample_every: usize,
) -> Result<ErrorSeries, LimitError> {
    let dt = common_dt(config, limit, &[eps])?;
    run_pair_with_dt(config, limit, eps, init, sample_every, dt)
}

fn run_pair_with_dt(
    config: &SimConfig,
    limit: &LimitType,
    eps: f64,
    init: &WaveState,
    sample_every: usize,
    dt: f64,
) -> Result<ErrorSeries, LimitError> {
    let sigma = limit.sigma(config.s_norm)?;
    let mut perturbed = config.clone_with_kernel(limit.kernel(eps)?);
    perturbed.dt = Some(dt);
    let mut baseline = config.clone_with_kernel(KernelMeasure::identity());
    baseline.dt = Some(dt);
    let a = Simulation::new(perturbed)?.integrate(init, sample_every)?;
    let b = Simulation::new(baseline)?.integrate(init, sample_every)?;
    let secondary = match limit {
        LimitType::Type2 { .. } => Some(config.s_norm.lowered(1.0)?),
        LimitType::Type1 { .. } => None,
    };
    let mut errors = Vec::with_capacity(a.samples.len());
    let mut aux = Vec::new();
    for (x, y) in a.samples.iter().zip(&b.samples) {
        let du = x.state.u.sub(&y.state.u)?;
        let dv = x.state.v.sub(&y.state.v)?;
        errors.push(spectral::sobolev_norm(&du, sigma) + spectral::sobolev_norm(&dv, sigma));
        if let Some(order) = secondary {
            aux.push(spectral::sobolev_norm(&du, order) + spectral::sobolev_norm(&dv, order));
        }
    }
    Ok(ErrorSeries { eps, times: a.times(), errors, errors_s_minus_1: secondary.map(|_| aux) })
}

/// Result of a study over a decreasing list of `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub limit: String,
    pub eps_list: Vec<f64>,
    pub times: Vec<f64>,
    pub error_curves: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_curves_s_minus_1: Option<Vec<Vec<f64>>>,
    pub sigma: SobolevOrder,
    pub dt: f64,
    /// Least-squares slope of `log e(T)` against `log eps`.
    pub fitted_order: f64,
    /// Smallest `C` with `e(t) <= eps (e^{Ct} - 1)` on the largest `eps`.
    #[serde(rename = "fitted_C")]
    pub fitted_c: f64,
    /// `e(T)` ratios of consecutive `eps`.
    pub pairwise_ratios: Vec<f64>,
}

impl ConvergenceReport {
    pub fn final_errors(&self) -> Vec<f64> {
        self.error_curves.iter().map(|c| *c.last().expect("nonempty curve")).collect()
    }

    pub fn envelope(&self, eps: f64, t: f64) -> f64 {
        eps * (self.fitted_c * t).exp_m1()
    }

    /// First point where an `eps` below the fitting one leaves `1.1 eps (e^{Ct} - 1)`.
    pub fn envelope_violation(&self) -> Option<LimitError> {
        for (&eps, curve) in self.eps_list.iter().zip(&self.error_curves).skip(1) {
            for (&t, &e) in self.times.iter().zip(curve) {
                let bound = ENVELOPE_SLACK * self.envelope(eps, t);
                if e > bound {
                    return Some(LimitError::EnvelopeViolated { eps, t, error: e, bound });
                }
            }
        }
        None
    }

    /// CSV with columns `eps,t,error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,t,error\n");
        for (&eps, curve) in self.eps_list.iter().zip(&self.error_curves) {
            for (&t, &e) in self.times.iter().zip(curve) {
                out.push_str(&format!("{eps:e},{t:e},{e:e}\n"));
            }
        }
        out
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Smallest `C >= 0` with `e(t) <= eps (e^{Ct} - 1)` at every sampled `t > 0`.
///
/// Any such `C` makes the one-sided squared residual vanish, so this is also
/// the least-squares minimizer of smallest value.
pub fn fit_envelope_rate(eps: f64, times: &[f64], errors: &[f64]) -> f64 {
    times
        .iter()
        .zip(errors)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, &e)| (e / eps).ln_1p() / t)
        .fold(0.0, f64::max)
}

fn validate_eps_list(eps_list: &[f64]) -> Result<(), LimitError> {
    if eps_list.len() < 4 {
        return Err(LimitError::InvalidEpsList(format!("need at least 4 values, got {}", eps_list.len())));
    }
    if let Some(&e) = eps_list.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(LimitError::InvalidEpsilon(e));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LimitError::InvalidEpsList("values must be strictly decreasing".into()));
    }
    Ok(())
}

/// Runs every pair, fits order and envelope rate, without the envelope check.
pub fn assemble_report(
    config: &SimConfig,
    limit: &LimitType,
    eps_list: &[f64],
    init: &WaveState,
    sample_every: usize,
) -> Result<ConvergenceReport, LimitError> {
    validate_eps_list(eps_list)?;
    let sigma = limit.sigma(config.s_norm)?;
    let dt = common_dt(config, limit, eps_list)?;
    let series = eps_list
        .par_iter()
        .map(|&eps| run_pair_with_dt(config, limit, eps, init, sample_every, dt))
        .collect::<Result<Vec<_>, _>>()?;
    let times = series[0].times.clone();
    let finals: Vec<f64> = series.iter().map(|s| *s.errors.last().expect("nonempty")).collect();
    let log_eps: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let log_err: Vec<f64> = finals.iter().map(|e| e.ln()).collect();
    let fitted_order = fit_slope(&log_eps, &log_err);
    let fitted_c = fit_envelope_rate(eps_list[0], &times, &series[0].errors);
    let pairwise_ratios = finals.windows(2).map(|w| w[0] / w[1]).collect();
    let secondary = series.iter().map(|s| s.errors_s_minus_1.clone()).collect::<Option<Vec<_>>>();
    Ok(ConvergenceReport {
        limit: limit.label().into(),
        eps_list: eps_list.to_vec(),
        times,
        error_curves: series.into_iter().map(|s| s.errors).collect(),
        error_curves_s_minus_1: secondary,
        sigma,
        dt,
        fitted_order,
        fitted_c,
        pairwise_ratios,
    })
}

/// [`assemble_report`] followed by the envelope check.
pub fn study(
    config: &SimConfig,
    limit: &LimitType,
    eps_list: &[f64],
    init: &WaveState,
    sample_every: usize,
) -> Result<ConvergenceReport, LimitError> {
    let report = assemble_report(config, limit, eps_list, init, sample_every)?;
    match report.envelope_violation() {
        Some(e) => Err(e),
        None => Ok(report),
    }
}
