use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DynamicsError, Nonlinearity, WaveState, BOUNDARY_TOLERANCE, TAIL_TOLERANCE};
use crate::kernels::{KernelBounds, KernelMeasure};
use crate::spectral::{self, MollifierSpec, PeriodicGrid, SobolevOrder, SpectralField};

fn default_nonlinearity() -> Nonlinearity {
    Nonlinearity::quadratic(1.0)
}
fn default_s_norm() -> SobolevOrder {
    SobolevOrder::new(4.0).unwrap()
}
fn default_true() -> bool {
    true
}
fn default_cfl() -> f64 {
    1.0
}
fn default_boundary() -> Option<f64> {
    Some(BOUNDARY_TOLERANCE)
}
fn default_tail() -> Option<f64> {
    Some(TAIL_TOLERANCE)
}

/// Parameters of one run.
///
/// `dt = None` selects `0.5 dx / sqrt(c2)`; `hyperbolicity_floor = None`
/// selects `c1 / 2`. The two monitor tolerances can be switched off with
/// `null`, which is needed for intrinsically periodic data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: PeriodicGrid,
    pub kernel: KernelMeasure,
    #[serde(default = "default_nonlinearity")]
    pub nonlinearity: Nonlinearity,
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_final: f64,
    #[serde(default = "default_s_norm")]
    pub s_norm: SobolevOrder,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default)]
    pub hyperbolicity_floor: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    #[serde(default = "default_boundary")]
    pub boundary_tolerance: Option<f64>,
    #[serde(default = "default_tail")]
    pub tail_tolerance: Option<f64>,
}

impl SimConfig {
    /// Defaults for everything except grid, kernel and final time.
    pub fn new(grid: PeriodicGrid, kernel: KernelMeasure, t_final: f64) -> Self {
        Self {
            grid,
            kernel,
            nonlinearity: default_nonlinearity(),
            dt: None,
            t_final,
            s_norm: default_s_norm(),
            dealias: true,
            hyperbolicity_floor: None,
            cfl_safety: default_cfl(),
            boundary_tolerance: default_boundary(),
            tail_tolerance: default_tail(),
        }
    }

    pub fn with_nonlinearity(mut self, nl: Nonlinearity) -> Self {
        self.nonlinearity = nl;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_s_norm(mut self, s: f64) -> Self {
        self.s_norm = SobolevOrder::new(s).expect("valid Sobolev order");
        self
    }

    pub fn periodic_data(mut self) -> Self {
        self.boundary_tolerance = None;
        self
    }

    /// Copy with a different kernel.
    pub fn clone_with_kernel(&self, kernel: KernelMeasure) -> Self {
        Self { kernel, ..self.clone() }
    }

    /// Sampled symbol bounds over every resolved frequency.
    pub fn kernel_bounds(&self) -> Result<KernelBounds, DynamicsError> {
        let half = self.grid.len() / 2;
        Ok(self.kernel.verify_bounds(self.grid.nyquist(), 4 * half + 1)?)
    }

    /// Largest admissible time step `cfl_safety * dx / sqrt(c2)`.
    pub fn cfl_limit(&self) -> Result<f64, DynamicsError> {
        let b = self.kernel_bounds()?;
        Ok(self.cfl_safety * self.grid.dx() / b.c2.sqrt())
    }
}

/// Optional terms of the linearized system: a forcing `F_2` in the `v`
/// equation and a mollifier `J^h` applied to both fluxes.
#[derive(Debug, Clone, Default)]
pub struct LinearExtras {
    pub forcing: Option<SpectralField>,
    pub mollifier: Option<MollifierSpec>,
}

/// A validated [`SimConfig`] with the derived step size, bounds and symbol table.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    bounds: KernelBounds,
    dt: f64,
    n_steps: usize,
    floor: f64,
    b_symbol: Vec<f64>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, DynamicsError> {
        if !(config.t_final > 0.0) || !config.t_final.is_finite() {
            return Err(DynamicsError::InvalidConfig(format!("t_final must be > 0, got {}", config.t_final)));
        }
        if !(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0) {
            return Err(DynamicsError::InvalidConfig(format!(
                "cfl_safety must lie in (0, 1], got {}",
                config.cfl_safety
            )));
        }
        let bounds = config.kernel_bounds()?;
        let limit = config.cfl_safety * config.grid.dx() / bounds.c2.sqrt();
        let requested = match config.dt {
            Some(dt) => {
                if !(dt > 0.0) || !dt.is_finite() {
                    return Err(DynamicsError::InvalidConfig(format!("dt must be > 0, got {dt}")));
                }
                if dt > limit * (1.0 + 1e-12) {
                    return Err(DynamicsError::CflViolated { dt, limit });
                }
                dt
            }
            None => 0.5 * config.grid.dx() / bounds.c2.sqrt(),
        };
        let n_steps = ((config.t_final / requested) - 1e-9).ceil().max(1.0) as usize;
        let dt = config.t_final / n_steps as f64;
        let floor = config.hyperbolicity_floor.unwrap_or(0.5 * bounds.c1);
        if !(floor > 0.0) {
            return Err(DynamicsError::InvalidConfig(format!("hyperbolicity floor must be > 0, got {floor}")));
        }
        for tol in [config.boundary_tolerance, config.tail_tolerance].into_iter().flatten() {
            if !(tol > 0.0) {
                return Err(DynamicsError::InvalidConfig(format!("monitor tolerance must be > 0, got {tol}")));
            }
        }
        let b_symbol = (0..config.grid.len()).map(|j| config.kernel.symbol(config.grid.frequency(j))).collect();
        Ok(Self { config, bounds, dt, n_steps, floor, b_symbol })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.config.grid
    }

    pub fn bounds(&self) -> KernelBounds {
        self.bounds
    }

    /// Uniform step actually used (`t_final / n_steps`).
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn hyperbolicity_floor(&self) -> f64 {
        self.floor
    }

    /// `c1 + min_x w`.
    pub fn hyperbolicity_margin(&self, w: &SpectralField) -> f64 {
        self.bounds.c1 + w.min()
    }

    fn check_hyperbolic(&self, w: &SpectralField, t: f64) -> Result<(), DynamicsError> {
        let margin = self.hyperbolicity_margin(w);
        if !(margin >= self.floor) {
            return Err(DynamicsError::HyperbolicityLost { t, margin, floor: self.floor });
        }
        Ok(())
    }

    /// `(D_x f, B D_x f)` from a single forward transform.
    fn derivative_pair(&self, f: &SpectralField) -> (SpectralField, SpectralField) {
        let grid = self.grid();
        let n = grid.len();
        let c = f.coefficients();
        let mut d = Vec::with_capacity(n);
        let mut bd = Vec::with_capacity(n);
        for (j, &cj) in c.iter().enumerate() {
            let ik = if j == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, grid.frequency(j)) };
            d.push(cj * ik);
            bd.push(cj * ik * self.b_symbol[j]);
        }
        (
            SpectralField::from_coefficients(grid, d).expect("grid length"),
            SpectralField::from_coefficients(grid, bd).expect("grid length"),
        )
    }

    fn product(&self, w: &SpectralField, ux: &SpectralField) -> SpectralField {
        let p = w.mul(ux).expect("same grid");
        if self.config.dealias {
            spectral::dealias(&p)
        } else {
            p
        }
    }

    /// Tendencies of the nonlinear system: `(D_x v, B D_x u + P[g'(u) D_x u])`.
    pub fn rhs_nonlinear(&self, state: &WaveState) -> Result<(SpectralField, SpectralField), DynamicsError> {
        let w = self.config.nonlinearity.apply_prime(&state.u);
        self.check_hyperbolic(&w, state.t)?;
        let du = spectral::derivative(&state.v);
        let (ux, bux) = self.derivative_pair(&state.u);
        let dv = if self.config.nonlinearity.is_zero() {
            bux
        } else {
            bux.add(&self.product(&w, &ux))?
        };
        Ok((du, dv))
    }

    /// Tendencies of the frozen-coefficient system `(D_x v, B D_x u + P[w D_x u])`.
    pub fn rhs_linearized(
        &self,
        state: &WaveState,
        w: &SpectralField,
    ) -> Result<(SpectralField, SpectralField), DynamicsError> {
        self.rhs_linearized_with(state, w, &LinearExtras::default())
    }

    /// As [`Self::rhs_linearized`], with optional forcing and mollified fluxes
    /// `u_t = J D_x v`, `v_t = B J D_x u + w J D_x u + F`.
    pub fn rhs_linearized_with(
        &self,
        state: &WaveState,
        w: &SpectralField,
        extras: &LinearExtras,
    ) -> Result<(SpectralField, SpectralField), DynamicsError> {
        w.check_same_grid(&state.u)?;
        self.check_hyperbolic(w, state.t)?;
        let (u, v) = match extras.mollifier {
            Some(spec) => (spectral::mollify(&state.u, spec)?, spectral::mollify(&state.v, spec)?),
            None => (state.u.clone(), state.v.clone()),
        };
        let du = spectral::derivative(&v);
        let (ux, bux) = self.derivative_pair(&u);
        let mut dv = bux.add(&self.product(w, &ux))?;
        if let Some(f) = &extras.forcing {
            dv = dv.add(f)?;
        }
        Ok((du, dv))
    }
}
