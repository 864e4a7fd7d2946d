//! The first-order system `u_t = v_x`, `v_t = B u_x + g'(u) u_x`, its
//! frozen-coefficient linearization, explicit RK4 time stepping and run
//! monitors.

mod energy;
mod initial;
mod integrate;
mod nonlinearity;
mod simulation;

pub use energy::{energy_functional, nonlinear_estimate_ratio, EnergyReading};
pub use initial::{make_initial, Profile, VelocityChoice};
pub use integrate::{step_rk4, MonitorState, Sample, Trajectory};
pub use nonlinearity::Nonlinearity;
pub use simulation::{LinearExtras, SimConfig, Simulation};

use thiserror::Error;

use crate::kernels::KernelError;
use crate::spectral::{SpectralError, SpectralField};

/// Default relative boundary amplitude that aborts a run.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
/// Default fraction of spectral energy above the two-thirds cutoff that aborts a run.
pub const TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("hyperbolicity lost at t = {t}: c1 + min w = {margin} < d1 = {floor}")]
    HyperbolicityLost { t: f64, margin: f64, floor: f64 },
    #[error("boundary amplitude ratio {ratio} exceeds {tolerance} at t = {t}")]
    BoundaryContamination { t: f64, ratio: f64, tolerance: f64 },
    #[error("spectral tail fraction {fraction} exceeds {tolerance} at t = {t}")]
    SpectralTailExceeded { t: f64, fraction: f64, tolerance: f64 },
    #[error("non-finite value at t = {t}")]
    NonFiniteValue { t: f64 },
    #[error("energy is not coercive: c1 + min w = {margin} <= 0")]
    EnergyNotCoercive { margin: f64 },
    #[error("field is identically zero")]
    ZeroField,
    #[error("initial profile is {value} at the domain boundary (must be < 1e-12)")]
    ProfileNotLocalized { value: f64 },
    #[error("invalid initial profile: {0}")]
    InvalidProfile(String),
    #[error("time step {dt} violates the CFL bound {limit}")]
    CflViolated { dt: f64, limit: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl DynamicsError {
    /// Stable identifier for manifests and exit handling.
    pub fn reason(&self) -> &'static str {
        match self {
            DynamicsError::HyperbolicityLost { .. } => "hyperbolicity_lost",
            DynamicsError::BoundaryContamination { .. } => "boundary_contamination",
            DynamicsError::SpectralTailExceeded { .. } => "spectral_tail_exceeded",
            DynamicsError::NonFiniteValue { .. } => "non_finite_value",
            DynamicsError::EnergyNotCoercive { .. } => "energy_not_coercive",
            DynamicsError::ZeroField => "zero_field",
            DynamicsError::ProfileNotLocalized { .. } => "profile_not_localized",
            DynamicsError::InvalidProfile(_) => "invalid_profile",
            DynamicsError::CflViolated { .. } => "cfl_violated",
            DynamicsError::InvalidConfig(_) => "invalid_config",
            DynamicsError::Kernel(_) => "kernel_error",
            DynamicsError::Spectral(_) => "spectral_error",
        }
    }

    /// Errors raised by a monitor while stepping, as opposed to bad input.
    pub fn is_monitor_abort(&self) -> bool {
        matches!(
            self,
            DynamicsError::HyperbolicityLost { .. }
                | DynamicsError::BoundaryContamination { .. }
                | DynamicsError::SpectralTailExceeded { .. }
                | DynamicsError::NonFiniteValue { .. }
        )
    }
}

/// Strain `u` and velocity potential `v` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub u: SpectralField,
    pub v: SpectralField,
    pub t: f64,
}

impl WaveState {
    pub fn new(u: SpectralField, v: SpectralField, t: f64) -> Result<Self, DynamicsError> {
        u.check_same_grid(&v)?;
        Ok(Self { u, v, t })
    }

    pub fn zero(grid: &crate::spectral::PeriodicGrid) -> Self {
        Self { u: SpectralField::zeros(grid), v: SpectralField::zeros(grid), t: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    /// `self + a * (du, dv)`, time advanced by `dt`.
    pub(crate) fn offset(&self, a: f64, du: &SpectralField, dv: &SpectralField, dt: f64) -> Self {
        Self { u: self.u.axpy(a, du).expect("same grid"), v: self.v.axpy(a, dv).expect("same grid"), t: self.t + dt }
    }
}
