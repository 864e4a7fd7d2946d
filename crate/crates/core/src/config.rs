//! JSON run configuration shared by every CLI command.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "sim": { "grid": {"L": 40.0, "N": 1024}, "kernel": {...}, "t_final": 1.0 },
//!   "initial": { "profile": {"kind": "gaussian", "amp": 0.05, "width": 2.0}, "velocity": "zero" },
//!   "seed": 42,
//!   "sample_every": 5
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::dynamics::{make_initial, DynamicsError, Profile, SimConfig, Simulation, VelocityChoice, WaveState};
use crate::kernels::KernelMeasure;
use crate::spectral::PeriodicGrid;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_AMPLITUDE: f64 = 0.05;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_sample_every() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub profile: Profile,
    #[serde(default)]
    pub velocity: VelocityChoice,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { profile: Profile::Gaussian { amp: DEFAULT_AMPLITUDE, width: 2.0 }, velocity: VelocityChoice::Zero }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub sim: SimConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

impl Default for RunConfig {
    /// Desk regime: `L = 40`, `N = 1024`, example kernel, `g(u) = u^2`, `T = 1`,
    /// Gaussian data of amplitude 0.05 and width 2.
    fn default() -> Self {
        let grid = PeriodicGrid::new(40.0, 1024).expect("valid grid");
        Self {
            schema: SCHEMA_VERSION,
            sim: SimConfig::new(grid, KernelMeasure::example_measure(), 1.0),
            initial: InitialConfig::default(),
            seed: DEFAULT_SEED,
            sample_every: default_sample_every(),
        }
    }
}

impl RunConfig {
    /// Checks everything that can be checked without stepping.
    pub fn validate(&self) -> Result<Simulation, DynamicsError> {
        if self.schema != SCHEMA_VERSION {
            return Err(DynamicsError::InvalidConfig(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        if self.sample_every == 0 {
            return Err(DynamicsError::InvalidConfig("sample_every must be >= 1".into()));
        }
        let sim = Simulation::new(self.sim.clone())?;
        self.initial_state()?;
        Ok(sim)
    }

    pub fn initial_state(&self) -> Result<WaveState, DynamicsError> {
        make_initial(self.initial.profile, &self.sim.grid, self.initial.velocity)
    }
}
