//! Pseudo-spectral simulation of the nonlocal nonlinear elasticity equation
//!
//! ```text
//! u_tt = B u_xx + g(u)_xx,    B u = mu * u,
//! ```
//!
//! written as the first-order system `u_t = v_x`, `v_t = B u_x + g'(u) u_x` on a
//! periodic grid. With `B = I` this is the p-system of one-dimensional
//! elasticity.
//!
//! Modules:
//! - [`kernels`]: even measures `mu`, their symbols and the two families `B_eps`.
//! - [`spectral`]: grids, transforms, multipliers, Sobolev norms, mollifier, commutators.
//! - [`dynamics`]: right-hand sides, RK4 time stepping, monitors and the energy functional.
//! - [`picard`]: frozen-coefficient solves and the Picard iteration.
//! - [`limits`]: vanishing-dispersion convergence studies.
//! - [`diagnostics`]: seeded property suites with pass/fail verdicts.
//! - [`config`]: the JSON run configuration.

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod kernels;
pub mod limits;
pub mod picard;
mod quadrature;
pub mod random;
pub mod spectral;

pub use kernels::{ContinuousDensity, DensityKind, DiracAtom, KernelBounds, KernelMeasure};
pub use spectral::{PeriodicGrid, SobolevOrder, SpectralField};
