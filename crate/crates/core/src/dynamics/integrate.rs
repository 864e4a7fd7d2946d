use serde::{Deserialize, Serialize};

use super::{energy_functional, DynamicsError, EnergyReading, LinearExtras, Simulation, WaveState};
use crate::spectral::{self, SpectralField};

type Tendency = (SpectralField, SpectralField);

/// One classical RK4 step of size `dt` (negative steps run backwards).
pub fn step_rk4<F>(state: &WaveState, rhs: F, dt: f64) -> Result<WaveState, DynamicsError>
where
    F: Fn(&WaveState) -> Result<Tendency, DynamicsError>,
{
    let half = 0.5 * dt;
    let (k1u, k1v) = rhs(state)?;
    let (k2u, k2v) = rhs(&state.offset(half, &k1u, &k1v, half))?;
    let (k3u, k3v) = rhs(&state.offset(half, &k2u, &k2v, half))?;
    let (k4u, k4v) = rhs(&state.offset(dt, &k3u, &k3v, dt))?;
    let combine = |base: &SpectralField, k1: &SpectralField, k2: &SpectralField, k3: &SpectralField, k4: &SpectralField| {
        let vals = base
            .values()
            .iter()
            .zip(k1.values())
            .zip(k2.values())
            .zip(k3.values())
            .zip(k4.values())
            .map(|((((b, a1), a2), a3), a4)| b + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4))
            .collect();
        SpectralField::from_values(base.grid(), vals).expect("same grid")
    };
    let next = WaveState {
        u: combine(&state.u, &k1u, &k2u, &k3u, &k4u),
        v: combine(&state.v, &k1v, &k2v, &k3v, &k4v),
        t: state.t + dt,
    };
    if !next.is_finite() {
        return Err(DynamicsError::NonFiniteValue { t: next.t });
    }
    Ok(next)
}

/// Monitor values at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorState {
    pub t: f64,
    /// `c1 + min_x w`
    pub min_margin: f64,
    /// `c1 + max_x w`
    pub max_margin: f64,
    /// `|u(+-L)| / max |u|`
    pub boundary_ratio: f64,
    /// Spectral energy fraction above the two-thirds cutoff (worst of `u`, `v`).
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: WaveState,
    pub energy: EnergyReading,
    pub monitors: MonitorState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub dt: f64,
    pub n_steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.state.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy.value).collect()
    }

    pub fn final_state(&self) -> &WaveState {
        &self.samples.last().expect("trajectory has at least one sample").state
    }

    pub fn min_margin(&self) -> f64 {
        self.samples.iter().map(|s| s.monitors.min_margin).fold(f64::INFINITY, f64::min)
    }
}

fn boundary_ratio(u: &SpectralField) -> f64 {
    let peak = u.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    u.values()[0].abs() / peak
}

impl Simulation {
    fn monitor(&self, state: &WaveState, w: &SpectralField) -> Result<MonitorState, DynamicsError> {
        let t = state.t;
        let c1 = self.bounds().c1;
        let min_margin = c1 + w.min();
        let max_margin = c1 + w.max();
        if !(min_margin >= self.hyperbolicity_floor()) {
            return Err(DynamicsError::HyperbolicityLost { t, margin: min_margin, floor: self.hyperbolicity_floor() });
        }
        let ratio = boundary_ratio(&state.u);
        if let Some(tolerance) = self.config().boundary_tolerance {
            if ratio > tolerance {
                return Err(DynamicsError::BoundaryContamination { t, ratio, tolerance });
            }
        }
        let fraction = spectral::spectral_tail_fraction(&state.u).max(spectral::spectral_tail_fraction(&state.v));
        if let Some(tolerance) = self.config().tail_tolerance {
            if fraction > tolerance {
                return Err(DynamicsError::SpectralTailExceeded { t, fraction, tolerance });
            }
        }
        Ok(MonitorState { t, min_margin, max_margin, boundary_ratio: ratio, tail_fraction: fraction })
    }

    /// Monitor check plus energy at `state` with coefficient `w`.
    pub fn sample_state(&self, state: &WaveState, w: &SpectralField) -> Result<Sample, DynamicsError> {
        let monitors = self.monitor(state, w)?;
        let cfg = self.config();
        let value = energy_functional(&state.u, &state.v, w, &cfg.kernel, cfg.s_norm)?;
        Ok(Sample { state: state.clone(), energy: EnergyReading { t: state.t, value, s: cfg.s_norm }, monitors })
    }

    /// Steps `init` to `t_final`, checking monitors after every step and handing
    /// a [`Sample`] to `observer` at step 0, every `sample_every` steps and at
    /// the final step. `coefficient` gives the `w` used by the monitors and the
    /// energy.
    pub fn run_with<R, W>(
        &self,
        init: &WaveState,
        sample_every: usize,
        rhs: R,
        coefficient: W,
        observer: &mut dyn FnMut(&Sample),
    ) -> Result<MonitorState, DynamicsError>
    where
        R: Fn(&WaveState) -> Result<Tendency, DynamicsError>,
        W: Fn(&WaveState) -> SpectralField,
    {
        if sample_every == 0 {
            return Err(DynamicsError::InvalidConfig("sample_every must be >= 1".into()));
        }
        init.u.check_same_grid(&SpectralField::zeros(self.grid()))?;
        if !init.is_finite() {
            return Err(DynamicsError::NonFiniteValue { t: init.t });
        }
        let n = self.n_steps();
        let dt = self.dt();
        let t0 = init.t;
        let mut state = init.clone();
        let first = self.sample_state(&state, &coefficient(&state))?;
        let mut last = first.monitors;
        observer(&first);
        for step in 1..=n {
            state = step_rk4(&state, &rhs, dt)?;
            // pin the clock to the step grid so samples land on exact multiples of dt
            state.t = t0 + step as f64 * dt;
            let w = coefficient(&state);
            if step % sample_every == 0 || step == n {
                let s = self.sample_state(&state, &w)?;
                last = s.monitors;
                observer(&s);
            } else {
                last = self.monitor(&state, &w)?;
            }
        }
        Ok(last)
    }

    /// Nonlinear run, streaming samples to `observer`.
    pub fn integrate_observed(
        &self,
        init: &WaveState,
        sample_every: usize,
        observer: &mut dyn FnMut(&Sample),
    ) -> Result<MonitorState, DynamicsError> {
        let nl = &self.config().nonlinearity;
        self.run_with(init, sample_every, |s| self.rhs_nonlinear(s), |s| nl.apply_prime(&s.u), observer)
    }

    /// Nonlinear run to `t_final`.
    pub fn integrate(&self, init: &WaveState, sample_every: usize) -> Result<Trajectory, DynamicsError> {
        let mut samples = Vec::new();
        self.integrate_observed(init, sample_every, &mut |s| samples.push(s.clone()))?;
        Ok(Trajectory { samples, dt: self.dt(), n_steps: self.n_steps() })
    }

    /// Linear run with a coefficient `w(t)` given as a function of time.
    pub fn integrate_linear<W>(
        &self,
        init: &WaveState,
        sample_every: usize,
        w_at: W,
        extras: &LinearExtras,
    ) -> Result<Trajectory, DynamicsError>
    where
        W: Fn(f64) -> SpectralField,
    {
        let mut samples = Vec::new();
        self.run_with(
            init,
            sample_every,
            |s| self.rhs_linearized_with(s, &w_at(s.t), extras),
            |s| w_at(s.t),
            &mut |s| samples.push(s.clone()),
        )?;
        Ok(Trajectory { samples, dt: self.dt(), n_steps: self.n_steps() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Nonlinearity, SimConfig};
    use crate::kernels::KernelMeasure;
    use crate::spectral::PeriodicGrid;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_stays_zero() {
        let g = PeriodicGrid::new(PI, 32).unwrap();
        let sim = Simulation::new(SimConfig::new(g.clone(), KernelMeasure::example_measure(), 0.1)).unwrap();
        let z = WaveState::zero(&g);
        let next = step_rk4(&z, |s| sim.rhs_nonlinear(s), sim.dt()).unwrap();
        assert_eq!(next.u, z.u);
        let traj = sim.integrate(&z, 3).unwrap();
        assert!(traj.energies().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn sample_schedule() {
        let g = PeriodicGrid::new(PI, 32).unwrap();
        let cfg = SimConfig::new(g.clone(), KernelMeasure::identity(), 1.0).with_dt(0.1).periodic_data();
        let sim = Simulation::new(cfg).unwrap();
        let traj = sim.integrate(&WaveState::zero(&g), 3).unwrap();
        let steps: Vec<usize> = traj.times().iter().map(|t| (t / 0.1).round() as usize).collect();
        assert_eq!(steps, vec![0, 3, 6, 9, 10]);
        assert!(sim.integrate(&WaveState::zero(&g), 0).is_err());
    }

    #[test]
    fn standing_wave_oscillates_at_dispersion_frequency() {
        let g = PeriodicGrid::new(PI, 32).unwrap();
        let kernel = KernelMeasure::example_measure();
        let k = 3.0;
        let omega = kernel.dispersion(k).unwrap().sqrt();
        let cfg = SimConfig::new(g.clone(), kernel, 1.0)
            .with_nonlinearity(Nonlinearity::zero())
            .with_dt(1e-3)
            .periodic_data();
        let sim = Simulation::new(cfg).unwrap();
        let init = WaveState::new(SpectralField::from_fn(&g, |x| (k * x).cos()), SpectralField::zeros(&g), 0.0).unwrap();
        let traj = sim.integrate(&init, 250).unwrap();
        for s in &traj.samples {
            let exact = SpectralField::from_fn(&g, |x| (k * x).cos() * (omega * s.state.t).cos());
            assert!(s.state.u.sub(&exact).unwrap().max_abs() < 1e-10);
        }
    }

    #[test]
    fn aborts_on_boundary_contamination() {
        let g = PeriodicGrid::new(PI, 32).unwrap();
        let cfg = SimConfig::new(g.clone(), KernelMeasure::identity(), 0.1);
        let sim = Simulation::new(cfg).unwrap();
        let init = WaveState::new(SpectralField::from_fn(&g, |x| 0.01 * x.cos()), SpectralField::zeros(&g), 0.0).unwrap();
        let err = sim.integrate(&init, 1).unwrap_err();
        assert!(matches!(err, DynamicsError::BoundaryContamination { .. }));
        assert!(err.is_monitor_abort());
    }
}
