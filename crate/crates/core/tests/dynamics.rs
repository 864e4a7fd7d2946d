use std::f64::consts::PI;

use num_complex::Complex64;

use nlwave::diagnostics::frozen_growth_rate;
use nlwave::dynamics::{
    make_initial, step_rk4, DynamicsError, LinearExtras, Nonlinearity, Profile, SimConfig, Simulation,
    VelocityChoice, WaveState,
};
use nlwave::kernels::KernelMeasure;
use nlwave::random::{band_limited, rng};
use nlwave::spectral::{self, PeriodicGrid, SobolevOrder, SpectralField};

fn plane_wave_error(dt: f64) -> f64 {
    let grid = PeriodicGrid::new(PI, 64).unwrap();
    let k = 4.0;
    let cfg = SimConfig::new(grid.clone(), KernelMeasure::identity(), 1.0)
        .with_nonlinearity(Nonlinearity::zero())
        .with_dt(dt)
        .periodic_data();
    let sim = Simulation::new(cfg).unwrap();
    let init = WaveState::new(SpectralField::from_fn(&grid, |x| (k * x).cos()), SpectralField::zeros(&grid), 0.0).unwrap();
    let end = sim.integrate(&init, sim.n_steps()).unwrap();
    let exact = SpectralField::from_fn(&grid, |x| (k * x).cos() * k.cos());
    end.final_state().u.sub(&exact).unwrap().max_abs()
}

#[test]
fn rk4_is_fourth_order() {
    let ratio = plane_wave_error(0.02) / plane_wave_error(0.01);
    assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn unit_speed_translation_for_local_linear_system() {
    let grid = PeriodicGrid::new(20.0, 512).unwrap();
    let cfg = SimConfig::new(grid.clone(), KernelMeasure::identity(), 2.0)
        .with_nonlinearity(Nonlinearity::zero())
        .with_dt(1e-2);
    let sim = Simulation::new(cfg).unwrap();
    let profile = Profile::Gaussian { amp: 0.05, width: 1.0 };
    let init = make_initial(profile, &grid, VelocityChoice::RiemannLeftMover).unwrap();
    let end = sim.integrate(&init, 1000).unwrap();
    let exact = SpectralField::from_fn(&grid, |x| profile.value(x + 2.0));
    assert!(end.final_state().u.sub(&exact).unwrap().max_abs() < 1e-9);
}

#[test]
fn cfl_violation_blows_up() {
    let grid = PeriodicGrid::new(PI, 64).unwrap();
    let cfg = SimConfig::new(grid.clone(), KernelMeasure::identity(), 1.0)
        .with_nonlinearity(Nonlinearity::zero())
        .periodic_data();
    let sim = Simulation::new(cfg).unwrap();
    let mut state = WaveState::new(band_limited(&grid, 31, 0.0, &mut rng(1)), SpectralField::zeros(&grid), 0.0).unwrap();
    let dt = 4.0 * grid.dx();
    let mut outcome = None;
    for _ in 0..2000 {
        match step_rk4(&state, |s| sim.rhs_nonlinear(s), dt) {
            Ok(next) => state = next,
            Err(e) => {
                outcome = Some(e);
                break;
            }
        }
    }
    assert!(matches!(outcome, Some(DynamicsError::NonFiniteValue { .. })), "{outcome:?}");
}

#[test]
fn oversized_step_is_rejected_before_stepping() {
    let grid = PeriodicGrid::new(PI, 64).unwrap();
    let cfg = SimConfig::new(grid.clone(), KernelMeasure::identity(), 1.0).with_dt(2.0 * grid.dx());
    assert!(matches!(Simulation::new(cfg), Err(DynamicsError::CflViolated { .. })));
}

#[test]
fn desk_regime_smoke_run() {
    let grid = PeriodicGrid::new(40.0, 1024).unwrap();
    let sim = Simulation::new(SimConfig::new(grid.clone(), KernelMeasure::example_measure(), 1.0)).unwrap();
    let init = make_initial(Profile::Gaussian { amp: 0.05, width: 2.0 }, &grid, VelocityChoice::Zero).unwrap();
    let traj = sim.integrate(&init, 5).unwrap();
    assert!(traj.min_margin() >= sim.hyperbolicity_floor());
    assert!((traj.final_state().t - 1.0).abs() < 1e-12);
    assert!(traj.samples.iter().all(|s| s.monitors.boundary_ratio < 1e-8 && s.monitors.tail_fraction < 1e-10));
}

#[test]
fn nonlinear_flow_is_reversible() {
    let grid = PeriodicGrid::new(40.0, 512).unwrap();
    let sim = Simulation::new(SimConfig::new(grid.clone(), KernelMeasure::example_measure(), 1.0)).unwrap();
    let init = make_initial(Profile::Sech2 { amp: 0.05, width: 2.0 }, &grid, VelocityChoice::Zero).unwrap();
    let forward = sim.integrate(&init, sim.n_steps()).unwrap();
    let mut state = forward.final_state().clone();
    for _ in 0..sim.n_steps() {
        state = step_rk4(&state, |s| sim.rhs_nonlinear(s), -sim.dt()).unwrap();
    }
    let rel = state.u.sub(&init.u).unwrap().max_abs() / init.u.max_abs();
    assert!(rel < 1e-6, "relative return error {rel}");
}

#[test]
fn frozen_growth_rate_is_grid_stable() {
    let coarse = frozen_growth_rate(64, 0.1, 1e-3, 1.0, 42).unwrap();
    let fine = frozen_growth_rate(128, 0.1, 1e-3, 1.0, 42).unwrap();
    assert!(coarse.is_finite());
    assert!((fine / coarse - 1.0).abs() <= 0.2, "{coarse} vs {fine}");
}

#[test]
fn forced_growth_stays_below_gronwall_envelope() {
    // E(t) <= ||F||_{H^s} (e^{Ct} - 1) / (sqrt 2 C) from zero data
    let grid = PeriodicGrid::new(PI, 64).unwrap();
    let cfg = SimConfig::new(grid.clone(), KernelMeasure::example_measure(), 1.0).with_dt(1e-3).periodic_data();
    let sim = Simulation::new(cfg).unwrap();
    let s = sim.config().s_norm;
    let w = SpectralField::from_fn(&grid, |x| 0.1 * x.cos());
    let forcing = band_limited(&grid, 6, 2.0, &mut rng(5));
    let homogeneous = (0..4)
        .map(|seed| frozen_growth_rate(64, 0.1, 1e-3, 1.0, seed).unwrap())
        .fold(0.0, f64::max);
    let c = homogeneous.max(1e-3);
    let extras = LinearExtras { forcing: Some(forcing.clone()), mollifier: None };
    let traj = sim.integrate_linear(&WaveState::zero(&grid), 20, |_| w.clone(), &extras).unwrap();
    let f_norm = spectral::sobolev_norm(&forcing, s);
    for sample in traj.samples.iter().skip(1) {
        let t = sample.state.t;
        let bound = f_norm * (c * t).exp_m1() / (2f64.sqrt() * c);
        assert!(sample.energy.value <= 1.1 * bound, "t = {t}: {} > {bound}", sample.energy.value);
    }
}

/// Centroid of `|a|^2`, where `a` is the analytic signal of `u` (negative
/// frequencies dropped, positive ones doubled), built with a direct inverse DFT.
fn packet_centroid(u: &SpectralField) -> f64 {
    let grid = u.grid();
    let n = grid.len();
    let half: Vec<(usize, Complex64)> = u
        .coefficients()
        .iter()
        .enumerate()
        .filter_map(|(k, c)| match grid.wavenumber(k) {
            m if m > 0 => Some((k, c * 2.0)),
            0 => Some((k, *c)),
            _ => None,
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..n {
        let a: Complex64 = half
            .iter()
            .map(|&(k, c)| c * Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / n as f64))
            .sum();
        let e = a.norm_sqr();
        num += grid.x(j) * e;
        den += e;
    }
    num / den
}

#[test]
fn packet_moves_at_group_speed() {
    let kernel = KernelMeasure::example_measure();
    let k0 = 1.0;
    let h = 1e-5;
    let omega = |xi: f64| (xi * xi * (3.0 + 2.0 * xi.cos()) / 5.0).sqrt();
    let group = (omega(k0 + h) - omega(k0 - h)) / (2.0 * h);

    let grid = PeriodicGrid::new(120.0, 1024).unwrap();
    let t_final = 20.0;
    let cfg = SimConfig::new(grid.clone(), kernel.clone(), t_final).with_nonlinearity(Nonlinearity::zero());
    let sim = Simulation::new(cfg).unwrap();
    let init = make_initial(Profile::Packet { amp: 0.01, width: 8.0, carrier: k0 }, &grid, VelocityChoice::Zero).unwrap();
    // right-going branch: v_hat = -sqrt(mu_hat) u_hat
    let v = spectral::apply_multiplier(&init.u, |xi| -kernel.symbol(xi).sqrt());
    let init = WaveState::new(init.u, v, 0.0).unwrap();
    let end = sim.integrate(&init, sim.n_steps()).unwrap();
    let speed = (packet_centroid(&end.final_state().u) - packet_centroid(&init.u)) / t_final;
    assert!((speed - group).abs() < 1e-2 * group, "measured {speed}, expected {group}");
}

#[test]
fn energy_matches_l2_for_delta_kernel_at_s0() {
    let grid = PeriodicGrid::new(PI, 32).unwrap();
    let mut r = rng(3);
    let u = band_limited(&grid, 10, 1.0, &mut r);
    let v = band_limited(&grid, 10, 1.0, &mut r);
    let z = SpectralField::zeros(&grid);
    let e = nlwave::dynamics::energy_functional(&u, &v, &z, &KernelMeasure::identity(), SobolevOrder::new(0.0).unwrap())
        .unwrap();
    let l2 = (u.l2_norm().powi(2) + v.l2_norm().powi(2)) / 2.0;
    assert!((e - l2.sqrt()).abs() < 1e-13);
}
