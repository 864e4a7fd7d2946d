use proptest::prelude::*;

use nlwave::dynamics::Nonlinearity;
use nlwave::kernels::{perturb_identity, ContinuousDensity, DiracAtom, KernelMeasure};
use nlwave::random::{band_limited, rng};
use nlwave::spectral::{self, PeriodicGrid, SobolevOrder};

fn density() -> impl Strategy<Value = ContinuousDensity> {
    (0usize..3, 0.05f64..3.0, 0.01f64..1.0).prop_map(|(k, l, w)| match k {
        0 => ContinuousDensity::new(nlwave::DensityKind::Exponential { scale: l }, w).unwrap(),
        1 => ContinuousDensity::triangular(l, w),
        _ => ContinuousDensity::gaussian(l, w),
    })
}

fn measure() -> impl Strategy<Value = KernelMeasure> {
    (
        prop::collection::vec((0.0f64..3.0, 0.01f64..1.0), 1..4),
        prop::collection::vec(density(), 0..3),
    )
        .prop_map(|(atoms, dens)| {
            let atoms = atoms.into_iter().map(|(a, w)| DiracAtom::new(a, w).unwrap()).collect();
            KernelMeasure::new(atoms, dens).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_is_even(mu in measure(), xi in -50.0f64..50.0) {
        prop_assert_eq!(mu.symbol(xi), mu.symbol(-xi));
    }

    #[test]
    fn mass_is_symbol_at_zero(mu in measure()) {
        prop_assert!((mu.total_mass() - mu.symbol(0.0)).abs() <= 1e-14 * mu.total_mass());
    }

    #[test]
    fn scaling_rescales_frequency(mu in measure(), eps in 1e-4f64..4.0, xi in 0.0f64..30.0) {
        let scaled = mu.scale(eps).unwrap();
        let a = scaled.symbol(xi);
        let b = mu.symbol(eps.sqrt() * xi);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn perturbation_is_affine_in_eps(beta in density(), eps in 0.0f64..2.0, xi in 0.0f64..20.0) {
        let k = perturb_identity(beta, eps).unwrap();
        prop_assert!((k.symbol(xi) - (1.0 + eps * beta.symbol(xi))).abs() < 1e-14 * (1.0 + eps));
    }

    #[test]
    fn sobolev_norms_are_ordered(seed in any::<u64>(), s in 0.0f64..4.0, extra in 0.0f64..2.0) {
        let grid = PeriodicGrid::new(5.0, 64).unwrap();
        let u = band_limited(&grid, 20, 1.0, &mut rng(seed));
        let lo = spectral::sobolev_norm(&u, SobolevOrder::new(s).unwrap());
        let hi = spectral::sobolev_norm(&u, SobolevOrder::new(s + extra).unwrap());
        prop_assert!(lo <= hi * (1.0 + 1e-14));
    }

    #[test]
    fn multipliers_compose(seed in any::<u64>(), a in 0.1f64..3.0, b in -2.0f64..2.0) {
        let grid = PeriodicGrid::new(3.0, 64).unwrap();
        let u = band_limited(&grid, 20, 1.0, &mut rng(seed));
        let m1 = |xi: f64| 1.0 / (1.0 + a * xi * xi);
        let m2 = |xi: f64| (b * xi).cos();
        let twice = spectral::apply_multiplier(&spectral::apply_multiplier(&u, m1), m2);
        let once = spectral::apply_multiplier(&u, |xi| m1(xi) * m2(xi));
        prop_assert!(twice.sub(&once).unwrap().max_abs() < 1e-13 * (1.0 + u.max_abs()));
    }

    #[test]
    fn kernel_operator_is_self_adjoint(mu in measure(), seed in any::<u64>()) {
        let grid = PeriodicGrid::new(4.0, 64).unwrap();
        let mut r = rng(seed);
        let f = band_limited(&grid, 20, 1.0, &mut r);
        let g = band_limited(&grid, 20, 1.0, &mut r);
        let left = spectral::apply_kernel(&mu, &f).inner(&g).unwrap();
        let right = f.inner(&spectral::apply_kernel(&mu, &g)).unwrap();
        prop_assert!((left - right).abs() < 1e-12 * (1.0 + left.abs()));
    }

    #[test]
    fn dealias_is_idempotent(seed in any::<u64>()) {
        let grid = PeriodicGrid::new(2.0, 48).unwrap();
        let u = band_limited(&grid, 23, 0.0, &mut rng(seed));
        let once = spectral::dealias(&u);
        let twice = spectral::dealias(&once);
        prop_assert!(once.sub(&twice).unwrap().max_abs() < 1e-14);
        prop_assert!(spectral::spectral_tail_fraction(&once) < 1e-28);
    }

    #[test]
    fn nonlinearity_vanishes_to_second_order(coeffs in prop::collection::vec(-3.0f64..3.0, 0..5), u in -1.0f64..1.0) {
        let g = Nonlinearity::new(coeffs).unwrap();
        prop_assert_eq!(g.g(0.0), 0.0);
        prop_assert_eq!(g.g_prime(0.0), 0.0);
        let h = 1e-6;
        let fd = (g.g(u + h) - g.g(u - h)) / (2.0 * h);
        prop_assert!((fd - g.g_prime(u)).abs() < 1e-7);
    }
}
