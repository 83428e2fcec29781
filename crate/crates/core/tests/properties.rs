use kreinlab::extension_engine::krein_apply_fiber;
use kreinlab::fiber_model::poisson_fiber_normsq;
use kreinlab::spectral_asymptotics::{svalues_vs_dirichlet, weyl_fit};
use kreinlab::{Complex64, Discretization1D, Geometry, GridFunction, ModelOperator, Realization};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn krein_solution_meets_the_robin_condition(
        b in -0.5f64..8.0,
        re in -30.0f64..-0.5,
        im in -10.0f64..10.0,
        k in -40i64..=40,
        slab in any::<bool>(),
    ) {
        let geom = if slab { Geometry::slab(2, 1.0).unwrap() } else { Geometry::half_cylinder(2).unwrap() };
        let op = ModelOperator::new(1.0).unwrap();
        let mode = op.mode(vec![k]);
        let lambda = Complex64::new(re, im);
        let disc = Discretization1D::for_fiber(&geom, &mode, lambda, 400).unwrap();
        let f = GridFunction::sample(disc, |x| Complex64::new(1.0 + x, -x * x));
        let u = krein_apply_fiber(&Realization::robin(b), lambda, &mode, &f, &geom).unwrap();
        let scale = u.nu1.norm().max(u.gamma0.norm()).max(1e-300);
        prop_assert!((u.nu1 - b * u.gamma0).norm() / scale < 1e-10);
    }

    #[test]
    fn series_entries_recompute_from_their_modes(b in 0.0f64..5.0, lambda in -20.0f64..0.0) {
        let geom = Geometry::slab(2, 1.0).unwrap();
        let op = ModelOperator::new(1.0).unwrap();
        let s = svalues_vs_dirichlet(&Realization::robin(b), lambda, 40.0, &geom, &op).unwrap();
        prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        for (xi, v) in s.modes.iter().zip(&s.values) {
            let m = op.mode(xi.clone());
            let k = m.kappa(Complex64::new(lambda, 0.0)).re;
            let l = b + k / k.tanh();
            prop_assert!((poisson_fiber_normsq(&m, lambda, &geom).unwrap() / l - v).abs() <= 1e-13 * v);
        }
    }

    #[test]
    fn fit_recovers_power_laws(p in 0.5f64..4.0, c in 0.1f64..100.0) {
        let s: Vec<f64> = (1..=400).map(|j| c * (j as f64).powf(-p)).collect();
        let fit = weyl_fit(&s, Some(p)).unwrap();
        prop_assert!((fit.exponent + p).abs() < 1e-9);
        prop_assert!((fit.constant / c - 1.0).abs() < 1e-8);
        prop_assert!(fit.residual < 1e-8);
    }
}
