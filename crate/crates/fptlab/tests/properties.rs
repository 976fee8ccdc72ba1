//! Property tests over the domain types and estimators.

use proptest::prelude::*;

use fptlab::asymptotics::hazard_bracket;
use fptlab::boundary::Boundary;
use fptlab::covariance::Covariance;
use fptlab::fpt::{estimate_density, EstimateKind};
use fptlab::runner::ExperimentConfig;
use fptlab::simulate::PathGrid;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations; good enough
/// for the small grids tested here.
#[allow(clippy::needless_range_loop)]
fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

fn arb_model() -> impl Strategy<Value = Covariance> {
    (1e-6f64..4.0, 0.05f64..4.0, proptest::bool::ANY).prop_map(|(a, b, osc)| {
        if osc {
            // The oscillatory family is only a covariance for alpha <= beta.
            Covariance::damped_oscillatory(a.min(b), a.max(b)).unwrap()
        } else {
            Covariance::exp_cosine(a, b).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_grids_are_positive_semidefinite(
        model in arb_model(),
        dt in 0.01f64..0.8,
        n in 2usize..64,
    ) {
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| model.eval((i as f64 - j as f64) * dt)).collect())
            .collect();
        let eigs = symmetric_eigenvalues(a);
        let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
        let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
        prop_assert!(min >= -1e-8 * max, "min eig {min}, max {max}");
    }

    #[test]
    fn covariance_is_even_and_bounded(model in arb_model(), t in -50.0f64..50.0) {
        let v = model.eval(t);
        prop_assert!(v.abs() <= 1.0 + 1e-12);
        prop_assert!((v - model.eval(-t)).abs() < 1e-15);
    }

    #[test]
    fn spectral_density_even_and_positive(
        alpha in 1e-6f64..4.0,
        beta in 0.05f64..4.0,
        omega in -100.0f64..100.0,
    ) {
        let model = Covariance::exp_cosine(alpha, beta).unwrap();
        let v = model.spectral_density(omega).unwrap();
        prop_assert!(v > 0.0);
        prop_assert!((v - model.spectral_density(-omega).unwrap()).abs() <= 1e-12 * v);
    }

    #[test]
    fn markov_covariance_factorizes(a in 0.0f64..20.0, b in 0.0f64..20.0) {
        // alpha ~ 0: gamma(a + b) = gamma(a) gamma(b) for nonnegative lags.
        let model = Covariance::exp_cosine(1e-10, 0.5).unwrap();
        let lhs = model.eval(a + b);
        let rhs = model.eval(a) * model.eval(b);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn hazard_bracket_never_negative(rho_dot in -1e3f64..1e3, s2 in 0.05f64..10.0) {
        prop_assert!(hazard_bracket(rho_dot, s2) >= 0.0);
    }

    #[test]
    fn boundaries_finite_with_derivatives(t in 0.0f64..100.0) {
        let all = [
            Boundary::constant(2.0),
            Boundary::periodic(2.0, 0.1, 3.0).unwrap(),
            Boundary::daniels_ou(0.25, 0.5).unwrap(),
            Boundary::polynomial(vec![5.0, -1.0, -0.5]).unwrap(),
        ];
        for b in &all {
            let (s, sp) = b.eval(t);
            prop_assert!(s.is_finite() && sp.is_finite());
        }
    }

    #[test]
    fn mass_accounting_holds_for_any_crossing_set(
        times in proptest::collection::vec(proptest::option::of(0.0f64..10.0), 1..400),
        bin_width in 0.05f64..1.0,
    ) {
        let grid = PathGrid::covering(0.05, 10.0).unwrap();
        let est = estimate_density(&times, &grid, bin_width.max(0.05), EstimateKind::Conditioned)
            .unwrap();
        let total: u64 = est.counts().iter().sum();
        prop_assert_eq!(total as usize + est.n_censored(), est.n_paths());
        prop_assert!((est.mass() + est.censored_fraction() - 1.0).abs() < 1e-12);
        prop_assert!(est.densities().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn config_round_trips(
        a in 1e-6f64..3.0,
        b in 0.05f64..3.0,
        dt in 0.001f64..0.1,
        n_paths in 1usize..1_000_000,
        seed in proptest::num::u64::ANY,
    ) {
        let cfg = ExperimentConfig {
            process: Covariance::damped_oscillatory(a.min(b), a.max(b)).unwrap(),
            boundary: Boundary::periodic(2.0, 0.1, 3.0).unwrap(),
            methods: vec![fptlab::runner::Method::Mc, fptlab::runner::Method::Asymptotic],
            dt,
            t_max: dt * 1000.0,
            h: dt / 10.0,
            n_paths,
            seed,
            epsilon: 0.2,
            bin_width: dt * 10.0,
            out_dir: std::path::PathBuf::from("out/prop"),
        };
        let parsed = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(cfg, parsed);
    }
}

#[test]
fn daniels_threshold_shape() {
    // The threshold starts at d, rises to a single hump (the image curve
    // grows toward 5d/3 faster than the OU decay bites), then decreases
    // monotonically; checked on a grid for d = 0.25, rate = 0.5.
    let b = Boundary::daniels_ou(0.25, 0.5).unwrap();
    assert_eq!(b.value(0.0), 0.25);
    let mut prev = b.value(0.5);
    for i in 1..=950 {
        let t = 0.5 + i as f64 * 0.01;
        let v = b.value(t);
        assert!(v < prev, "not decreasing at t = {t}: {v} >= {prev}");
        prev = v;
    }
    // The early hump exists and tops out above the start gap.
    let peak = (0..=50)
        .map(|i| b.value(i as f64 * 0.01))
        .fold(f64::MIN, f64::max);
    assert!(peak > 0.3, "expected an initial rise, peak {peak}");
}
