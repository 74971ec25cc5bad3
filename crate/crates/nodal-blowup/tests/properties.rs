//! Property tests of the module invariants.

use nodal_blowup::bubble::{bubble_eval, bubble_gradient, bubble_pde_residual, central_gradient, kernel_relation_residual, BubbleParams};
use nodal_blowup::cli::{parse_range, Tolerances};
use nodal_blowup::curvature::{sample_points, MetricField};
use nodal_blowup::energy::{energy_oracle_config, f_assembled, profile_t, quartic_model, quartic_model_gradient, ModelData};
use nodal_blowup::exact::{self, radial_integral_exact, HalfInt};
use nodal_blowup::oracle::{integrate_rn, integrate_sphere_mc, integrate_sphere_poly, Integrand, OracleConfig};
use nodal_blowup::regimes::{classify, cross_product, BalanceCoefficients};
use nodal_blowup::saddle::{minimize_profile_coeffs, Profile};
use nodal_blowup::weyl::{default_diagonal_weyl, WeylForm};
use num::{BigInt, BigRational, One};
use proptest::prelude::*;
use proptest::test_runner::Config;

fn half(x: HalfInt) -> BigRational {
    BigRational::new(BigInt::from(x.twice()), BigInt::from(2))
}

proptest! {
    #![proptest_config(Config { cases: 64, ..Config::default() })]

    #[test]
    fn radial_recursions_hold_exactly(n in 7usize..=25, i in -4i64..=4, j in -4i64..=4) {
        let (p0, q0) = exact::base_indices(n);
        let (p, q) = (p0.add_int(i), q0.add_int(j));
        prop_assume!(q.to_f64() >= 0.0 && p.to_f64() - q.to_f64() > 2.0);
        let ipq = radial_integral_exact(p, q).unwrap();
        let ip1q = radial_integral_exact(p.add_int(1), q).unwrap();
        let one = BigRational::one();
        prop_assert_eq!(ip1q.ratio_to(&ipq), Some((half(p) - half(q) - &one) / half(p)));
        let ip1q1 = radial_integral_exact(p.add_int(1), q.add_int(1)).unwrap();
        prop_assert_eq!(ip1q1.ratio_to(&ip1q), Some((half(q) + &one) / (half(p) - half(q) - &one)));
    }

    #[test]
    fn radial_integral_matches_beta_function(n in 7usize..=25, i in 0i64..=3, j in -2i64..=2) {
        let (p0, q0) = exact::base_indices(n);
        let (p, q) = (p0.add_int(i), q0.add_int(j));
        prop_assume!(q.to_f64() >= 0.0 && p.to_f64() - q.to_f64() > 1.0);
        let v = radial_integral_exact(p, q).unwrap().to_f64();
        let (a, b) = (q.to_f64() + 1.0, p.to_f64() - q.to_f64() - 1.0);
        let beta = (statrs::function::gamma::ln_gamma(a) + statrs::function::gamma::ln_gamma(b) - statrs::function::gamma::ln_gamma(a + b)).exp();
        prop_assert!(((v - beta) / beta).abs() < 1e-12, "{v} vs {beta}");
    }

    #[test]
    fn random_weyl_forms_are_valid(n in 4usize..=9, seed in any::<u64>()) {
        let w = WeylForm::random(n, seed).unwrap();
        let r = w.validate();
        let scale = w.norm_sq().sqrt().max(1.0);
        prop_assert!(r.max_residual() <= 1e-12 * scale, "{r:?}");
        prop_assert!(r.accepted);
    }

    #[test]
    fn deformation_is_even_and_radially_annihilated(n in 4usize..=9, seed in any::<u64>(), x in prop::collection::vec(-2.0f64..2.0, 9)) {
        let w = WeylForm::random(n, seed).unwrap();
        let x = &x[..n];
        let field = w.deformation();
        let minus: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert_eq!(field.eval(x), field.eval(&minus));
        let (trace, div, radial) = field.constraint_residuals(x);
        let scale = w.norm_sq().sqrt().max(1.0) * x.iter().map(|v| v * v).sum::<f64>().max(1.0);
        prop_assert!(trace <= 1e-12 * scale && div <= 1e-12 * scale && radial <= 1e-12 * scale);
    }

    #[test]
    fn bubble_solves_its_equation(n in 11usize..=14, t in 0.3f64..3.0, zr in 0.0f64..0.9, x in prop::collection::vec(-3.0f64..3.0, 14)) {
        let mut z = vec![0.0; n];
        z[0] = zr;
        let p = BubbleParams::new(n, t, z).unwrap();
        prop_assert!(bubble_pde_residual(&p, &x[..n]) <= 1e-10);
    }

    #[test]
    fn balance_without_weyl_is_positive(n in 7usize..=30, log_mu in -6.0f64..6.0, u0 in 1e-3f64..10.0) {
        let c = BalanceCoefficients::new(n).unwrap();
        prop_assert!(c.eval(u0, 0.0, 10f64.powf(log_mu)) > 0.0);
    }

    #[test]
    fn profile_minimum_is_critical(n in 11usize..=40, c4 in 0.1f64..10.0, cl in 0.1f64..10.0) {
        let p = Profile::new(n, c4, cl).unwrap();
        let m = minimize_profile_coeffs(&p);
        prop_assert!(m.t0 > 0.0 && m.f_at_min < 0.0 && m.hess_t > 0.0);
        let scale = 4.0 * c4 * m.t0.powi(3);
        prop_assert!(p.dt(m.t0).abs() <= 1e-12 * scale);
        prop_assert!(m.identity_residual <= 1e-10);
    }

    #[test]
    fn parse_range_endpoints(a in -5.0f64..5.0, b in -5.0f64..5.0, k in 2usize..50) {
        let v = parse_range(&format!("{a}:{b}:{k}")).unwrap();
        prop_assert_eq!(v.len(), k);
        prop_assert_eq!(v[0], a);
        prop_assert!((v[k - 1] - b).abs() <= 1e-12 * b.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(Config { cases: 16, ..Config::default() })]

    #[test]
    fn quartic_model_is_homogeneous_of_degree_four(seed in any::<u64>(), s in 0.1f64..3.0, z in prop::collection::vec(-0.3f64..0.3, 11)) {
        let model = ModelData::new(WeylForm::random(11, seed).unwrap(), 1.0).unwrap();
        let q = quartic_model(&model, &z);
        let zs: Vec<f64> = z.iter().map(|v| s * v).collect();
        let qs = quartic_model(&model, &zs);
        prop_assert!((qs - s.powi(4) * q).abs() <= 1e-12 * qs.abs().max(q.abs()).max(1e-300));
        let g = quartic_model_gradient(&model, &z);
        let fd = central_gradient(&|y| quartic_model(&model, y), &z, 1e-5);
        let gmax = g.iter().fold(0f64, |a, v| a.max(v.abs()));
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-6 * gmax.max(1e-12));
        }
    }

    #[test]
    fn metric_has_unit_determinant_near_centre(seed in any::<u64>(), eps in 1e-3f64..0.2) {
        let m = MetricField::centered(WeylForm::random(6, seed).unwrap(), eps).unwrap();
        for x in sample_points(&m, 20, 0.0, 1.0, seed) {
            let g = m.metric(&x);
            prop_assert!((g.determinant() - 1.0).abs() <= 1e-12, "det {}", g.determinant());
        }
    }

    #[test]
    fn bubble_gradient_differences_converge_at_second_order(n in 11usize..=14, t in 0.5f64..2.0, x in prop::collection::vec(0.2f64..1.5, 14)) {
        let p = BubbleParams::new(n, t, vec![0.0; n]).unwrap();
        let x = &x[..n];
        let g = bubble_gradient(&p, x);
        let err = |h: f64| {
            let fd = central_gradient(&|y| bubble_eval(&p, y), x, h);
            g.iter().zip(&fd).fold(0f64, |a, (u, v)| a.max((u - v).abs()))
        };
        let (e1, e2) = (err(2e-2), err(1e-2));
        prop_assume!(e2 > 1e-11);
        let ratio = e1 / e2;
        prop_assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn kernel_relations_converge_at_second_order(n in 11usize..=14, t in 0.5f64..2.0, j in 0usize..=11, x in prop::collection::vec(0.2f64..1.5, 14)) {
        let p = BubbleParams::new(n, t, vec![0.0; n]).unwrap();
        let x = &x[..n];
        let (e1, e2) = (kernel_relation_residual(j, &p, x, 2e-2).unwrap(), kernel_relation_residual(j, &p, x, 1e-2).unwrap());
        prop_assume!(e2 > 1e-11);
        let ratio = e1 / e2;
        prop_assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn fourth_order_numerator_changes_sign_between_nine_and_ten() {
    for n in 10i64..=64 {
        assert!(n * n - 8 * n - 12 > 0, "n = {n}");
    }
    for n in 3i64..=9 {
        assert!(n * n - 8 * n - 12 < 0, "n = {n}");
    }
}

#[test]
fn profile_matches_quadrature_at_random_scales() {
    use rand::{Rng, SeedableRng};
    let n = 11;
    let model = ModelData::new(default_diagonal_weyl(n).unwrap(), 1.0).unwrap();
    let cfg = energy_oracle_config(n, 17);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let t = rng.random_range(0.5..2.0);
        let q = f_assembled(&model, t, &vec![0.0; n], &cfg).unwrap();
        let closed = profile_t(&model, t).unwrap();
        assert!(q.f1.z_score(0.0) <= 3.0, "F1 vanishes at z = 0: {:?}", q.f1);
        assert!((q.value - closed).abs() <= 3.0 * q.standard_error.max(1e-12 * closed.abs()), "t = {t}");
    }
}

#[test]
fn assembled_energy_is_even_in_z() {
    let n = 11;
    let model = ModelData::new(WeylForm::random(n, 9).unwrap(), 1.0).unwrap();
    let cfg = energy_oracle_config(n, 5);
    for k in 0..3 {
        let z: Vec<f64> = (0..n).map(|i| 0.05 * ((i * 7 + k * 3) % 5) as f64 - 0.1).collect();
        let minus: Vec<f64> = z.iter().map(|v| -v).collect();
        let a = f_assembled(&model, 0.9, &z, &cfg).unwrap();
        let b = f_assembled(&model, 0.9, &minus, &cfg).unwrap();
        assert!((a.value - b.value).abs() <= 3.0 * (a.standard_error + b.standard_error), "{} vs {}", a.value, b.value);
    }
}

#[test]
fn exact_constants_match_quadrature() {
    for n in [7usize, 10, 11, 14] {
        let nf = n as f64;
        let m = nf * (nf - 2.0);
        let cfg = OracleConfig::default().with_budget(2000).with_seed(n as u64);
        let mass = Integrand::new(n, 2.0 * nf, move |x: &[f64]| (1.0 + x.iter().map(|v| v * v).sum::<f64>() / m).powf(-nf)).unwrap();
        let q = integrate_rn(&mass, &cfg).unwrap();
        assert!(q.z_score(exact::sobolev_mass(n).unwrap().to_f64()) <= 3.0, "mass n = {n}");
        let lam = Integrand::new(n, nf + 2.0, move |x: &[f64]| (1.0 + x.iter().map(|v| v * v).sum::<f64>() / m).powf(-(nf + 2.0) / 2.0)).unwrap();
        let q = integrate_rn(&lam, &cfg).unwrap();
        assert!(q.z_score(exact::lambda_constant(n).unwrap().to_f64()) <= 3.0, "lambda n = {n}");
    }
}

#[test]
fn oracle_is_deterministic_across_thread_counts() {
    let n = 9;
    let f = Integrand::new(n, 2.0 * n as f64, |x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (1.0 + x[0] * x[1] + 0.3 * x[2]).abs() * (1.0 + r2).powf(-(n as f64))
    })
    .unwrap();
    let cfg = OracleConfig::default().with_budget(4000).with_seed(42);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| integrate_rn(&f, &cfg).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());
    assert_eq!(a, b);
}

#[test]
fn oracle_error_bars_are_calibrated() {
    // ∫ e^{-|x|²} (1 + |x_1|) over ℝ^6 = π³ + π^{5/2}; |x_1| keeps the
    // angular part non-polynomial so the sampling error is real
    let n = 6;
    let pi = std::f64::consts::PI;
    let exact = pi.powi(3) + pi.powf(2.5);
    let f = Integrand::new(n, 100.0, |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp() * (1.0 + x[0].abs())).unwrap();
    let mut misses = 0;
    for seed in 0..50u64 {
        let cfg = OracleConfig::default().with_budget(1000).with_seed(seed);
        let r = integrate_rn(&f, &cfg).unwrap();
        if r.z_score(exact) > 3.0 {
            misses += 1;
        }
    }
    assert!(misses <= 2, "{misses} of 50 runs outside 3 standard errors");
}

#[test]
fn sphere_moments_agree_with_monte_carlo() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let n = rng.random_range(3..8usize);
        let mut alpha = vec![0u32; n];
        let degree = rng.random_range(0..=3u32) * 2;
        for _ in 0..degree {
            alpha[rng.random_range(0..n)] += 1;
        }
        let exact = integrate_sphere_poly(&alpha).to_f64();
        let a = alpha.clone();
        let f = move |x: &[f64]| x.iter().zip(&a).map(|(v, &e)| v.powi(e as i32)).product::<f64>();
        let mc = integrate_sphere_mc(n, &f, 200_000, k).unwrap();
        let tol = 4.0 * mc.standard_error + 1e-12;
        assert!((mc.value - exact).abs() <= tol, "alpha {alpha:?}: {} vs {exact}", mc.value);
    }
}

#[test]
fn classify_is_total_and_deterministic() {
    for spec in cross_product(3..=40) {
        let a = classify(&spec);
        let b = classify(&spec);
        match (a, b) {
            (Ok(x), Ok(y)) => assert_eq!(x, y),
            (Err(_), Err(_)) => assert!(spec.lcf && spec.weyl_everywhere_nonzero),
            _ => panic!("nondeterministic on {spec:?}"),
        }
    }
}

#[test]
fn tolerance_overrides_round_trip() {
    let mut t = Tolerances::default();
    t.apply_override("ratio_band=0.25").unwrap();
    assert_eq!(t.ratio_band, 0.25);
    assert!(t.apply_override("ratio_band=-1").is_err());
    assert!(t.apply_override("ratio_band").is_err());
    assert!(t.apply_override("nonsense=1").is_err());
}
