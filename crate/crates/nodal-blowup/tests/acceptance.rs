//! Acceptance battery, criteria 1 to 11.
//!
//! Every check prints one `PASS` or `FAIL` line. Three checks are known to
//! fail for reasons recorded in `BLOCKED`; for those the battery asserts the
//! evidence that explains the failure instead of the criterion itself, and it
//! refuses to go green if one of them starts passing without the list being
//! revisited.

use std::process::Command;
use std::time::Instant;

use num::rational::Ratio;
use serde_json::Value;

use nodal_blowup::bubble;
use nodal_blowup::curvature::{expansion_check, reference_point, MetricField, EXPANSION_STEP};
use nodal_blowup::energy::{self, energy_oracle_config, ModelData};
use nodal_blowup::exact;
use nodal_blowup::oracle::{self, brendle_moment_a, brendle_moment_a_mc, brendle_moment_b, brendle_moment_b_mc, Integrand, OracleConfig};
use nodal_blowup::regimes::{self, classify, GeometrySpec, PerturbationSign as P, ThresholdComparison as T, Verdict};
use nodal_blowup::saddle::{self, SaddleOptions, ZeroPerturbation};
use nodal_blowup::weyl::{self, default_diagonal_weyl, WeylForm};

const SEED: u64 = 20_240_611;
const N: usize = 11;

/// Checks expected to fail, keyed by a substring of the check name.
const BLOCKED: &[(&str, &str)] = &[
    (
        "quartic fit vs -(n^2-8n-12)/(48n(n+1))",
        "the F3 quartic coefficient integrates to -(n+4)/(16(n+1)), three times the stated value",
    ),
    (
        "scalar curvature remainder ratio",
        "the scalar remainder carries an eps^3 term, so halving eps divides it by 8, not 2",
    ),
    ("verify-all --dim 11 exits 0", "verify-all gates on the two checks above"),
];

struct Outcome {
    criterion: u8,
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Default)]
struct Battery {
    outcomes: Vec<Outcome>,
}

impl Battery {
    fn check(&mut self, criterion: u8, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        let o = Outcome { criterion, name: name.into(), passed, detail: detail.into() };
        println!("{} [{}] {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.criterion, o.name, o.detail);
        self.outcomes.push(o);
    }

    fn at_most(&mut self, criterion: u8, name: impl Into<String>, value: f64, tol: f64) {
        self.check(criterion, name, value <= tol, format!("{value:.3e} <= {tol:.1e}"));
    }

    fn within_band(&mut self, criterion: u8, name: impl Into<String>, ratio: f64, target: f64) {
        let dev = ((ratio - target) / target).abs();
        self.check(criterion, name, dev <= 0.5, format!("{ratio:.4} vs {target} (+-50%)"));
    }

    fn timed(&mut self, criterion: u8, budget: f64, start: Instant) {
        let s = start.elapsed().as_secs_f64();
        self.check(criterion, "time budget", s <= budget, format!("{s:.2} s <= {budget} s"));
    }
}

fn blocked_reason(name: &str) -> Option<&'static str> {
    BLOCKED.iter().find(|(k, _)| name.contains(k)).map(|(_, why)| *why)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn axis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn criterion_1(b: &mut Battery) {
    let start = Instant::now();
    let (mut relations, mut bad_relations, mut pairs, mut bad_pairs) = (0, 0, 0, 0);
    for n in 7..=25 {
        let ids = exact::radial_identities(n).unwrap();
        relations += ids.len();
        bad_relations += ids.iter().filter(|r| !r.holds).count();
        let (c, f) = exact::recursion_check(n, 3).unwrap();
        pairs += c;
        bad_pairs += f;
    }
    b.check(1, "six radial relations per n, n = 7..25", relations == 6 * 19 && bad_relations == 0, format!("{bad_relations} of {relations} fail"));
    b.check(1, "both index recursions, n = 7..25", pairs > 0 && bad_pairs == 0, format!("{bad_pairs} of {pairs} fail"));
    // frozen values
    let omega9 = exact::sphere_volume(10).unwrap();
    b.at_most(1, "|S^9| = pi^5/12", rel(omega9.to_f64(), std::f64::consts::PI.powi(5) / 12.0), 1e-15);
    b.timed(1, 1.0, start);
}

fn criterion_2(b: &mut Battery) {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    for n in [11, 12, 13] {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7 * n as u64);
        let (mut sym, mut trace, mut cons) = (0f64, 0f64, 0f64);
        for k in 0..20u64 {
            let w = WeylForm::random(n, 31 * n as u64 + k).unwrap();
            sym = sym.max(w.validate().max_residual());
            trace = trace.max(rel(weyl::contraction(&w).trace(), 3.0 * w.norm_sq()));
            let field = w.deformation();
            for _ in 0..100 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let (a, d, r) = field.constraint_residuals(&x);
                cons = cons.max(a).max(d).max(r);
            }
        }
        b.at_most(2, format!("n = {n}: symmetry residuals"), sym, 1e-12);
        b.at_most(2, format!("n = {n}: sum T_kk vs 3|W|^2"), trace, 1e-12);
        b.at_most(2, format!("n = {n}: trace, divergence and radial constraints"), cons, 1e-12);
    }
    b.timed(2, 10.0, start);
}

fn criterion_3(b: &mut Battery) {
    let start = Instant::now();
    let w = default_diagonal_weyl(N).unwrap();
    let samples = 1_000_000;
    let a = brendle_moment_a(&w, 0, 0);
    let a_mc = brendle_moment_a_mc(&w, 0, 0, samples, SEED).unwrap();
    let q = [0, 1, 0, 1];
    let bm = brendle_moment_b(&w, q[0], q[1], q[2], q[3]);
    let b_mc = brendle_moment_b_mc(&w, q, samples, SEED).unwrap();
    for (name, closed, mc) in [("A(1,1)", a.closed_form, a_mc), ("B(1,2,1,2)", bm.closed_form, b_mc)] {
        b.check(3, format!("{name} closed form is nonzero"), closed.abs() > 1e-12, format!("{closed:.6e}"));
        b.at_most(3, format!("{name} Monte Carlo, standard errors"), mc.z_score(closed), 3.0);
        b.at_most(3, format!("{name} Monte Carlo, relative"), rel(mc.value, closed), 1e-2);
    }
    b.timed(3, 30.0, start);
}

fn criterion_4(b: &mut Battery) {
    let start = Instant::now();
    let model = ModelData::new(default_diagonal_weyl(N).unwrap(), 1.0).unwrap();
    let audit = energy::hessian_z(&model, 1.0).unwrap();
    b.check(4, "F11 and F22 prefactors cancel in closed form", audit.rational_cancellation, format!("{}", audit.rational_cancellation));
    b.at_most(4, "|F11 + F22| / |F11|", audit.relative_residual, 1e-12);
    let cfg = energy_oracle_config(N, SEED);
    let p = energy::hessian_probe(&model, 1.0, &axis(N, 0), 0.05, &cfg).unwrap();
    b.at_most(4, "finite-difference d2F/ds2 along e_1 over noise floor", p.extrapolated.abs() / p.noise_floor, 1.0);
    b.timed(4, 60.0, start);
}

fn criterion_5(b: &mut Battery) {
    let start = Instant::now();
    let w = default_diagonal_weyl(N).unwrap();
    let rep = bubble::bubble_check(&w, 100, SEED, &OracleConfig::default().with_seed(SEED)).unwrap();
    b.at_most(5, "corrector residual at 100 points", rep.corrector_residual, 1e-9);
    b.at_most(5, "corrector pairing closed form vs oracle, standard errors", rep.pairing_oracle.z_score(rep.pairing_closed_form), 3.0);
    b.timed(5, 60.0, start);
}

/// Returns `(published, corrected)` relative errors of the fit, for the blocked evidence.
fn criterion_6(b: &mut Battery) -> (f64, f64) {
    let start = Instant::now();
    let mut bad = 0;
    for n in 7i64..=64 {
        let lhs = Ratio::new(1, 4 * n) - Ratio::new(n + 4, 48 * (n + 1));
        let rhs = Ratio::new(-(n * n - 8 * n - 12), 48 * n * (n + 1));
        let lib = energy::f1_factor(n as usize) + energy::f3_factor_published(n as usize);
        let lib_rhs = energy::fourth_order_factor_published(n as usize);
        let as_big = |r: Ratio<i64>| num::BigRational::new((*r.numer()).into(), (*r.denom()).into());
        if lhs != rhs || lib != as_big(lhs) || lib_rhs != as_big(rhs) {
            bad += 1;
        }
    }
    b.check(6, "1/(4n) - (n+4)/(48(n+1)) = -(n^2-8n-12)/(48n(n+1)), n = 7..64", bad == 0, format!("{bad} failures"));
    let model = ModelData::new(default_diagonal_weyl(N).unwrap(), 1.0).unwrap();
    let cfg = energy_oracle_config(N, SEED);
    let fit = energy::fit_quartic(&model, 1.0, &axis(N, 0), &[0.05, 0.1, 0.15, 0.2, 0.25], &cfg).unwrap();
    b.at_most(6, "n = 11 quartic fit vs -(n^2-8n-12)/(48n(n+1))", fit.relative_error_published, 1e-2);
    b.timed(6, 120.0, start);
    (fit.relative_error_published, fit.relative_error_corrected)
}

fn criterion_7(b: &mut Battery) {
    let start = Instant::now();
    let opts = SaddleOptions { seed: SEED, ..SaddleOptions::default() };
    for n in 11..=24 {
        let model = ModelData::new(default_diagonal_weyl(n).unwrap(), 1.0).unwrap();
        let c = model.coefficients();
        let a = (n as f64 - 2.0) / 2.0;
        // root of -4 c4 t^3 + a clambda t^(a-1)
        let t0 = (4.0 * c.c4 / (a * c.clambda)).powf(1.0 / (a - 4.0));
        let f0 = energy::profile_t(&model, t0).unwrap();
        let closed = -c.c4 * t0.powi(4) * (n as f64 - 10.0) / (n as f64 - 2.0);
        let ftt = energy::profile_dtt(&model, t0).unwrap();
        b.check(7, format!("n = {n}: t0 > 0, F(t0,0) < 0, d2F/dt2 > 0"), t0 > 0.0 && f0 < 0.0 && ftt > 0.0, format!("t0 = {t0:.6}"));
        b.at_most(7, format!("n = {n}: F(t0,0) vs -c4 t0^4 (n-10)/(n-2)"), rel(f0, closed), 1e-10);
        let min = saddle::minimize_profile(&model).unwrap();
        b.at_most(7, format!("n = {n}: library t0 matches"), rel(min.t0, t0), 1e-10);
        let cert = saddle::certify_with_shrink(&model, &opts).unwrap().certificate;
        b.check(7, format!("n = {n}: saddle certificate"), cert.passed, cert.failed_conditions().join(", "));
        let d = saddle::locate_critical_point(&model, &cert, &ZeroPerturbation).map_or(f64::INFINITY, |p| p.distance);
        b.at_most(7, format!("n = {n}: located critical point distance to (t0, 0)"), d, 1e-8);
        if n == 11 {
            b.at_most(7, "n = 11: t0 frozen value 0.741931", (t0 - 0.741931).abs(), 5e-7);
        }
    }
    b.timed(7, 60.0, start);
}

/// Returns the raw scalar ratios, for the blocked evidence.
fn criterion_8(b: &mut Battery) -> Vec<f64> {
    let start = Instant::now();
    let w = default_diagonal_weyl(N).unwrap();
    let m = MetricField::centered(w, 1e-2).unwrap();
    let x = reference_point(&m, 0.3);
    let r = expansion_check(&m, &x, &[1e-2, 5e-3, 2.5e-3], EXPANSION_STEP).unwrap();
    b.at_most(8, "|x - y| = 0.3", (r.distance - 0.3).abs(), 1e-12);
    let tables: [(&str, f64, &[f64]); 4] = [
        ("inverse metric", 8.0, &r.inverse_ratios),
        ("Christoffel", 4.0, &r.christoffel_ratios),
        ("scalar curvature", 2.0, &r.scalar_ratios),
        ("Weyl deviation / eps", 2.0, &r.weyl_ratios),
    ];
    for (name, target, ratios) in tables {
        for (k, q) in ratios.iter().enumerate() {
            b.within_band(8, format!("{name} remainder ratio {}", k + 1), *q, target);
        }
    }
    b.timed(8, 120.0, start);
    r.scalar_ratios.clone()
}

fn criterion_9(b: &mut Battery) {
    let start = Instant::now();
    for n in [10usize, 11, 12] {
        let closed = exact::pohozaev_constant(n).unwrap();
        let integral = exact::pohozaev_constant_integral_form(n).unwrap();
        b.check(9, format!("n = {n}: a_n integral form equals closed form exactly"), integral == closed, closed.symbolic());
        let nf = n as f64;
        let m = nf * (nf - 2.0);
        let pref = num::ToPrimitive::to_f64(&exact::conformal_coefficient(n).unwrap()).unwrap() * (nf - 2.0).powi(2) / 24.0;
        let f = Integrand::new(n, 2.0 * nf - 6.0, move |y: &[f64]| {
            let s = y.iter().map(|v| v * v).sum::<f64>() / m;
            pref * (1.0 + s).powf(1.0 - nf) * (s - 1.0) * s
        })
        .unwrap();
        let q = oracle::integrate_rn(&f, &OracleConfig::default().with_seed(SEED).with_budget(2000)).unwrap();
        b.at_most(9, format!("n = {n}: a_n quadrature vs closed form, standard errors"), q.z_score(closed.to_f64()), 3.0);
    }
    let (lhs, rhs) = exact::ten_dimensional_identity().unwrap();
    b.check(9, "2*10^-4*8^-6*a_10 = (5/567)*omega_9 exactly", lhs == rhs, lhs.symbolic());
    b.at_most(9, "2*10^-4*8^-6*a_10 vs (5/567)*omega_9, relative", rel(lhs.to_f64(), rhs.to_f64()), 1e-12);
    b.check(9, "threshold is 5/567", exact::ten_dimensional_threshold() == num::BigRational::new(5.into(), 567.into()), "");
    let root = regimes::ten_dimensional_cancellation(1e-2).unwrap();
    b.at_most(9, "n = 10 balance root at u0/|W|^2 = 5/567", root.abs_error, 1e-12);
    b.timed(9, 30.0, start);
}

/// Hand transcription of the regime table, written as plain conditionals.
fn expected_verdict(s: &GeometrySpec) -> Option<Verdict> {
    use Verdict::*;
    let (n, lcf, wnz, u0, h) = (s.n, s.lcf, s.weyl_everywhere_nonzero, s.u0_vs_threshold, s.perturbation_sign);
    if n < 3 || (lcf && wnz) {
        return None;
    }
    let neg_min = matches!(h, P::Nonpos | P::Mixed);
    let pos_max = matches!(h, P::Nonneg | P::Mixed);
    let strict = matches!(u0, T::Above | T::Below);
    let v = if h == P::None {
        if lcf || n <= 9 || (n == 10 && strict) || (n >= 11 && wnz) {
            CompactBelowMinimalLevel
        } else if n >= 11 {
            BlowupConstructible
        } else {
            BlowupNotExcluded
        }
    } else if n <= 6 {
        CompactBelowMinimalLevel
    } else if n <= 9 {
        if h == P::Nonneg {
            CompactBelowMinimalLevel
        } else {
            BlowupConstructible
        }
    } else if n == 10 {
        match u0 {
            T::Above if h == P::Nonneg => CompactBelowMinimalLevel,
            T::Below if h == P::Nonpos => CompactBelowMinimalLevel,
            T::Above if neg_min => BlowupConstructible,
            T::Below if pos_max => BlowupConstructible,
            _ => BlowupNotExcluded,
        }
    } else if lcf {
        if h == P::Nonneg {
            CompactBelowMinimalLevel
        } else {
            BlowupConstructible
        }
    } else if wnz {
        if h == P::Nonpos {
            CompactBelowMinimalLevel
        } else {
            BlowupConstructible
        }
    } else {
        BlowupNotExcluded
    };
    Some(v)
}

fn criterion_10(b: &mut Battery) {
    let start = Instant::now();
    let specs = regimes::cross_product(3..=30);
    let mut mismatches = Vec::new();
    for s in &specs {
        let got = classify(s).ok().map(|v| v.verdict);
        if got != expected_verdict(s) || got != regimes::reference_verdict(s) {
            mismatches.push(*s);
        }
    }
    b.check(10, format!("classify vs hand table over {} specs", specs.len()), mismatches.is_empty(), format!("{} mismatches, first {:?}", mismatches.len(), mismatches.first()));
    // one spot per bullet
    let spots = [
        (GeometrySpec::new(8, false, false), Verdict::CompactBelowMinimalLevel),
        (GeometrySpec::new(10, false, true).with_threshold(T::Above), Verdict::CompactBelowMinimalLevel),
        (GeometrySpec::new(10, false, true).with_threshold(T::EqualSomewhere), Verdict::BlowupNotExcluded),
        (GeometrySpec::new(12, false, true), Verdict::CompactBelowMinimalLevel),
        (GeometrySpec::new(12, false, false), Verdict::BlowupConstructible),
        (GeometrySpec::new(12, true, false).with_perturbation(P::Nonpos), Verdict::BlowupConstructible),
        (GeometrySpec::new(12, false, true).with_perturbation(P::Nonpos), Verdict::CompactBelowMinimalLevel),
        (GeometrySpec::new(5, false, false).with_perturbation(P::Mixed), Verdict::CompactBelowMinimalLevel),
    ];
    let bad = spots.iter().filter(|(s, v)| classify(s).map(|r| r.verdict).ok() != Some(*v)).count();
    b.check(10, "golden spots", bad == 0, format!("{bad} of {} wrong", spots.len()));
    b.timed(10, 1.0, start);
}

/// Returns the `failed` list of the full run.
fn criterion_11(b: &mut Battery) -> Vec<String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_nodal-blowup")).args(["verify-all", "--dim", "11", "--json"]).output().expect("binary runs");
    let secs = start.elapsed().as_secs_f64();
    let code = out.status.code().unwrap_or(-1);
    let rep: Value = serde_json::from_slice(&out.stdout).expect("verify-all report is JSON");
    let failed: Vec<String> = rep["failed"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    b.check(11, "verify-all --dim 11 exits 0", code == 0, format!("exit {code}, failed {failed:?}"));
    b.check(11, "verify-all --dim 11 within 10 minutes", secs <= 600.0, format!("{secs:.1} s"));
    failed
}

#[test]
fn acceptance() {
    let mut b = Battery::default();
    criterion_1(&mut b);
    criterion_2(&mut b);
    criterion_3(&mut b);
    criterion_4(&mut b);
    criterion_5(&mut b);
    let (fit_published, fit_corrected) = criterion_6(&mut b);
    criterion_7(&mut b);
    let scalar_ratios = criterion_8(&mut b);
    criterion_9(&mut b);
    criterion_10(&mut b);
    let verify_failed = criterion_11(&mut b);

    let passed = b.outcomes.iter().filter(|o| o.passed).count();
    println!("{passed} of {} checks pass", b.outcomes.len());
    let mut unexpected = Vec::new();
    for o in &b.outcomes {
        match (o.passed, blocked_reason(&o.name)) {
            (false, None) => unexpected.push(format!("[{}] {} failed: {}", o.criterion, o.name, o.detail)),
            (true, Some(_)) => unexpected.push(format!("[{}] {} now passes; revisit BLOCKED", o.criterion, o.name)),
            (false, Some(why)) => println!("blocked [{}] {}: {why}", o.criterion, o.name),
            (true, None) => {}
        }
    }
    assert!(unexpected.is_empty(), "{unexpected:#?}");

    // evidence behind the blocked checks
    assert!(fit_published > 1.0, "fit vs stated coefficient: {fit_published}");
    assert!(fit_corrected <= 1e-2, "fit vs corrected coefficient: {fit_corrected}");
    assert!(scalar_ratios.iter().all(|q| (q - 8.0).abs() <= 0.5), "raw scalar ratios {scalar_ratios:?}");
    assert_eq!(verify_failed.len(), 3, "{verify_failed:?}");
    assert!(verify_failed.iter().all(|f| f.starts_with("[6]") || f.starts_with("[8]")), "{verify_failed:?}");
}
