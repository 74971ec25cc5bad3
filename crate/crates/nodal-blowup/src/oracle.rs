//! Independent numerical integration over ℝ^n and the unit sphere.
//!
//! Integrals over ℝ^n are computed as a product rule: random directions on
//! the sphere times a Gauss–Jacobi rule in `s = r/(1+r)`. Directions are
//! split into batches, each with its own ChaCha stream derived from the
//! seed, and batch results are reduced in index order, so the result is
//! bit-identical for a fixed seed and budget whatever the thread count.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{self, ExactValue, HalfInt};
use crate::weyl::{contraction, WeylForm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("integrand decays like |x|^-{decay}, which is not integrable in dimension {n}")]
    NotIntegrable { n: usize, decay: f64 },
    #[error("budget {0} is below the minimum of 1000 samples")]
    BudgetTooSmall(usize),
    #[error("oracle error estimate {error:.3e} exceeds the requested bound {bound:.3e}")]
    NotConverged { error: f64, bound: f64 },
    #[error("dimension {0} is too small for the oracle")]
    Dimension(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SphereRadialProduct,
    MonteCarlo,
}

/// How directions on the sphere are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionRule {
    /// Independent uniform directions (normalised Gaussian vectors).
    Uniform,
    /// A degree-5 symmetric cubature (points `±e_i` and `(±e_i ± e_j)/√2`)
    /// under independent random rotations. Unbiased for any integrand and
    /// exact for angular polynomials of degree at most five.
    RotatedCubature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub standard_error: f64,
    /// Spread between batches (jackknife).
    pub sampling_error: f64,
    /// Radial quadrature error estimated by node doubling on probe rays.
    pub radial_error: f64,
    pub samples_used: usize,
    pub method: Method,
}

impl OracleResult {
    /// Number of standard errors separating the estimate from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if self.standard_error == 0.0 {
            // an exact estimate either hits the target or misses it outright
            return if diff == 0.0 { 0.0 } else { f64::INFINITY };
        }
        diff / self.standard_error
    }
}

/// Oracle settings: `budget` counts sphere directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub budget: usize,
    pub seed: u64,
    pub rule: DirectionRule,
    pub radial_nodes: usize,
    pub batches: usize,
    /// Relative error floor added to every estimate.
    pub relative_floor: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            budget: 20_000,
            seed: 20_240_611,
            rule: DirectionRule::Uniform,
            radial_nodes: 48,
            batches: 32,
            relative_floor: 1e-13,
        }
    }
}

impl OracleConfig {
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rule(mut self, rule: DirectionRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_relative_floor(mut self, floor: f64) -> Self {
        self.relative_floor = floor;
        self
    }
}

/// A function on ℝ^n seen along rays `center + r θ`.
pub trait RayIntegrand: Sync {
    fn dim(&self) -> usize;
    /// Exponent `d` with `|f(x)| = O(|x|^-d)`.
    fn decay(&self) -> f64;
    fn ray<'a>(&'a self, theta: &[f64]) -> Box<dyn Fn(f64) -> f64 + 'a>;
}

/// A pointwise integrand, optionally centred at a point other than the origin.
pub struct Integrand<F> {
    n: usize,
    decay: f64,
    center: Vec<f64>,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Integrand<F> {
    pub fn new(n: usize, decay: f64, f: F) -> Result<Self, OracleError> {
        check_decay(n, decay)?;
        Ok(Integrand { n, decay, center: vec![0.0; n], f })
    }

    /// Polar coordinates are taken around `center`.
    pub fn centered_at(mut self, center: &[f64]) -> Self {
        self.center = center.to_vec();
        self
    }
}

fn check_decay(n: usize, decay: f64) -> Result<(), OracleError> {
    if n < 2 {
        return Err(OracleError::Dimension(n));
    }
    if !(decay > n as f64) {
        return Err(OracleError::NotIntegrable { n, decay });
    }
    Ok(())
}

impl<F: Fn(&[f64]) -> f64 + Sync> RayIntegrand for Integrand<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn decay(&self) -> f64 {
        self.decay
    }

    fn ray<'a>(&'a self, theta: &[f64]) -> Box<dyn Fn(f64) -> f64 + 'a> {
        let theta = theta.to_vec();
        Box::new(move |r| {
            let x: Vec<f64> = self.center.iter().zip(&theta).map(|(c, t)| c + r * t).collect();
            (self.f)(&x)
        })
    }
}

/// An integrand that precomputes per-direction data and returns a radial
/// profile; useful when the angular part is expensive.
pub struct RayFn<G> {
    n: usize,
    decay: f64,
    g: G,
}

impl<G> RayFn<G>
where
    G: Fn(&[f64]) -> Box<dyn Fn(f64) -> f64 + Send> + Sync,
{
    pub fn new(n: usize, decay: f64, g: G) -> Result<Self, OracleError> {
        check_decay(n, decay)?;
        Ok(RayFn { n, decay, g })
    }
}

impl<G> RayIntegrand for RayFn<G>
where
    G: Fn(&[f64]) -> Box<dyn Fn(f64) -> f64 + Send> + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn decay(&self) -> f64 {
        self.decay
    }

    fn ray<'a>(&'a self, theta: &[f64]) -> Box<dyn Fn(f64) -> f64 + 'a> {
        (self.g)(theta)
    }
}

/// Gauss–Jacobi rule on `[0, 1]` for the weight `s^beta` (Golub–Welsch).
pub fn gauss_jacobi_unit(nodes: usize, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let a = 0.0f64;
    let b = beta;
    let mut jm = DMatrix::zeros(nodes, nodes);
    for k in 0..nodes {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        jm[(k, k)] = (b * b - a * a) / (s * (s + 2.0));
        if k + 1 < nodes {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a + b;
            let num = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b);
            let den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
            let off = (num / den).sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    // mu0 = ∫_{-1}^{1} (1+x)^b dx = 2^{b+1}/(b+1); mapping to [0,1] divides by 2^{b+1}
    let mu0_unit = 1.0 / (b + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..nodes)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, mu0_unit * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

struct RadialRule {
    s: Vec<f64>,
    w: Vec<f64>,
    n: usize,
}

impl RadialRule {
    fn new(n: usize, nodes: usize) -> Self {
        let (s, w) = gauss_jacobi_unit(nodes, n as f64 - 1.0);
        RadialRule { s, w, n }
    }

    /// `∫_0^∞ g(r) r^{n-1} dr` with `r = s/(1-s)`.
    fn apply(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        let p = -(self.n as f64 + 1.0);
        self.s
            .iter()
            .zip(&self.w)
            .map(|(&s, &w)| w * g(s / (1.0 - s)) * (1.0 - s).powf(p))
            .sum()
    }
}

fn gaussian_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-12 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// A Haar-distributed orthogonal matrix.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Points and weights (summing to one) of the degree-5 symmetric cubature.
fn cubature_points(q: &DMatrix<f64>) -> Vec<(Vec<f64>, f64)> {
    let n = q.nrows();
    let nf = n as f64;
    let w_axis = (4.0 - nf) / (2.0 * nf * (nf + 2.0));
    let w_diag = 1.0 / (nf * (nf + 2.0));
    let mut pts = Vec::with_capacity(2 * n * n);
    let col = |i: usize| -> DVector<f64> { q.column(i).into_owned() };
    for i in 0..n {
        let c = col(i);
        pts.push((c.iter().copied().collect(), w_axis));
        pts.push((c.iter().map(|v| -v).collect(), w_axis));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let (ci, cj) = (col(i), col(j));
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let p: Vec<f64> = ci.iter().zip(cj.iter()).map(|(a, b)| h * (si * a + sj * b)).collect();
                pts.push((p, w_diag));
            }
        }
    }
    pts
}

fn jackknife(means: &[f64], sizes: &[f64]) -> (f64, f64) {
    let total: f64 = sizes.iter().sum();
    let sum: f64 = means.iter().zip(sizes).map(|(m, s)| m * s).sum();
    let mean = sum / total;
    let b = means.len() as f64;
    if means.len() < 2 {
        return (mean, 0.0);
    }
    let loo: Vec<f64> = means
        .iter()
        .zip(sizes)
        .map(|(m, s)| (sum - m * s) / (total - s))
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / b;
    let var = (b - 1.0) / b * loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>();
    (mean, var.sqrt())
}

/// `∫_{ℝ^n} f dx` by the sphere × radial product rule.
pub fn integrate_rn(f: &dyn RayIntegrand, cfg: &OracleConfig) -> Result<OracleResult, OracleError> {
    let n = f.dim();
    check_decay(n, f.decay())?;
    if cfg.budget < 1000 {
        return Err(OracleError::BudgetTooSmall(cfg.budget));
    }
    let omega = exact::sphere_volume(n).map_err(|_| OracleError::Dimension(n))?.to_f64();
    let rule = RadialRule::new(n, cfg.radial_nodes);

    // each unit of work is one direction (uniform) or one rotation (cubature)
    let per_unit = match cfg.rule {
        DirectionRule::Uniform => 1,
        DirectionRule::RotatedCubature => 2 * n * n,
    };
    let units = (cfg.budget / per_unit).max(2 * cfg.batches.max(2));
    let batches = cfg.batches.max(2).min(units);
    let sizes: Vec<usize> = (0..batches)
        .map(|b| units / batches + usize::from(b < units % batches))
        .collect();

    let means: Vec<f64> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let mut acc = 0.0;
            for _ in 0..sizes[b] {
                acc += match cfg.rule {
                    DirectionRule::Uniform => {
                        let theta = gaussian_unit(&mut rng, n);
                        rule.apply(&*f.ray(&theta))
                    }
                    DirectionRule::RotatedCubature => {
                        let q = random_rotation(&mut rng, n);
                        cubature_points(&q)
                            .iter()
                            .map(|(p, w)| w * rule.apply(&*f.ray(p)))
                            .sum::<f64>()
                    }
                };
            }
            acc / sizes[b] as f64
        })
        .collect();
    let size_f: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let (mean, jk) = jackknife(&means, &size_f);

    // radial error: compare N and 2N nodes on a few probe rays
    let fine = RadialRule::new(n, 2 * cfg.radial_nodes);
    let mut probe_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    probe_rng.set_stream(u64::MAX);
    let mut radial = 0f64;
    for k in 0..4 {
        let theta = if k == 0 {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        } else {
            gaussian_unit(&mut probe_rng, n)
        };
        let ray = f.ray(&theta);
        radial = radial.max((rule.apply(&*ray) - fine.apply(&*ray)).abs());
    }

    let value = omega * mean;
    let sampling_error = omega * jk;
    let radial_error = omega * radial;
    let standard_error = (sampling_error.powi(2) + radial_error.powi(2)).sqrt() + cfg.relative_floor * value.abs();
    Ok(OracleResult {
        value,
        standard_error,
        sampling_error,
        radial_error,
        samples_used: units * per_unit * cfg.radial_nodes,
        method: Method::SphereRadialProduct,
    })
}

/// Like [`integrate_rn`] but fails when the error estimate exceeds `bound`.
pub fn integrate_rn_bounded(
    f: &dyn RayIntegrand,
    cfg: &OracleConfig,
    bound: f64,
) -> Result<OracleResult, OracleError> {
    let r = integrate_rn(f, cfg)?;
    if r.standard_error > bound {
        return Err(OracleError::NotConverged { error: r.standard_error, bound });
    }
    Ok(r)
}

/// Plain Monte Carlo over the unit sphere: `∫_{S^{n-1}} f dσ`.
pub fn integrate_sphere_mc(
    n: usize,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    samples: usize,
    seed: u64,
) -> Result<OracleResult, OracleError> {
    if samples < 1000 {
        return Err(OracleError::BudgetTooSmall(samples));
    }
    let omega = exact::sphere_volume(n).map_err(|_| OracleError::Dimension(n))?.to_f64();
    let batches = 64usize;
    let parts: Vec<(f64, f64, usize)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = samples / batches + usize::from(b < samples % batches);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let v = f(&gaussian_unit(&mut rng, n));
                s += v;
                s2 += v * v;
            }
            (s, s2, count)
        })
        .collect();
    let (s, s2, c) = parts
        .iter()
        .fold((0.0, 0.0, 0usize), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2));
    let cf = c as f64;
    let mean = s / cf;
    let var = (s2 / cf - mean * mean).max(0.0) * cf / (cf - 1.0);
    let se = omega * (var / cf).sqrt();
    Ok(OracleResult {
        value: omega * mean,
        standard_error: se,
        sampling_error: se,
        radial_error: 0.0,
        samples_used: c,
        method: Method::MonteCarlo,
    })
}

/// Exact `∫_{S^{n-1}} x^α dσ = 2 Π Γ((α_i+1)/2) / Γ((n+|α|)/2)`, zero when
/// some exponent is odd.
pub fn integrate_sphere_poly(alpha: &[u32]) -> ExactValue {
    if alpha.iter().any(|a| a % 2 == 1) {
        return ExactValue::from_ratio(0, 1);
    }
    let n = alpha.len() as i64;
    let total: i64 = alpha.iter().map(|&a| a as i64).sum();
    let mut v = ExactValue::from_ratio(2, 1);
    for &a in alpha {
        v = v * exact::gamma_half(HalfInt::from_twice(a as i64 + 1)).expect("positive argument");
    }
    v / exact::gamma_half(HalfInt::from_twice(n + total)).expect("positive argument")
}

/// `∫ x_a x_b x_c x_d dσ = ω/(n(n+2)) (δ_ab δ_cd + δ_ac δ_bd + δ_ad δ_bc)`.
pub fn fourth_moment(omega: f64, n: usize, a: usize, b: usize, c: usize, d: usize) -> f64 {
    let dl = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let nf = n as f64;
    omega / (nf * (nf + 2.0)) * (dl(a, b) * dl(c, d) + dl(a, c) * dl(b, d) + dl(a, d) * dl(b, c))
}

/// A sphere moment computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentValue {
    /// Term-by-term integration of the degree-4 polynomial.
    pub expansion: f64,
    /// The contracted closed form.
    pub closed_form: f64,
}

/// `∫_{S^{n-1}} Σ_p h_kp h_pl dσ`; closed form `ω/(18n(n+2)) T_kl`.
pub fn brendle_moment_a(w: &WeylForm, k: usize, l: usize) -> MomentValue {
    let n = w.dim();
    let omega = exact::sphere_volume(n).expect("n >= 3").to_f64();
    // h_kp h_pl = (1/9) Σ W_kapb W_pcld x_a x_b x_c x_d
    let mut s = 0.0;
    for p in 0..n {
        for a in 0..n {
            for b in 0..n {
                let x = w.get(k, a, p, b);
                if x == 0.0 {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        let y = w.get(p, c, l, d);
                        if y != 0.0 {
                            s += x * y * fourth_moment(omega, n, a, b, c, d);
                        }
                    }
                }
            }
        }
    }
    let t = contraction(w).t[(k, l)];
    let nf = n as f64;
    MomentValue { expansion: s / 9.0, closed_form: omega / (18.0 * nf * (nf + 2.0)) * t }
}

/// `∫_{S^{n-1}} h_ab h_cd dσ`; closed form `ω/(9n(n+2)) S_abcd`.
pub fn brendle_moment_b(w: &WeylForm, a: usize, b: usize, c: usize, d: usize) -> MomentValue {
    let n = w.dim();
    let omega = exact::sphere_volume(n).expect("n >= 3").to_f64();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            let x = w.get(a, p, b, q);
            if x == 0.0 {
                continue;
            }
            for r in 0..n {
                for t in 0..n {
                    let y = w.get(c, r, d, t);
                    if y != 0.0 {
                        s += x * y * fourth_moment(omega, n, p, q, r, t);
                    }
                }
            }
        }
    }
    let nf = n as f64;
    MomentValue {
        expansion: s / 9.0,
        closed_form: omega / (9.0 * nf * (nf + 2.0)) * w.pair_tensor(a, b, c, d),
    }
}

/// Monte Carlo estimate of [`brendle_moment_a`].
pub fn brendle_moment_a_mc(w: &WeylForm, k: usize, l: usize, samples: usize, seed: u64) -> Result<OracleResult, OracleError> {
    let field = w.deformation();
    let n = w.dim();
    let f = move |x: &[f64]| {
        let h = field.eval(x);
        (0..n).map(|p| h[(k, p)] * h[(p, l)]).sum::<f64>()
    };
    integrate_sphere_mc(n, &f, samples, seed)
}

/// Monte Carlo estimate of [`brendle_moment_b`].
pub fn brendle_moment_b_mc(
    w: &WeylForm,
    idx: [usize; 4],
    samples: usize,
    seed: u64,
) -> Result<OracleResult, OracleError> {
    let field = w.deformation();
    let [a, b, c, d] = idx;
    let f = move |x: &[f64]| field.entry(a, b, x) * field.entry(c, d, x);
    integrate_sphere_mc(w.dim(), &f, samples, seed)
}
