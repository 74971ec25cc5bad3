//! The saddle point `(t₀, 0)` of the reduced energy: location, box
//! certificate and critical points of perturbed energies.
//!
//! The certificate works with the model `F(t, z) ≈ F(t, 0) + Q(z)`, where
//! `F(t, 0)` is the closed-form profile and `Q` the quartic model of
//! [`crate::energy::quartic_model`]. Quadrature spot checks on the rim make
//! sure the model matches the assembled energy.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::energy::{
    self, f_assembled, profile_dt, profile_dtt, profile_t, quartic_model, quartic_model_gradient,
    quartic_model_hessian, EnergyError, ModelData, REMAINDER_RADIUS,
};
use crate::oracle::{DirectionRule, OracleConfig};
use crate::weyl::coercivity_check;

#[derive(Debug, Error)]
pub enum SaddleError {
    #[error("dimension {0} has no interior minimum of the profile; need n >= 11")]
    Regime(usize),
    #[error("the quartic coefficient vanishes (zero Weyl form), the profile is monotone")]
    NoQuarticTerm,
    #[error("profile coefficients must be positive, got c4 = {c4}, clambda = {clambda}")]
    Coefficients { c4: f64, clambda: f64 },
    #[error("box [{lo}, {hi}] x B(0, {eps}) leaves (0, inf) x B(0, 1)")]
    BoxOutOfDomain { lo: f64, hi: f64, eps: f64 },
    #[error("perturbation size {delta:.3e} is not below the certificate margin {margin:.3e}")]
    PerturbationTooLarge { delta: f64, margin: f64 },
    #[error("the certificate did not pass: {0}")]
    CertificateFailed(String),
    #[error("no critical point found in the box (best scaled gradient {best:.3e})")]
    NoRoot { best: f64 },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// `t ↦ -c4 t⁴ + clambda t^{(n-2)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Profile {
    pub n: usize,
    pub c4: f64,
    pub clambda: f64,
}

impl Profile {
    pub fn new(n: usize, c4: f64, clambda: f64) -> Result<Self, SaddleError> {
        if n <= 10 {
            return Err(SaddleError::Regime(n));
        }
        if c4 == 0.0 {
            return Err(SaddleError::NoQuarticTerm);
        }
        if !(c4 > 0.0 && clambda > 0.0) {
            return Err(SaddleError::Coefficients { c4, clambda });
        }
        Ok(Profile { n, c4, clambda })
    }

    pub fn from_model(model: &ModelData) -> Result<Self, SaddleError> {
        let c = model.coefficients();
        Self::new(model.dim(), c.c4, c.clambda)
    }

    fn a(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    pub fn value(&self, t: f64) -> f64 {
        -self.c4 * t.powi(4) + self.clambda * t.powf(self.a())
    }

    pub fn dt(&self, t: f64) -> f64 {
        let a = self.a();
        -4.0 * self.c4 * t.powi(3) + a * self.clambda * t.powf(a - 1.0)
    }

    pub fn dtt(&self, t: f64) -> f64 {
        let a = self.a();
        -12.0 * self.c4 * t * t + a * (a - 1.0) * self.clambda * t.powf(a - 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileMinimum {
    pub t0: f64,
    pub f_at_min: f64,
    pub hess_t: f64,
    /// `-c4 t₀⁴ (n-10)/(n-2)`.
    pub closed_form_value: f64,
    /// `|F(t₀) - closed form| / |closed form|`.
    pub identity_residual: f64,
    /// Size of the Newton correction applied to the closed-form root.
    pub newton_step: f64,
}

/// Global minimum of the profile: closed-form root of `∂_t F` followed by
/// one safeguarded Newton step.
pub fn minimize_profile_coeffs(p: &Profile) -> ProfileMinimum {
    let nf = p.n as f64;
    let closed = (8.0 * p.c4 / ((nf - 2.0) * p.clambda)).powf(2.0 / (nf - 10.0));
    let step = -p.dt(closed) / p.dtt(closed);
    let refined = closed + step;
    let (t0, newton_step) = if refined > 0.0 && p.dt(refined).abs() < p.dt(closed).abs() {
        (refined, step.abs())
    } else {
        (closed, 0.0)
    };
    let f_at_min = p.value(t0);
    let closed_form_value = -p.c4 * t0.powi(4) * (nf - 10.0) / (nf - 2.0);
    ProfileMinimum {
        t0,
        f_at_min,
        hess_t: p.dtt(t0),
        closed_form_value,
        identity_residual: ((f_at_min - closed_form_value) / closed_form_value).abs(),
        newton_step,
    }
}

pub fn minimize_profile(model: &ModelData) -> Result<ProfileMinimum, SaddleError> {
    Ok(minimize_profile_coeffs(&Profile::from_model(model)?))
}

/// The model energy `F(t, 0) + Q(z)`.
pub fn model_energy(model: &ModelData, t: f64, z: &[f64]) -> Result<f64, SaddleError> {
    Ok(profile_t(model, t)? + quartic_model(model, z))
}

/// Settings of the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleOptions {
    pub rim_samples: usize,
    pub rim_starts: usize,
    pub t_samples: usize,
    pub spot_checks: usize,
    pub seed: u64,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions { rim_samples: 4096, rim_starts: 64, t_samples: 33, spot_checks: 2, seed: 20_240_611 }
    }
}

/// One named condition of the certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub passed: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleCertificate {
    pub n: usize,
    pub t0: f64,
    pub f_at_min: f64,
    pub hess_t: f64,
    pub eta: f64,
    pub eps_box: f64,
    /// Box bound `A` with `t₀ ∈ [2/A, A/2]`.
    pub box_bound: f64,
    pub edge_min: f64,
    pub rim_max: f64,
    /// Disagreement between two independent rim maximisations.
    pub rim_gap: f64,
    pub box_max: f64,
    /// `∂_t F` at `t₀ - η` and `t₀ + η`, extremes over the sampled `z`.
    pub slope_left_max: f64,
    pub slope_right_min: f64,
    pub slope_samples: usize,
    /// Largest `|F_quadrature - F_model| / standard error` over the rim spot checks.
    pub spot_check_z: f64,
    pub spot_check_error: f64,
    pub remainder_flag: bool,
    pub conditions: Vec<Condition>,
    pub passed: bool,
}

impl SaddleCertificate {
    /// Value margin available to a perturbation.
    pub fn value_margin(&self) -> f64 {
        (self.edge_min - self.rim_max).min(-self.box_max)
    }

    /// Slope margin available to a perturbation of `∂_t F`.
    pub fn slope_margin(&self) -> f64 {
        (-self.slope_left_max).min(self.slope_right_min)
    }

    pub fn failed_conditions(&self) -> Vec<&'static str> {
        self.conditions.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

fn spot_config(seed: u64) -> OracleConfig {
    OracleConfig {
        budget: 1000,
        seed,
        rule: DirectionRule::RotatedCubature,
        radial_nodes: 64,
        batches: 4,
        relative_floor: 1e-12,
    }
}

/// Extremes of `Σ h(e)²` over the unit sphere, from two independently
/// seeded searches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RimSurvey {
    pub minimum: f64,
    pub minimum_check: f64,
    /// Sampled only when the quartic coefficient is not negative.
    pub maximum: Option<f64>,
    pub argmin: Vec<f64>,
}

pub fn rim_survey(model: &ModelData, opts: &SaddleOptions) -> RimSurvey {
    let first = coercivity_check(model.weyl(), opts.rim_samples, opts.rim_starts, opts.seed);
    let second = coercivity_check(model.weyl(), opts.rim_samples, opts.rim_starts, opts.seed ^ 0x9e37_79b9);
    RimSurvey {
        minimum: first.minimum.min(second.minimum),
        minimum_check: first.minimum.max(second.minimum),
        maximum: (model.coefficients().fourth_order_corrected >= 0.0).then(|| max_square_norm(model, opts)),
        argmin: if first.minimum <= second.minimum { first.argmin } else { second.argmin },
    }
}

/// Checks every box condition for the given half-widths.
pub fn certify_saddle(model: &ModelData, eta: f64, eps_box: f64, opts: &SaddleOptions) -> Result<SaddleCertificate, SaddleError> {
    certify_saddle_with(model, &rim_survey(model, opts), eta, eps_box, opts)
}

pub fn certify_saddle_with(
    model: &ModelData,
    rim: &RimSurvey,
    eta: f64,
    eps_box: f64,
    opts: &SaddleOptions,
) -> Result<SaddleCertificate, SaddleError> {
    let n = model.dim();
    let min = minimize_profile(model)?;
    let t0 = min.t0;
    let box_bound = 4.0 * t0.max(1.0 / t0);
    let (lo, hi) = (t0 - eta, t0 + eta);
    if !(eta > 0.0 && eps_box > 0.0 && lo > 0.0 && eps_box < 1.0) {
        return Err(SaddleError::BoxOutOfDomain { lo, hi, eps: eps_box });
    }

    let ts = energy::linspace(lo, hi, opts.t_samples.max(3));
    let mut edge_min = f64::INFINITY;
    let mut profile_max = f64::NEG_INFINITY;
    for &t in &ts {
        let f = profile_t(model, t)?;
        edge_min = edge_min.min(f);
        profile_max = profile_max.max(f);
    }

    // max over |z| = ε of Q(z) = q ε⁴ min_{|e|=1} Σ h(e)² with q < 0
    let q = model.coefficients().fourth_order_corrected;
    let eps4 = eps_box.powi(4);
    let quartic_max = if q < 0.0 { q * eps4 * rim.minimum } else { q * eps4 * rim.maximum.unwrap_or_else(|| max_square_norm(model, opts)) };
    let rim_max = profile_max + quartic_max;
    let rim_gap = (q * eps4 * (rim.minimum_check - rim.minimum)).abs();
    // Q vanishes at z = 0 and is nonpositive when q < 0
    let box_max = profile_max + quartic_max.max(0.0);

    // ∂_t of the model does not depend on z, so one evaluation per face covers the ball
    let slope_left_max = profile_dt(model, lo)?;
    let slope_right_min = profile_dt(model, hi)?;
    let slope_samples = 1;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    // quadrature spot checks at rim points, starting with the rim maximiser
    let mut spot_check_z = 0f64;
    let mut spot_check_error = 0f64;
    for k in 0..opts.spot_checks {
        let e = if k == 0 {
            rim.argmin.clone()
        } else {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / r).collect()
        };
        let z: Vec<f64> = e.iter().map(|v| v * eps_box).collect();
        let f = f_assembled(model, t0, &z, &spot_config(opts.seed + k as u64))?;
        let m = model_energy(model, t0, &z)?;
        spot_check_z = spot_check_z.max((f.value - m).abs() / f.standard_error);
        spot_check_error = spot_check_error.max(f.standard_error);
    }

    let remainder_flag = eps_box > REMAINDER_RADIUS;
    let noise = 10.0 * rim_gap + spot_check_error;
    let conditions = vec![
        Condition { name: "negative_minimum", passed: min.f_at_min < 0.0, margin: -min.f_at_min },
        Condition { name: "positive_curvature", passed: min.hess_t > 0.0, margin: min.hess_t },
        Condition {
            name: "edge_above_rim",
            passed: edge_min - rim_max > noise,
            margin: edge_min - rim_max - noise,
        },
        Condition { name: "slope_left_negative", passed: slope_left_max < 0.0, margin: -slope_left_max },
        Condition { name: "slope_right_positive", passed: slope_right_min > 0.0, margin: slope_right_min },
        Condition { name: "box_negative", passed: box_max + spot_check_error < 0.0, margin: -box_max - spot_check_error },
        Condition { name: "quartic_model_valid", passed: !remainder_flag, margin: REMAINDER_RADIUS - eps_box },
        Condition { name: "spot_checks_agree", passed: spot_check_z <= 3.0, margin: 3.0 - spot_check_z },
        Condition {
            name: "box_inside_bound",
            passed: lo >= 1.0 / box_bound && hi <= box_bound,
            margin: (lo - 1.0 / box_bound).min(box_bound - hi),
        },
    ];
    let passed = conditions.iter().all(|c| c.passed);
    Ok(SaddleCertificate {
        n,
        t0,
        f_at_min: min.f_at_min,
        hess_t: min.hess_t,
        eta,
        eps_box,
        box_bound,
        edge_min,
        rim_max,
        rim_gap,
        box_max,
        slope_left_max,
        slope_right_min,
        slope_samples,
        spot_check_z,
        spot_check_error,
        remainder_flag,
        conditions,
        passed,
    })
}

fn max_square_norm(model: &ModelData, opts: &SaddleOptions) -> f64 {
    let field = model.weyl().deformation();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = model.dim();
    (0..opts.rim_samples)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let e: Vec<f64> = v.into_iter().map(|x| x / r).collect();
            field.square_norm(&e)
        })
        .fold(0.0, f64::max)
}

/// Outcome of the shrink loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkResult {
    pub certificate: SaddleCertificate,
    pub rounds: usize,
}

/// Starts from `ε = 0.2` and the `η` at which the profile rises by half
/// the rim drop `|q| ε⁴ min Σh²`, then halves `η` (edge, slope or sign
/// failures) or `ε` (remainder flag, spot checks) until the certificate
/// passes.
pub fn certify_with_shrink(model: &ModelData, opts: &SaddleOptions) -> Result<ShrinkResult, SaddleError> {
    let min = minimize_profile(model)?;
    let t0 = min.t0;
    let rim = rim_survey(model, opts);
    let mut eps: f64 = 0.2;
    let drop = (model.coefficients().fourth_order_corrected * eps.powi(4) * rim.minimum).abs();
    let mut eta = (t0 / 10.0).min((drop / min.hess_t).sqrt());
    let mut rounds = 0;
    loop {
        rounds += 1;
        let cert = certify_saddle_with(model, &rim, eta, eps, opts)?;
        if cert.passed || eta < 1e-12 * t0 || rounds >= 200 {
            return Ok(ShrinkResult { certificate: cert, rounds });
        }
        let failed = cert.failed_conditions();
        if failed.contains(&"quartic_model_valid") || failed.contains(&"spot_checks_agree") {
            eps /= 2.0;
        } else {
            eta /= 2.0;
        }
    }
}

/// A bounded perturbation `Λ(t, z)` added to the energy.
pub trait Perturbation: Sync {
    fn value(&self, t: f64, z: &[f64]) -> f64;
    /// `(∂_t Λ, ∇_z Λ)`.
    fn gradient(&self, t: f64, z: &[f64]) -> (f64, Vec<f64>);
    /// Hessian in `(t, z)` ordering.
    fn hessian(&self, t: f64, z: &[f64]) -> DMatrix<f64>;
    /// Sup norm of the value over the box.
    fn sup_norm(&self) -> f64;
    /// Sup norm of `∂_t Λ` over the box.
    fn slope_sup(&self) -> f64;
}

pub struct ZeroPerturbation;

impl Perturbation for ZeroPerturbation {
    fn value(&self, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _: f64, z: &[f64]) -> (f64, Vec<f64>) {
        (0.0, vec![0.0; z.len()])
    }
    fn hessian(&self, _: f64, z: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(z.len() + 1, z.len() + 1)
    }
    fn sup_norm(&self) -> f64 {
        0.0
    }
    fn slope_sup(&self) -> f64 {
        0.0
    }
}

/// `δ cos(t) Π_i cos(z_i)`.
pub struct CosinePerturbation {
    pub delta: f64,
}

impl Perturbation for CosinePerturbation {
    fn value(&self, t: f64, z: &[f64]) -> f64 {
        self.delta * t.cos() * z.iter().map(|v| v.cos()).product::<f64>()
    }

    fn gradient(&self, t: f64, z: &[f64]) -> (f64, Vec<f64>) {
        let c: Vec<f64> = z.iter().map(|v| v.cos()).collect();
        let prod: f64 = c.iter().product();
        let dt = -self.delta * t.sin() * prod;
        let dz = (0..z.len())
            .map(|i| {
                let others: f64 = c.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).product();
                -self.delta * t.cos() * z[i].sin() * others
            })
            .collect();
        (dt, dz)
    }

    fn hessian(&self, t: f64, z: &[f64]) -> DMatrix<f64> {
        let n = z.len();
        let f = |v: f64, d: u8| -> f64 {
            match d {
                0 => v.cos(),
                1 => -v.sin(),
                _ => -v.cos(),
            }
        };
        let vars: Vec<f64> = std::iter::once(t).chain(z.iter().copied()).collect();
        DMatrix::from_fn(n + 1, n + 1, |a, b| {
            let mut p = self.delta;
            for (k, &v) in vars.iter().enumerate() {
                let d = u8::from(k == a) + u8::from(k == b);
                p *= f(v, d);
            }
            p
        })
    }

    fn sup_norm(&self) -> f64 {
        self.delta.abs()
    }

    fn slope_sup(&self) -> f64 {
        self.delta.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub t: f64,
    pub z: Vec<f64>,
    /// Gradient norm divided by `|F(t₀, 0)|`.
    pub gradient_norm: f64,
    pub value: f64,
    pub iterations: usize,
    /// Distance to `(t₀, 0)`.
    pub distance: f64,
    pub start: usize,
}

fn full_gradient(model: &ModelData, pert: &dyn Perturbation, t: f64, z: &[f64]) -> Result<DVector<f64>, SaddleError> {
    let (pt, pz) = pert.gradient(t, z);
    let gz = quartic_model_gradient(model, z);
    let n = z.len();
    let mut g = DVector::zeros(n + 1);
    g[0] = profile_dt(model, t)? + pt;
    for i in 0..n {
        g[i + 1] = gz[i] + pz[i];
    }
    Ok(g)
}

fn full_hessian(model: &ModelData, pert: &dyn Perturbation, t: f64, z: &[f64]) -> Result<DMatrix<f64>, SaddleError> {
    let n = z.len();
    let mut h = pert.hessian(t, z);
    h[(0, 0)] += profile_dtt(model, t)?;
    let hz = quartic_model_hessian(model, z);
    for i in 0..n {
        for j in 0..n {
            h[(i + 1, j + 1)] += hz[(i, j)];
        }
    }
    Ok(h)
}

/// Critical point of `F + Λ` in the certified box by damped Newton steps
/// (pseudo-inverse, since the `z`-Hessian of `F` vanishes at the origin)
/// from several starts.
pub fn locate_critical_point(
    model: &ModelData,
    cert: &SaddleCertificate,
    pert: &dyn Perturbation,
) -> Result<CriticalPoint, SaddleError> {
    if !cert.passed {
        return Err(SaddleError::CertificateFailed(cert.failed_conditions().join(", ")));
    }
    let margin = cert.value_margin();
    if 2.0 * pert.sup_norm() >= margin || pert.slope_sup() >= cert.slope_margin() {
        return Err(SaddleError::PerturbationTooLarge { delta: pert.sup_norm(), margin });
    }
    let n = model.dim();
    let (t0, eta, eps) = (cert.t0, cert.eta, cert.eps_box);
    let scale = cert.f_at_min.abs();
    let mut starts: Vec<(f64, Vec<f64>)> = vec![(t0, vec![0.0; n])];
    for k in 0..4 {
        let mut z = vec![0.0; n];
        z[k % n] = if k % 2 == 0 { 0.5 * eps } else { -0.5 * eps };
        let t = t0 + if k < 2 { 0.5 * eta } else { -0.5 * eta };
        starts.push((t, z));
    }
    let results: Vec<Option<CriticalPoint>> = starts
        .par_iter()
        .enumerate()
        .map(|(s, (t, z))| newton(model, pert, *t, z.clone(), scale, cert).ok().map(|mut c| {
            c.start = s;
            c
        }))
        .collect();
    let mut best: Option<CriticalPoint> = None;
    for c in results.into_iter().flatten() {
        let inside = (c.t - t0).abs() <= eta && c.z.iter().map(|v| v * v).sum::<f64>().sqrt() <= eps;
        if !inside {
            continue;
        }
        // converged points first, then the one nearest (t₀, 0)
        let better = match &best {
            None => true,
            Some(b) => {
                let (cc, bc) = (c.gradient_norm <= 1e-8, b.gradient_norm <= 1e-8);
                (cc && !bc) || (cc == bc && (c.distance, c.gradient_norm) < (b.distance, b.gradient_norm))
            }
        };
        if better {
            best = Some(c);
        }
    }
    match best {
        Some(c) if c.gradient_norm <= 1e-8 => Ok(c),
        Some(c) => Err(SaddleError::NoRoot { best: c.gradient_norm }),
        None => Err(SaddleError::NoRoot { best: f64::INFINITY }),
    }
}

fn newton(
    model: &ModelData,
    pert: &dyn Perturbation,
    mut t: f64,
    mut z: Vec<f64>,
    scale: f64,
    cert: &SaddleCertificate,
) -> Result<CriticalPoint, SaddleError> {
    let n = z.len();
    let mut g = full_gradient(model, pert, t, &z)?;
    let mut iterations = 0;
    for _ in 0..300 {
        let h = full_hessian(model, pert, t, &z)?;
        let svd = h.svd(true, true);
        let tol = 1e-12 * svd.singular_values.max();
        let step = -svd.pseudo_inverse(tol).map_err(|_| SaddleError::NoRoot { best: g.norm() / scale })? * &g;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let tn = t + alpha * step[0];
            if tn <= 0.0 {
                alpha /= 2.0;
                continue;
            }
            let zn: Vec<f64> = (0..n).map(|i| z[i] + alpha * step[i + 1]).collect();
            let gn = full_gradient(model, pert, tn, &zn)?;
            // below the rounding floor the gradient cannot decrease any more
            if gn.norm() <= g.norm() || gn.norm() <= 1e-13 * scale {
                t = tn;
                z = zn;
                g = gn;
                accepted = true;
                break;
            }
            alpha /= 2.0;
        }
        iterations += 1;
        let small_step = alpha * step.norm() <= 1e-13 * (1.0 + t.abs());
        if !accepted || (g.norm() / scale <= 1e-8 && small_step) {
            break;
        }
    }
    let value = model_energy(model, t, &z)? + pert.value(t, &z);
    let distance = ((t - cert.t0).powi(2) + z.iter().map(|v| v * v).sum::<f64>()).sqrt();
    Ok(CriticalPoint { t, z, gradient_norm: g.norm() / scale, value, iterations, distance, start: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_coefficients_minimum() {
        let p = Profile::new(11, 1.0, 1.0).unwrap();
        let m = minimize_profile_coeffs(&p);
        let t0 = (8.0f64 / 9.0).powi(2);
        assert!((m.t0 - t0).abs() < 1e-14);
        assert!((m.f_at_min + t0.powi(4) / 9.0).abs() < 1e-14);
        assert!(m.hess_t > 0.0);
    }

    #[test]
    fn regime_and_zero_weyl_rejected() {
        assert!(matches!(Profile::new(10, 1.0, 1.0), Err(SaddleError::Regime(10))));
        assert!(matches!(Profile::new(11, 0.0, 1.0), Err(SaddleError::NoQuarticTerm)));
    }

    #[test]
    fn cosine_hessian_matches_gradient_differences() {
        let p = CosinePerturbation { delta: 0.3 };
        let (t, z) = (0.7, vec![0.2, -0.4, 0.1]);
        let h = p.hessian(t, &z);
        let step = 1e-5;
        for a in 0..4 {
            let mut up: Vec<f64> = std::iter::once(t).chain(z.iter().copied()).collect();
            let mut dn = up.clone();
            up[a] += step;
            dn[a] -= step;
            let gu = p.gradient(up[0], &up[1..]);
            let gd = p.gradient(dn[0], &dn[1..]);
            let gu: Vec<f64> = std::iter::once(gu.0).chain(gu.1).collect();
            let gd: Vec<f64> = std::iter::once(gd.0).chain(gd.1).collect();
            for b in 0..4 {
                let fd = (gu[b] - gd[b]) / (2.0 * step);
                assert!((fd - h[(a, b)]).abs() < 1e-8, "{a} {b}");
            }
        }
    }

    fn model(n: usize) -> ModelData {
        ModelData::new(crate::weyl::default_diagonal_weyl(n).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn quartic_model_is_corrected_coefficient_times_square_norm() {
        let m = model(11);
        let z: Vec<f64> = (0..11).map(|i| 0.01 * (i as f64 - 4.5)).collect();
        let q = m.coefficients().fourth_order_corrected * m.weyl().deformation().square_norm(&z);
        let v = quartic_model(&m, &z);
        assert!((v - q).abs() <= 1e-10 * q.abs(), "{v} {q}");
        let h = quartic_model_hessian(&m, &z);
        let step = 1e-5;
        for k in 0..11 {
            let mut up = z.clone();
            let mut dn = z.clone();
            up[k] += step;
            dn[k] -= step;
            let gu = quartic_model_gradient(&m, &up);
            let gd = quartic_model_gradient(&m, &dn);
            for l in 0..11 {
                let fd = (gu[l] - gd[l]) / (2.0 * step);
                assert!((fd - h[(k, l)]).abs() <= 1e-6 * h.abs().max().max(1.0), "{k} {l}");
            }
        }
    }

    #[test]
    fn certificate_and_locator_at_n11() {
        let m = model(11);
        let opts = SaddleOptions { rim_samples: 512, rim_starts: 8, spot_checks: 1, ..Default::default() };
        let r = certify_with_shrink(&m, &opts).unwrap();
        let c = &r.certificate;
        assert!(c.passed, "{:?}", c.failed_conditions());
        let zero = locate_critical_point(&m, c, &ZeroPerturbation).unwrap();
        assert!(zero.distance <= 1e-8, "{zero:?}");
        let pert = CosinePerturbation { delta: c.value_margin().min(c.slope_margin()) / 10.0 };
        let cp = locate_critical_point(&m, c, &pert).unwrap();
        assert!(cp.value < 0.0 && cp.gradient_norm <= 1e-8, "{cp:?}");
        let too_big = CosinePerturbation { delta: c.value_margin() };
        assert!(matches!(locate_critical_point(&m, c, &too_big), Err(SaddleError::PerturbationTooLarge { .. })));
        let wide = certify_saddle(&m, c.eta, 0.9, &opts).unwrap();
        assert!(wide.remainder_flag && !wide.passed);
    }
}
