//! The standard bubble, the kernel of its linearisation, and the explicit
//! corrector `L_ab = -(1/n) h_ab u^{-n/2}`.
//!
//! Laplacians follow the geometer's sign, `Δ = -div ∇`. Internally the
//! Euclidean `∇²` is used and negated at the boundary of each function.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{self, ExactError};
use crate::oracle::{self, DirectionRule, Integrand, OracleConfig, OracleError, OracleResult, RayFn};
use crate::weyl::WeylForm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BubbleError {
    #[error("dimension {n} is below the minimum {min}")]
    Dimension { n: usize, min: usize },
    #[error("scale t = {0} must be positive and finite")]
    Scale(f64),
    #[error("scale t = {t} lies outside the box [1/{bound}, {bound}]")]
    OutsideBox { t: f64, bound: f64 },
    #[error("center has norm {0}, expected < 1")]
    Center(f64),
    #[error("center has {got} coordinates, expected {n}")]
    CenterShape { n: usize, got: usize },
    #[error("kernel index {j} out of range 0..={n}")]
    KernelIndex { j: usize, n: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Dimension, scale and centre of `B_{t,z}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubbleParams {
    n: usize,
    t: f64,
    z: Vec<f64>,
}

impl BubbleParams {
    pub fn new(n: usize, t: f64, z: Vec<f64>) -> Result<Self, BubbleError> {
        if n < 3 {
            return Err(BubbleError::Dimension { n, min: 3 });
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(BubbleError::Scale(t));
        }
        if z.len() != n {
            return Err(BubbleError::CenterShape { n, got: z.len() });
        }
        let r = norm(&z);
        if !(r < 1.0) {
            return Err(BubbleError::Center(r));
        }
        Ok(BubbleParams { n, t, z })
    }

    /// `t = 1`, `z = 0`.
    pub fn unit(n: usize) -> Result<Self, BubbleError> {
        Self::new(n, 1.0, vec![0.0; n])
    }

    /// Also checks `t ∈ [1/bound, bound]`.
    pub fn in_box(n: usize, t: f64, z: Vec<f64>, bound: f64) -> Result<Self, BubbleError> {
        let p = Self::new(n, t, z)?;
        if t < 1.0 / bound || t > bound {
            return Err(BubbleError::OutsideBox { t, bound });
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> f64 {
        self.t
    }

    pub fn center(&self) -> &[f64] {
        &self.z
    }

    fn m(&self) -> f64 {
        let n = self.n as f64;
        n * (n - 2.0)
    }

    fn a(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    fn offset(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.z).map(|(a, b)| a - b).collect()
    }

    /// `D = t² + |x-z|²/m`.
    fn denom(&self, y: &[f64]) -> f64 {
        self.t * self.t + norm_sq(y) / self.m()
    }

    /// Critical exponent `2* = 2n/(n-2)`.
    pub fn critical_exponent(&self) -> f64 {
        let n = self.n as f64;
        2.0 * n / (n - 2.0)
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn norm(v: &[f64]) -> f64 {
    norm_sq(v).sqrt()
}

pub fn bubble_eval(p: &BubbleParams, x: &[f64]) -> f64 {
    let d = p.denom(&p.offset(x));
    (p.t / d).powf(p.a())
}

pub fn bubble_gradient(p: &BubbleParams, x: &[f64]) -> Vec<f64> {
    let y = p.offset(x);
    let nf = p.n as f64;
    let c = -(nf - 2.0) / p.m() * p.t.powf(p.a()) * p.denom(&y).powf(-nf / 2.0);
    y.iter().map(|v| c * v).collect()
}

pub fn bubble_hessian(p: &BubbleParams, x: &[f64]) -> DMatrix<f64> {
    let y = p.offset(x);
    let nf = p.n as f64;
    let m = p.m();
    let d = p.denom(&y);
    let c = -(nf - 2.0) / m * p.t.powf(p.a()) * d.powf(-nf / 2.0);
    DMatrix::from_fn(p.n, p.n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        c * (delta - nf * y[i] * y[j] / (m * d))
    })
}

/// `|-tr ∇²B - B^{2*-1}|` divided by `max(1, B^{2*-1})`.
pub fn bubble_pde_residual(p: &BubbleParams, x: &[f64]) -> f64 {
    let lhs = -bubble_hessian(p, x).trace();
    let rhs = bubble_eval(p, x).powf(p.critical_exponent() - 1.0);
    (lhs - rhs).abs() / rhs.max(1.0)
}

/// `Σ_i c_i D^{-p_i}` as a function of `s = |y|²` with `D = t² + s/m`.
struct PowerSum {
    terms: Vec<(f64, f64)>,
    t2: f64,
    m: f64,
}

impl PowerSum {
    fn value(&self, s: f64) -> f64 {
        let d = self.t2 + s / self.m;
        self.terms.iter().map(|(c, p)| c * d.powf(-p)).sum()
    }

    fn d1(&self, s: f64) -> f64 {
        let d = self.t2 + s / self.m;
        self.terms.iter().map(|(c, p)| -c * p / self.m * d.powf(-p - 1.0)).sum()
    }

    fn d2(&self, s: f64) -> f64 {
        let d = self.t2 + s / self.m;
        self.terms
            .iter()
            .map(|(c, p)| c * p * (p + 1.0) / (self.m * self.m) * d.powf(-p - 2.0))
            .sum()
    }

    /// Euclidean `∇²(P φ)` over `P` for a harmonic polynomial `P` of degree `k`.
    fn laplacian_factor(&self, n: usize, k: usize, s: f64) -> f64 {
        4.0 * s * self.d2(s) + (2.0 * n as f64 + 4.0 * k as f64) * self.d1(s)
    }
}

/// Kernel profile of `Z_j` as (harmonic prefactor degree, radial part).
fn kernel_profile(j: usize, p: &BubbleParams) -> (usize, PowerSum) {
    let a = p.a();
    let nf = p.n as f64;
    let t2 = p.t * p.t;
    let ta = p.t.powf(a);
    let terms = if j == 0 {
        // (|y|²/m - t²) D^{-n/2} = D^{1-n/2} - 2t² D^{-n/2}
        vec![(ta, nf / 2.0 - 1.0), (-2.0 * t2 * ta, nf / 2.0)]
    } else {
        vec![(ta * p.t, nf / 2.0)]
    };
    (usize::from(j > 0), PowerSum { terms, t2, m: p.m() })
}

fn check_kernel_index(j: usize, n: usize) -> Result<(), BubbleError> {
    if j > n {
        return Err(BubbleError::KernelIndex { j, n });
    }
    Ok(())
}

/// `Z_{j,t,z}(x)`: `Z_0 = (2/(n-2)) t ∂_t B` and `Z_j = n t ∂_{z_j} B` for
/// `j = 1..=n` (indices are 1-based here, as for the kernel basis).
pub fn kernel_eval(j: usize, p: &BubbleParams, x: &[f64]) -> Result<f64, BubbleError> {
    check_kernel_index(j, p.n)?;
    let y = p.offset(x);
    let (_, prof) = kernel_profile(j, p);
    let radial = prof.value(norm_sq(&y));
    Ok(if j == 0 { radial } else { y[j - 1] * radial })
}

pub fn kernel_gradient(j: usize, p: &BubbleParams, x: &[f64]) -> Result<Vec<f64>, BubbleError> {
    check_kernel_index(j, p.n)?;
    let y = p.offset(x);
    let s = norm_sq(&y);
    let (_, prof) = kernel_profile(j, p);
    let (v, d1) = (prof.value(s), prof.d1(s));
    Ok((0..p.n)
        .map(|i| {
            if j == 0 {
                2.0 * y[i] * d1
            } else {
                let delta = if i == j - 1 { v } else { 0.0 };
                delta + y[j - 1] * 2.0 * y[i] * d1
            }
        })
        .collect())
}

/// `Δ Z_j` with `Δ = -div ∇`, in closed form.
pub fn kernel_laplacian(j: usize, p: &BubbleParams, x: &[f64]) -> Result<f64, BubbleError> {
    check_kernel_index(j, p.n)?;
    let y = p.offset(x);
    let s = norm_sq(&y);
    let (k, prof) = kernel_profile(j, p);
    let pre = if j == 0 { 1.0 } else { y[j - 1] };
    Ok(-pre * prof.laplacian_factor(p.n, k, s))
}

/// `|Δ Z_j - (2*-1) B^{2*-2} Z_j|`.
pub fn kernel_pde_residual(j: usize, p: &BubbleParams, x: &[f64]) -> Result<f64, BubbleError> {
    let lap = kernel_laplacian(j, p, x)?;
    let b = bubble_eval(p, x);
    let e = p.critical_exponent();
    Ok((lap - (e - 1.0) * b.powf(e - 2.0) * kernel_eval(j, p, x)?).abs())
}

/// Largest gap between `Z_j` and its defining derivative of `B`, estimated
/// by central differences with the given step.
pub fn kernel_relation_residual(j: usize, p: &BubbleParams, x: &[f64], step: f64) -> Result<f64, BubbleError> {
    let z = kernel_eval(j, p, x)?;
    let nf = p.n as f64;
    let fd = if j == 0 {
        let up = BubbleParams { t: p.t + step, ..p.clone() };
        let dn = BubbleParams { t: p.t - step, ..p.clone() };
        2.0 / (nf - 2.0) * p.t * (bubble_eval(&up, x) - bubble_eval(&dn, x)) / (2.0 * step)
    } else {
        let mut up = p.clone();
        let mut dn = p.clone();
        up.z[j - 1] += step;
        dn.z[j - 1] -= step;
        nf * p.t * (bubble_eval(&up, x) - bubble_eval(&dn, x)) / (2.0 * step)
    };
    Ok((z - fd).abs())
}

/// `∫ Σ_ij h_ij ∂_i B ∂_j B dx`, which vanishes identically.
pub fn annihilation_integral(w: &WeylForm, p: &BubbleParams, cfg: &OracleConfig) -> Result<OracleResult, BubbleError> {
    let n = p.n;
    if n != w.dim() {
        return Err(BubbleError::CenterShape { n: w.dim(), got: n });
    }
    if n < 5 {
        return Err(BubbleError::Dimension { n, min: 5 });
    }
    let nf = n as f64;
    let m = p.m();
    let t2 = p.t * p.t;
    let pref = ((nf - 2.0) / m).powi(2) * p.t.powf(2.0 * p.a());
    let field = w.deformation();
    let z = p.z.clone();
    // along z + rθ: θᵀh(z + rθ)θ = a0 + r a1 + r² a2
    let ray = move |theta: &[f64]| -> Box<dyn Fn(f64) -> f64 + Send> {
        let quad = |m: &DMatrix<f64>| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += theta[i] * m[(i, j)] * theta[j];
                }
            }
            s
        };
        let a0 = quad(&field.eval(&z));
        let mixed = field.bilinear(&z, theta);
        let a1 = quad(&(&mixed + mixed.transpose()));
        let a2 = quad(&field.eval(theta));
        Box::new(move |r: f64| {
            let d = t2 + r * r / m;
            pref * r * r * (a0 + r * a1 + r * r * a2) * d.powf(-nf)
        })
    };
    let f = RayFn::new(n, 2.0 * nf - 4.0, ray)?;
    let mut cfg = *cfg;
    cfg.relative_floor = 0.0;
    // centring the polar coordinates at z keeps D radial
    Ok(oracle::integrate_rn(&f, &cfg)?)
}

/// `∇²h_ab = (2/3) Σ_p W_apbp`, zero for a trace-free form.
pub fn deformation_laplacian(w: &WeylForm, a: usize, b: usize) -> f64 {
    2.0 / 3.0 * (0..w.dim()).map(|p| w.get(a, p, b, p)).sum::<f64>()
}

/// The corrector `L_ab(x) = -(1/n) h_ab(x) (1 + |x|²/m)^{-n/2}` (0-based indices).
#[derive(Debug, Clone, Copy)]
pub struct CorrectorField<'a> {
    weyl: &'a WeylForm,
    a: usize,
    b: usize,
}

impl<'a> CorrectorField<'a> {
    pub fn new(weyl: &'a WeylForm, a: usize, b: usize) -> Self {
        CorrectorField { weyl, a, b }
    }

    fn consts(&self) -> (f64, f64) {
        let n = self.weyl.dim() as f64;
        (n, n * (n - 2.0))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (n, m) = self.consts();
        let u = 1.0 + norm_sq(x) / m;
        -self.weyl.deformation().entry(self.a, self.b, x) * u.powf(-n / 2.0) / n
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (n, m) = self.consts();
        let u = 1.0 + norm_sq(x) / m;
        let field = self.weyl.deformation();
        let h = field.entry(self.a, self.b, x);
        let g = field.entry_gradient(self.a, self.b, x);
        let c0 = -u.powf(-n / 2.0) / n;
        let c1 = h * u.powf(-n / 2.0 - 1.0) / m;
        g.iter().zip(x).map(|(gi, xi)| c0 * gi + c1 * xi).collect()
    }

    /// `ΔL` with `Δ = -div ∇`, using that `h_ab` is a harmonic quadratic.
    pub fn laplacian(&self, x: &[f64]) -> f64 {
        let (n, m) = self.consts();
        let s = norm_sq(x);
        let prof = PowerSum { terms: vec![(-1.0 / n, n / 2.0)], t2: 1.0, m };
        -self.weyl.deformation().entry(self.a, self.b, x) * prof.laplacian_factor(self.weyl.dim(), 2, s)
    }

    /// `ΔL - (2*-1) B^{2*-2} L + (2/m) h_ab u^{-(n+2)/2}` at `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let (n, m) = self.consts();
        let u = 1.0 + norm_sq(x) / m;
        let h = self.weyl.deformation().entry(self.a, self.b, x);
        let e = (n + 2.0) / (n - 2.0);
        self.laplacian(x) - e * u.powi(-2) * self.eval(x) + 2.0 / m * h * u.powf(-(n + 2.0) / 2.0)
    }
}

pub fn corrector_eval(w: &WeylForm, a: usize, b: usize, x: &[f64]) -> f64 {
    CorrectorField::new(w, a, b).eval(x)
}

pub fn corrector_gradient(w: &WeylForm, a: usize, b: usize, x: &[f64]) -> Vec<f64> {
    CorrectorField::new(w, a, b).gradient(x)
}

pub fn corrector_residual(w: &WeylForm, a: usize, b: usize, x: &[f64]) -> f64 {
    CorrectorField::new(w, a, b).residual(x)
}

/// The three pieces of `∫⟨∇L_ab, ∇L_cd⟩`: gradient-gradient, cross and
/// radial-radial, as multiples of `K_n^{-n} S_abcd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingBreakdown {
    pub gradient: f64,
    pub cross: f64,
    pub radial: f64,
}

impl PairingBreakdown {
    pub fn total(&self) -> f64 {
        self.gradient + self.cross + self.radial
    }
}

fn pairing_factors(n: usize) -> PairingBreakdown {
    let nf = n as f64;
    let g = 2.0 / (9.0 * nf);
    PairingBreakdown { gradient: g, cross: -g, radial: (nf + 4.0) / (36.0 * (nf + 1.0)) }
}

/// Closed form `(n+4)/(36(n+1)) K_n^{-n} Σ_pq W_apbq (W_cpdq + W_cqdp)`.
pub fn corrector_pairing(w: &WeylForm, a: usize, b: usize, c: usize, d: usize) -> Result<f64, BubbleError> {
    Ok(corrector_pairing_breakdown(w, [a, b, c, d])?.total())
}

/// Closed-form values of the three pieces.
pub fn corrector_pairing_breakdown(w: &WeylForm, idx: [usize; 4]) -> Result<PairingBreakdown, BubbleError> {
    let n = w.dim();
    if n < 7 {
        return Err(BubbleError::Dimension { n, min: 7 });
    }
    let k = exact::sobolev_mass(n)?.to_f64();
    let s = w.pair_tensor(idx[0], idx[1], idx[2], idx[3]);
    let f = pairing_factors(n);
    Ok(PairingBreakdown { gradient: f.gradient * k * s, cross: f.cross * k * s, radial: f.radial * k * s })
}

/// Oracle estimates of the pieces and of the full pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingOracle {
    pub gradient: OracleResult,
    pub cross: OracleResult,
    pub radial: OracleResult,
    pub total: OracleResult,
}

/// Quadrature of `∫⟨∇L_ab, ∇L_cd⟩ dx`, split into its three pieces.
pub fn corrector_pairing_oracle(w: &WeylForm, idx: [usize; 4], cfg: &OracleConfig) -> Result<PairingOracle, BubbleError> {
    let n = w.dim();
    if n < 7 {
        return Err(BubbleError::Dimension { n, min: 7 });
    }
    let nf = n as f64;
    let m = nf * (nf - 2.0);
    let field = w.deformation();
    let [a, b, c, d] = idx;
    let piece = |which: u8| -> Result<OracleResult, BubbleError> {
        let ray = move |theta: &[f64]| -> Box<dyn Fn(f64) -> f64 + Send> {
            let eta = field.entry(a, b, theta) * field.entry(c, d, theta);
            let gab = field.entry_gradient(a, b, theta);
            let gcd = field.entry_gradient(c, d, theta);
            let gg: f64 = gab.iter().zip(&gcd).map(|(x, y)| x * y).sum();
            Box::new(move |r: f64| {
                let u = 1.0 + r * r / m;
                let r2 = r * r;
                let g = r2 * u.powf(-nf) * gg / (nf * nf);
                let x = -4.0 * r2 * r2 * u.powf(-nf - 1.0) * eta / (nf * m);
                let q = r2 * r2 * r2 * u.powf(-nf - 2.0) * eta / (m * m);
                match which {
                    0 => g,
                    1 => x,
                    2 => q,
                    _ => g + x + q,
                }
            })
        };
        let f = RayFn::new(n, 2.0 * nf - 2.0, ray)?;
        Ok(oracle::integrate_rn(&f, cfg)?)
    };
    Ok(PairingOracle { gradient: piece(0)?, cross: piece(1)?, radial: piece(2)?, total: piece(3)? })
}

/// `∫⟨∇L_ab, ∇Z_{j,1,0}⟩ dx`, zero because `L_ab` lies in the orthogonal
/// complement of the kernel.
pub fn corrector_kernel_pairing(
    w: &WeylForm,
    a: usize,
    b: usize,
    j: usize,
    cfg: &OracleConfig,
) -> Result<OracleResult, BubbleError> {
    let n = w.dim();
    let p = BubbleParams::unit(n)?;
    check_kernel_index(j, n)?;
    let field = CorrectorField::new(w, a, b);
    let f = Integrand::new(n, 2.0 * n as f64 - 2.0, move |x: &[f64]| {
        let gl = field.gradient(x);
        let gz = kernel_gradient(j, &p, x).expect("index checked");
        gl.iter().zip(&gz).map(|(u, v)| u * v).sum()
    })?;
    let mut cfg = *cfg;
    cfg.relative_floor = 0.0;
    Ok(oracle::integrate_rn(&f, &cfg)?)
}

/// Maxima of every bubble and corrector residual over random points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubbleCheckReport {
    pub n: usize,
    pub points: usize,
    pub bubble_pde: f64,
    pub bubble_gradient_fd: f64,
    pub kernel_relation: f64,
    pub kernel_pde: f64,
    pub corrector_residual: f64,
    pub corrector_gradient_fd: f64,
    pub harmonicity: f64,
    pub annihilation: OracleResult,
    pub pairing_closed_form: f64,
    pub pairing_oracle: OracleResult,
}

impl BubbleCheckReport {
    pub fn passed(&self) -> bool {
        self.bubble_pde <= 1e-10
            && self.bubble_gradient_fd <= 1e-6
            && self.kernel_relation <= 1e-6
            && self.kernel_pde <= 1e-9
            && self.corrector_residual <= 1e-9
            && self.corrector_gradient_fd <= 1e-6
            && self.harmonicity <= 1e-12
            && self.annihilation.value.abs() <= 3.0 * self.annihilation.standard_error
            && self.pairing_oracle.z_score(self.pairing_closed_form) <= 3.0
    }
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-radius..radius)).collect()
}

/// Runs the full identity battery on random points.
pub fn bubble_check(w: &WeylForm, points: usize, seed: u64, cfg: &OracleConfig) -> Result<BubbleCheckReport, BubbleError> {
    let n = w.dim();
    if n < 7 {
        return Err(BubbleError::Dimension { n, min: 7 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = BubbleCheckReport {
        n,
        points,
        bubble_pde: 0.0,
        bubble_gradient_fd: 0.0,
        kernel_relation: 0.0,
        kernel_pde: 0.0,
        corrector_residual: 0.0,
        corrector_gradient_fd: 0.0,
        harmonicity: 0.0,
        annihilation: OracleResult {
            value: 0.0,
            standard_error: 0.0,
            sampling_error: 0.0,
            radial_error: 0.0,
            samples_used: 0,
            method: oracle::Method::SphereRadialProduct,
        },
        pairing_closed_form: 0.0,
        pairing_oracle: OracleResult {
            value: 0.0,
            standard_error: 0.0,
            sampling_error: 0.0,
            radial_error: 0.0,
            samples_used: 0,
            method: oracle::Method::SphereRadialProduct,
        },
    };
    for _ in 0..points {
        let t = rng.random_range(0.5..2.0);
        let mut z = random_point(&mut rng, n, 1.0);
        let r = norm(&z);
        z.iter_mut().for_each(|v| *v *= 0.5 / r.max(0.5));
        let p = BubbleParams::new(n, t, z)?;
        let x = random_point(&mut rng, n, 2.0);
        rep.bubble_pde = rep.bubble_pde.max(bubble_pde_residual(&p, &x));
        let g = bubble_gradient(&p, &x);
        let fd = central_gradient(&|y| bubble_eval(&p, y), &x, 1e-4);
        rep.bubble_gradient_fd = rep.bubble_gradient_fd.max(max_gap(&g, &fd));
        for j in 0..=n {
            rep.kernel_relation = rep.kernel_relation.max(kernel_relation_residual(j, &p, &x, 1e-4)?);
            rep.kernel_pde = rep.kernel_pde.max(kernel_pde_residual(j, &p, &x)?);
        }
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        let xc = random_point(&mut rng, n, 10.0 / (n as f64).sqrt());
        let corr = CorrectorField::new(w, a, b);
        rep.corrector_residual = rep.corrector_residual.max(corr.residual(&xc).abs());
        let fd = central_gradient(&|y| corr.eval(y), &x, 1e-4);
        rep.corrector_gradient_fd = rep.corrector_gradient_fd.max(max_gap(&corr.gradient(&x), &fd));
        rep.harmonicity = rep.harmonicity.max(deformation_laplacian(w, a, b).abs());
    }
    let mut z = vec![0.0; n];
    z[0] = 0.2;
    rep.annihilation = annihilation_integral(w, &BubbleParams::new(n, 1.3, z)?, cfg)?;
    let idx = [0, 1, 0, 1];
    rep.pairing_closed_form = corrector_pairing(w, idx[0], idx[1], idx[2], idx[3])?;
    let pcfg = cfg.with_rule(DirectionRule::RotatedCubature).with_relative_floor(1e-12);
    rep.pairing_oracle = corrector_pairing_oracle(w, idx, &pcfg)?.total;
    Ok(rep)
}

/// Second-order central differences of a scalar field.
pub fn central_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + step;
            let up = f(&y);
            y[i] = x[i] - step;
            let dn = f(&y);
            y[i] = x[i];
            (up - dn) / (2.0 * step)
        })
        .collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
