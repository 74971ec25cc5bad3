//! The reduced energy `F(t, z) = F1 + F2 + F3 + Λ ǔ₀ t^{(n-2)/2}` and its
//! expansion coefficients.
//!
//! `F1` and `F2` are evaluated by quadrature of their defining integrals.
//! `F3 = -(1/2)∫|∇R|²` only enters through its fourth-order Taylor model,
//! `-(1/8) Σ_abcd P_abcd z_a z_b z_c z_d` with `P_abcd = ∫⟨∇L_ab, ∇L_cd⟩`.
//!
//! Two sets of quartic coefficients are carried. The `published` ones keep
//! the value `-(n+4)/(48(n+1))` for the `F3` quartic. The `corrected` ones
//! use `-(n+4)/(16(n+1))`, which is what the pairing model and the
//! quadrature produce: the fourth derivative of `F3` sums three pairings,
//! so its Taylor term is three times larger than the published one.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num::{BigInt, BigRational, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{self, ExactError, HalfInt, RadialIntegralTable};
use crate::oracle::{self, DirectionRule, OracleConfig, OracleError, OracleResult, RayFn};
use crate::weyl::{contraction, WeylForm};

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("dimension {n} is below the minimum {min}")]
    Dimension { n: usize, min: usize },
    #[error("u0 at the blow-up point must be positive, got {0}")]
    NonPositiveU0(f64),
    #[error("scale t = {0} must be positive")]
    Scale(f64),
    #[error("center has norm {0}, expected < 1")]
    Center(f64),
    #[error("direction has norm {0}, expected 1")]
    Direction(f64),
    #[error("need at least three sample radii for the quartic fit")]
    FitPoints,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot write landscape: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write landscape: {0}")]
    Csv(#[from] csv::Error),
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ratf(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// `n(n-2)²/(72(n-4)(n-6))`, the `t⁴` coefficient of `F(t,0)` over `K_n^{-n} Σ T_kk`.
pub fn c4_factor(n: usize) -> BigRational {
    let n = n as i64;
    rat(n * (n - 2) * (n - 2), 72 * (n - 4) * (n - 6))
}

/// `1/(4n)`, the quartic coefficient of `F1 + F2`.
pub fn f1_factor(n: usize) -> BigRational {
    rat(1, 4 * n as i64)
}

/// `-(n+4)/(48(n+1))`, the published quartic coefficient of `F3`.
pub fn f3_factor_published(n: usize) -> BigRational {
    let n = n as i64;
    rat(-(n + 4), 48 * (n + 1))
}

/// `-(n+4)/(16(n+1))`, the quartic coefficient of `F3` from the pairing model.
pub fn f3_factor(n: usize) -> BigRational {
    let n = n as i64;
    rat(-(n + 4), 16 * (n + 1))
}

/// `-(n²-8n-12)/(48n(n+1))`, the published total.
pub fn fourth_order_factor_published(n: usize) -> BigRational {
    let n = n as i64;
    rat(-(n * n - 8 * n - 12), 48 * n * (n + 1))
}

/// `-(n²-4)/(16n(n+1))`, the total from the pairing model.
pub fn fourth_order_factor(n: usize) -> BigRational {
    let n = n as i64;
    rat(-(n * n - 4), 16 * n * (n + 1))
}

/// `(n-2)/(36(n-4))`, so that `F11 = t² · factor · K_n^{-n} T`.
pub fn hess2_factor(n: usize) -> BigRational {
    let n = n as i64;
    rat(n - 2, 36 * (n - 4))
}

/// Closed-form coefficients of the reduced energy for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCoefficients {
    pub n: usize,
    pub kn_pow: f64,
    pub lambda_n: f64,
    pub trace_t: f64,
    pub c4: f64,
    pub clambda: f64,
    /// Published total quartic coefficient (times `K_n^{-n}`).
    pub fourth_order: f64,
    pub fourth_order_corrected: f64,
    pub f1_quartic: f64,
    pub f3_quartic: f64,
    pub f3_quartic_corrected: f64,
    /// `F11 = t² · hess2 · T`.
    pub hess2: f64,
}

/// Weyl form, `ǔ₀(x₀)` and everything precomputed from them.
#[derive(Debug, Clone)]
pub struct ModelData {
    weyl: WeylForm,
    u0x0: f64,
    coeffs: EnergyCoefficients,
    t_matrix: DMatrix<f64>,
    /// `g_ijlp` with `∂_i h_jl(x) = Σ_p g_ijlp x_p`.
    grad_tensor: Vec<f64>,
    /// `Σ_ijl g_ijlp g_ijlq`.
    grad_gram: DMatrix<f64>,
}

impl ModelData {
    pub fn new(weyl: WeylForm, u0x0: f64) -> Result<Self, EnergyError> {
        let n = weyl.dim();
        if n < 7 {
            return Err(EnergyError::Dimension { n, min: 7 });
        }
        if !(u0x0 > 0.0 && u0x0.is_finite()) {
            return Err(EnergyError::NonPositiveU0(u0x0));
        }
        let kn_pow = exact::sobolev_mass(n)?.to_f64();
        let lambda_n = exact::lambda_constant(n)?.to_f64();
        let t_matrix = contraction(&weyl).t;
        let trace_t = t_matrix.trace();
        let coeffs = EnergyCoefficients {
            n,
            kn_pow,
            lambda_n,
            trace_t,
            c4: ratf(&c4_factor(n)) * kn_pow * trace_t,
            clambda: lambda_n * u0x0,
            fourth_order: ratf(&fourth_order_factor_published(n)) * kn_pow,
            fourth_order_corrected: ratf(&fourth_order_factor(n)) * kn_pow,
            f1_quartic: ratf(&f1_factor(n)) * kn_pow,
            f3_quartic: ratf(&f3_factor_published(n)) * kn_pow,
            f3_quartic_corrected: ratf(&f3_factor(n)) * kn_pow,
            hess2: ratf(&hess2_factor(n)) * kn_pow,
        };
        let mut grad_tensor = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for p in 0..n {
                        grad_tensor[((i * n + j) * n + l) * n + p] = (weyl.get(j, i, l, p) + weyl.get(j, p, l, i)) / 3.0;
                    }
                }
            }
        }
        let mut grad_gram = DMatrix::zeros(n, n);
        for row in grad_tensor.chunks(n) {
            for p in 0..n {
                for q in 0..n {
                    grad_gram[(p, q)] += row[p] * row[q];
                }
            }
        }
        Ok(ModelData { weyl, u0x0, coeffs, t_matrix, grad_tensor, grad_gram })
    }

    pub fn dim(&self) -> usize {
        self.weyl.dim()
    }

    pub fn weyl(&self) -> &WeylForm {
        &self.weyl
    }

    pub fn u0x0(&self) -> f64 {
        self.u0x0
    }

    pub fn coefficients(&self) -> &EnergyCoefficients {
        &self.coeffs
    }

    pub fn t_matrix(&self) -> &DMatrix<f64> {
        &self.t_matrix
    }

    fn a(&self) -> f64 {
        (self.dim() as f64 - 2.0) / 2.0
    }
}

fn check_t(t: f64) -> Result<(), EnergyError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(EnergyError::Scale(t));
    }
    Ok(())
}

/// `F(t, 0) = -c4 t⁴ + Λ ǔ₀ t^{(n-2)/2}`.
pub fn profile_t(model: &ModelData, t: f64) -> Result<f64, EnergyError> {
    check_t(t)?;
    let c = &model.coeffs;
    Ok(-c.c4 * t.powi(4) + c.clambda * t.powf(model.a()))
}

/// `∂_t F(t, 0)`; also `∂_t F(t, z)` since the quartic model does not depend on `t`.
pub fn profile_dt(model: &ModelData, t: f64) -> Result<f64, EnergyError> {
    check_t(t)?;
    let c = &model.coeffs;
    let a = model.a();
    Ok(-4.0 * c.c4 * t.powi(3) + a * c.clambda * t.powf(a - 1.0))
}

pub fn profile_dtt(model: &ModelData, t: f64) -> Result<f64, EnergyError> {
    check_t(t)?;
    let c = &model.coeffs;
    let a = model.a();
    Ok(-12.0 * c.c4 * t * t + a * (a - 1.0) * c.clambda * t.powf(a - 2.0))
}

/// The `z`-Hessian of `F` at `(t, 0)` with its two cancelling pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianAudit {
    pub t: f64,
    /// Always zero.
    pub hessian: Vec<Vec<f64>>,
    /// `F11 = (t²/36)((n-2)/(n-4)) K T`, assembled from the radial and sphere integrals of `F1`.
    pub f11: Vec<Vec<f64>>,
    /// `F22`, assembled from the radial integral of `B²` and the gradient Gram matrix of `h`.
    pub f22: Vec<Vec<f64>>,
    /// Whether the rational prefactors of `F11` and `-F22` coincide.
    pub rational_cancellation: bool,
    /// `max |F11 + F22|` relative to `max |F11|`.
    pub relative_residual: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Second `z`-derivatives of `F` at `(t, 0)`.
pub fn hessian_z(model: &ModelData, t: f64) -> Result<HessianAudit, EnergyError> {
    check_t(t)?;
    let n = model.dim();
    let ni = n as i64;
    let k = model.coeffs.kn_pow;
    let table = RadialIntegralTable::new(n, 3)?;
    let m = ni * (ni - 2);
    // F1: (1/(2n²)) · ω T/(18n(n+2)) · (m^{n/2+2}/2) I_n^{(n+2)/2}
    let i_hi = table
        .ratio(HalfInt::int(ni), HalfInt::from_twice(ni + 2))
        .expect("convergent for n >= 7");
    let f11_factor = rat(m * m, 36 * ni * ni * ni * (ni + 2)) * i_hi;
    // F2: -(n-2)/(32(n-1)) · ∫B² · 2 Σ g g, with ∫B² = K I_{n-2}^{(n-2)/2} / I_n^{(n-2)/2}
    let i_b2 = table
        .ratio(HalfInt::int(ni - 2), HalfInt::from_twice(ni - 2))
        .expect("convergent for n >= 7");
    let f22_factor = -rat(ni - 2, 32 * (ni - 1)) * i_b2 * rat(2, 1);
    // 9 Σ g g = T, so the prefactors must agree after that factor
    let rational_cancellation = f11_factor == hess2_factor(n) && f22_factor.clone() / rat(9, 1) == -hess2_factor(n);
    let f11 = &model.t_matrix * (t * t * ratf(&f11_factor) * k);
    let f22 = &model.grad_gram * (t * t * ratf(&f22_factor) * k);
    let scale = f11.amax().max(f64::MIN_POSITIVE);
    let relative_residual = if f11.amax() == 0.0 && f22.amax() == 0.0 { 0.0 } else { (&f11 + &f22).amax() / scale };
    Ok(HessianAudit {
        t,
        hessian: vec![vec![0.0; n]; n],
        f11: rows(&f11),
        f22: rows(&f22),
        rational_cancellation,
        relative_residual,
    })
}

fn check_unit(e: &[f64]) -> Result<(), EnergyError> {
    let r = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (r - 1.0).abs() > 1e-12 {
        return Err(EnergyError::Direction(r));
    }
    Ok(())
}

/// Published coefficient of `s⁴` in `F(t, s e) - F(t, 0)`.
pub fn quartic_z(model: &ModelData, e: &[f64]) -> Result<f64, EnergyError> {
    check_unit(e)?;
    Ok(model.coeffs.fourth_order * model.weyl.deformation().square_norm(e))
}

/// Coefficient of `s⁴` in `F(t, s e) - F(t, 0)` with the corrected `F3` quartic.
pub fn quartic_z_corrected(model: &ModelData, e: &[f64]) -> Result<f64, EnergyError> {
    check_unit(e)?;
    Ok(model.coeffs.fourth_order_corrected * model.weyl.deformation().square_norm(e))
}

/// `Σ_abcd S_abcd z_a z_b z_c z_d` with `S_abcd = Σ_pq W_apbq (W_cpdq + W_cqdp)`,
/// contracted directly (it equals `18 Σ_pq h_pq(z)²`).
pub fn pair_tensor_quartic(w: &WeylForm, z: &[f64]) -> f64 {
    let n = w.dim();
    let mut v = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += w.get(a, p, b, q) * z[a] * z[b];
                }
            }
            v[(p, q)] = s;
        }
    }
    let mut total = 0.0;
    for p in 0..n {
        for q in 0..n {
            total += v[(p, q)] * (v[(p, q)] + v[(q, p)]);
        }
    }
    total
}

/// Fourth-order model of `F3(t, z)`: `-(1/8) Σ P_abcd z⁴`.
pub fn f3_model(model: &ModelData, z: &[f64]) -> f64 {
    let n = model.dim() as f64;
    let pairing = (n + 4.0) / (36.0 * (n + 1.0)) * model.coeffs.kn_pow;
    -pairing * pair_tensor_quartic(&model.weyl, z) / 8.0
}

/// `F(t, z) - F(t, 0)` to fourth order: the `F1` quartic plus the `F3` model.
pub fn quartic_model(model: &ModelData, z: &[f64]) -> f64 {
    model.coeffs.f1_quartic * model.weyl.deformation().square_norm(z) + f3_model(model, z)
}

/// `z`-gradient of [`quartic_model`].
pub fn quartic_model_gradient(model: &ModelData, z: &[f64]) -> Vec<f64> {
    let q = model.coeffs.fourth_order_corrected;
    model.weyl.deformation().square_norm_gradient(z).into_iter().map(|g| q * g).collect()
}

/// `z`-Hessian of [`quartic_model`]:
/// `2q Σ_ij (∂_k h_ij ∂_l h_ij + h_ij ∂_k∂_l h_ij)`.
pub fn quartic_model_hessian(model: &ModelData, z: &[f64]) -> DMatrix<f64> {
    let n = model.dim();
    let q = model.coeffs.fourth_order_corrected;
    let g = &model.grad_tensor;
    let at = |k: usize, i: usize, j: usize, p: usize| g[((k * n + i) * n + j) * n + p];
    let h = model.weyl.deformation().eval(z);
    // dh[k][i][j] = ∂_k h_ij(z)
    let mut dh = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                dh[(k * n + i) * n + j] = (0..n).map(|p| at(k, i, j, p) * z[p]).sum();
            }
        }
    }
    DMatrix::from_fn(n, n, |k, l| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += dh[(k * n + i) * n + j] * dh[(l * n + i) * n + j] + h[(i, j)] * at(k, i, j, l);
            }
        }
        2.0 * q * s
    })
}

/// Quadrature of the `F3` quartic along a unit direction `e`:
/// `-½ ∫ |∇R_e|²` with `R_e = ½ Σ_ab e_a e_b L_ab`, integrated from the
/// corrector profile itself rather than from the pairing closed form.
pub fn f3_quartic_oracle(model: &ModelData, e: &[f64], cfg: &OracleConfig) -> Result<OracleResult, EnergyError> {
    check_unit(e)?;
    let n = model.dim();
    let nf = n as f64;
    let m = nf * (nf - 2.0);
    let w = &model.weyl;
    // g(x) = Σ_ab e_a e_b h_ab(x) = xᵀ M x
    let mm = DMatrix::from_fn(n, n, |p, q| {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += w.get(a, p, b, q) * e[a] * e[b];
            }
        }
        s / 3.0
    });
    let ray = move |theta: &[f64]| -> Box<dyn Fn(f64) -> f64 + Send> {
        let th = DVector::from_column_slice(theta);
        let mt = &mm * &th;
        let s0 = th.dot(&mt);
        let q = mt.norm_squared();
        Box::new(move |r: f64| {
            let u = 1.0 + r * r / m;
            let r2 = r * r;
            let bracket = 4.0 * u * u * q - 4.0 * u * (nf / m) * r2 * s0 * s0 + (nf / m).powi(2) * r2 * r2 * s0 * s0;
            -0.5 * bracket * r2 * u.powf(-nf - 2.0) / (4.0 * nf * nf)
        })
    };
    let f = RayFn::new(n, 2.0 * nf - 2.0, ray)?;
    Ok(oracle::integrate_rn(&f, cfg)?)
}

/// Oracle settings that suit the energy integrands: their angular parts are
/// polynomials of degree at most four, so the rotated cubature is exact in
/// angle and only the radial rule contributes error.
pub fn energy_oracle_config(n: usize, seed: u64) -> OracleConfig {
    OracleConfig {
        budget: 2 * n * n * 64,
        seed,
        rule: DirectionRule::RotatedCubature,
        radial_nodes: 64,
        batches: 32,
        relative_floor: 1e-12,
    }
}

/// `|z|` above which the quartic model of `F3` is flagged.
pub const REMAINDER_RADIUS: f64 = 0.25;

/// One evaluation of the assembled energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssembledEnergy {
    pub value: f64,
    pub standard_error: f64,
    pub f1: OracleResult,
    pub f2: OracleResult,
    pub f3_model: f64,
    pub lambda_term: f64,
    /// Set when `|z|` is too large for the quartic `F3` model.
    pub remainder_flag: bool,
}

/// `F1(t,z) = (1/4)∫ Σ h_ip h_pj ∂_iB ∂_jB` by quadrature.
pub fn f1_oracle(model: &ModelData, t: f64, z: &[f64], cfg: &OracleConfig) -> Result<OracleResult, EnergyError> {
    let n = model.dim();
    let nf = n as f64;
    let m = nf * (nf - 2.0);
    let a = model.a();
    let w = &model.weyl;
    let hz = w.deformation().eval(z);
    // c_ijq with ((H(z,θ) + H(θ,z))θ)_i = Σ_jq c_ijq θ_j θ_q
    let mut c = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for q in 0..n {
                let mut s = 0.0;
                for p in 0..n {
                    s += (w.get(i, p, j, q) + w.get(i, q, j, p)) * z[p];
                }
                c[(i * n + j) * n + q] = s / 3.0;
            }
        }
    }
    let pref = 0.25 * ((nf - 2.0) / m).powi(2) * t.powf(2.0 * a);
    let t2 = t * t;
    let ray = move |theta: &[f64]| -> Box<dyn Fn(f64) -> f64 + Send> {
        let v0: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hz[(i, j)] * theta[j]).sum()).collect();
        let v1: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..n {
                    let row = &c[(i * n + j) * n..(i * n + j + 1) * n];
                    s += theta[j] * row.iter().zip(theta).map(|(x, y)| x * y).sum::<f64>();
                }
                s
            })
            .collect();
        let q0: f64 = v0.iter().map(|x| x * x).sum();
        let q1: f64 = v0.iter().zip(&v1).map(|(x, y)| 2.0 * x * y).sum();
        let q2: f64 = v1.iter().map(|x| x * x).sum();
        Box::new(move |r: f64| {
            let d = t2 + r * r / m;
            pref * r * r * (q0 + r * q1 + r * r * q2) * d.powf(-nf)
        })
    };
    let f = RayFn::new(n, 2.0 * nf - 4.0, ray)?;
    Ok(oracle::integrate_rn(&f, cfg)?)
}

/// `F2(t,z) = -(n-2)/(32(n-1)) ∫ Σ (∂_i h_jl)² B² dx` by quadrature.
pub fn f2_oracle(model: &ModelData, t: f64, z: &[f64], cfg: &OracleConfig) -> Result<OracleResult, EnergyError> {
    let n = model.dim();
    let nf = n as f64;
    let m = nf * (nf - 2.0);
    let a = model.a();
    // ∂h(z + rθ) = G(z) + r G(θ)
    let gz: Vec<f64> = model
        .grad_tensor
        .chunks(n)
        .map(|row| row.iter().zip(z).map(|(x, y)| x * y).sum())
        .collect();
    let gz2: f64 = gz.iter().map(|x| x * x).sum();
    let mut v = vec![0.0; n];
    for (row, g) in model.grad_tensor.chunks(n).zip(&gz) {
        for p in 0..n {
            v[p] += g * row[p];
        }
    }
    let gram = model.grad_gram.clone();
    let pref = -(nf - 2.0) / (32.0 * (nf - 1.0)) * t.powf(2.0 * a);
    let t2 = t * t;
    let ray = move |theta: &[f64]| -> Box<dyn Fn(f64) -> f64 + Send> {
        let lin: f64 = 2.0 * v.iter().zip(theta).map(|(x, y)| x * y).sum::<f64>();
        let quad: f64 = (0..n)
            .map(|p| theta[p] * (0..n).map(|q| gram[(p, q)] * theta[q]).sum::<f64>())
            .sum();
        Box::new(move |r: f64| {
            let d = t2 + r * r / m;
            pref * (gz2 + r * lin + r * r * quad) * d.powf(2.0 - nf)
        })
    };
    let f = RayFn::new(n, 2.0 * nf - 6.0, ray)?;
    Ok(oracle::integrate_rn(&f, cfg)?)
}

/// `F(t, z)` with `F1`, `F2` by quadrature and `F3` by its quartic model.
pub fn f_assembled(model: &ModelData, t: f64, z: &[f64], cfg: &OracleConfig) -> Result<AssembledEnergy, EnergyError> {
    check_t(t)?;
    let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(r < 1.0) || z.len() != model.dim() {
        return Err(EnergyError::Center(r));
    }
    let f1 = f1_oracle(model, t, z, cfg)?;
    let f2 = f2_oracle(model, t, z, cfg)?;
    let f3 = f3_model(model, z);
    let lambda_term = model.coeffs.clambda * t.powf(model.a());
    Ok(AssembledEnergy {
        value: f1.value + f2.value + f3 + lambda_term,
        standard_error: (f1.standard_error.powi(2) + f2.standard_error.powi(2)).sqrt(),
        f1,
        f2,
        f3_model: f3,
        lambda_term,
        remainder_flag: r > REMAINDER_RADIUS,
    })
}

/// Like [`f_assembled`] but fails when the error estimate exceeds `bound`.
pub fn f_assembled_bounded(
    model: &ModelData,
    t: f64,
    z: &[f64],
    cfg: &OracleConfig,
    bound: f64,
) -> Result<AssembledEnergy, EnergyError> {
    let v = f_assembled(model, t, z, cfg)?;
    if v.standard_error > bound {
        return Err(OracleError::NotConverged { error: v.standard_error, bound }.into());
    }
    Ok(v)
}

/// Least-squares fit of `F(t, s e) - F(t, 0)` by `a2 s² + a4 s⁴ + a6 s⁶`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticFit {
    pub t: f64,
    pub direction: Vec<f64>,
    pub radii: Vec<f64>,
    pub a2: f64,
    pub a4: f64,
    pub a6: f64,
    /// `a4 / (K_n^{-n} Σ h_pq(e)²)`.
    pub normalized: f64,
    pub published: f64,
    pub corrected: f64,
    pub relative_error_published: f64,
    pub relative_error_corrected: f64,
    /// Largest oracle error among the differences used.
    pub noise: f64,
}

pub fn fit_quartic(
    model: &ModelData,
    t: f64,
    e: &[f64],
    radii: &[f64],
    cfg: &OracleConfig,
) -> Result<QuarticFit, EnergyError> {
    check_unit(e)?;
    if radii.len() < 3 {
        return Err(EnergyError::FitPoints);
    }
    let base = f_assembled(model, t, &vec![0.0; e.len()], cfg)?;
    let mut a = DMatrix::zeros(radii.len(), 3);
    let mut b = DMatrix::zeros(radii.len(), 1);
    let mut noise = 0f64;
    for (k, &s) in radii.iter().enumerate() {
        let z: Vec<f64> = e.iter().map(|v| s * v).collect();
        let f = f_assembled(model, t, &z, cfg)?;
        let s2 = s * s;
        a[(k, 0)] = s2;
        a[(k, 1)] = s2 * s2;
        a[(k, 2)] = s2 * s2 * s2;
        b[(k, 0)] = f.value - base.value;
        noise = noise.max(f.standard_error + base.standard_error);
    }
    let sol = a.svd(true, true).solve(&b, 1e-300).expect("full SVD");
    let k = model.coeffs.kn_pow;
    let hn = model.weyl.deformation().square_norm(e);
    let normalized = sol[(1, 0)] / (k * hn);
    let published = ratf(&fourth_order_factor_published(model.dim()));
    let corrected = ratf(&fourth_order_factor(model.dim()));
    Ok(QuarticFit {
        t,
        direction: e.to_vec(),
        radii: radii.to_vec(),
        a2: sol[(0, 0)],
        a4: sol[(1, 0)],
        a6: sol[(2, 0)],
        normalized,
        published,
        corrected,
        relative_error_published: ((normalized - published) / published).abs(),
        relative_error_corrected: ((normalized - corrected) / corrected).abs(),
        noise,
    })
}

/// Second central difference of `F` along `e` at `z = 0`, and its
/// Richardson extrapolation (which removes the quartic contribution).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianProbe {
    pub step: f64,
    pub raw: f64,
    pub extrapolated: f64,
    pub noise_floor: f64,
}

pub fn hessian_probe(model: &ModelData, t: f64, e: &[f64], step: f64, cfg: &OracleConfig) -> Result<HessianProbe, EnergyError> {
    check_unit(e)?;
    let f = |s: f64| -> Result<AssembledEnergy, EnergyError> {
        let z: Vec<f64> = e.iter().map(|v| s * v).collect();
        f_assembled(model, t, &z, cfg)
    };
    let f0 = f(0.0)?;
    let (p1, m1, p2, m2) = (f(step)?, f(-step)?, f(2.0 * step)?, f(-2.0 * step)?);
    let d = |p: &AssembledEnergy, m: &AssembledEnergy, h: f64| (p.value - 2.0 * f0.value + m.value) / (h * h);
    let raw = d(&p1, &m1, step);
    let wide = d(&p2, &m2, 2.0 * step);
    let extrapolated = (4.0 * raw - wide) / 3.0;
    let se = |p: &AssembledEnergy, m: &AssembledEnergy, h: f64| {
        (p.standard_error.powi(2) + 4.0 * f0.standard_error.powi(2) + m.standard_error.powi(2)).sqrt() / (h * h)
    };
    let noise_floor = (16.0 * se(&p1, &m1, step).powi(2) + se(&p2, &m2, 2.0 * step).powi(2)).sqrt() / 3.0;
    Ok(HessianProbe { step, raw, extrapolated, noise_floor })
}

/// Finite-difference mixed derivatives `∂_t∂_z F` and `∂_t∂³_z F` at `z = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedAudit {
    pub t: f64,
    /// One entry per probed direction.
    pub dt_dz: Vec<f64>,
    pub dt_dz3: Vec<f64>,
    pub noise_dt_dz: Vec<f64>,
    pub noise_dt_dz3: Vec<f64>,
    pub passed: bool,
}

/// Probes the coordinate axes `e_0..e_{axes-1}` and the diagonal of the
/// first three axes.
pub fn mixed_derivative_audit(
    model: &ModelData,
    t: f64,
    axes: usize,
    cfg: &OracleConfig,
) -> Result<MixedAudit, EnergyError> {
    check_t(t)?;
    let n = model.dim();
    let mut dirs: Vec<Vec<f64>> = (0..axes.min(n))
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut diag = vec![0.0; n];
    diag.iter_mut().take(3).for_each(|v| *v = 1.0 / 3f64.sqrt());
    dirs.push(diag);
    let (ht, hz) = (1e-3 * t, 2e-2);
    let mut out = MixedAudit { t, dt_dz: vec![], dt_dz3: vec![], noise_dt_dz: vec![], noise_dt_dz3: vec![], passed: true };
    for e in &dirs {
        let eval = |tt: f64, s: f64| -> Result<AssembledEnergy, EnergyError> {
            let z: Vec<f64> = e.iter().map(|v| s * v).collect();
            f_assembled(model, tt, &z, cfg)
        };
        // first derivative in z: (f(h) - f(-h))/2h; third: (f(2h) - 2f(h) + 2f(-h) - f(-2h))/(2h³)
        let mut d1 = [0.0; 2];
        let mut d3 = [0.0; 2];
        let mut n1 = 0f64;
        let mut n3 = 0f64;
        for (k, tt) in [t + ht, t - ht].into_iter().enumerate() {
            let (p1, m1, p2, m2) = (eval(tt, hz)?, eval(tt, -hz)?, eval(tt, 2.0 * hz)?, eval(tt, -2.0 * hz)?);
            d1[k] = (p1.value - m1.value) / (2.0 * hz);
            d3[k] = (p2.value - 2.0 * p1.value + 2.0 * m1.value - m2.value) / (2.0 * hz.powi(3));
            n1 += (p1.standard_error.powi(2) + m1.standard_error.powi(2)) / (2.0 * hz).powi(2);
            n3 += (p2.standard_error.powi(2)
                + 4.0 * p1.standard_error.powi(2)
                + 4.0 * m1.standard_error.powi(2)
                + m2.standard_error.powi(2))
                / (2.0 * hz.powi(3)).powi(2);
        }
        let a = (d1[0] - d1[1]) / (2.0 * ht);
        let b = (d3[0] - d3[1]) / (2.0 * ht);
        let na = n1.sqrt() / (2.0 * ht);
        let nb = n3.sqrt() / (2.0 * ht);
        out.passed &= a.abs() <= 10.0 * na && b.abs() <= 10.0 * nb;
        out.dt_dz.push(a);
        out.dt_dz3.push(b);
        out.noise_dt_dz.push(na);
        out.noise_dt_dz3.push(nb);
    }
    Ok(out)
}

/// One row of the landscape CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub t: f64,
    pub s: f64,
    #[serde(rename = "direction-index")]
    pub direction_index: usize,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "F_err")]
    pub f_err: f64,
}

/// `count` evenly spaced points in `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect(),
    }
}

/// Samples `F(t, s e_d)` on a grid.
pub fn landscape(
    model: &ModelData,
    ts: &[f64],
    ss: &[f64],
    directions: &[Vec<f64>],
    cfg: &OracleConfig,
) -> Result<Vec<LandscapeRow>, EnergyError> {
    let mut rows = Vec::with_capacity(ts.len() * ss.len() * directions.len());
    for (d, e) in directions.iter().enumerate() {
        check_unit(e)?;
        for &t in ts {
            for &s in ss {
                let z: Vec<f64> = e.iter().map(|v| s * v).collect();
                let f = f_assembled(model, t, &z, cfg)?;
                rows.push(LandscapeRow { t, s, direction_index: d, f: f.value, f_err: f.standard_error });
            }
        }
    }
    Ok(rows)
}

pub fn write_landscape<W: Write>(rows: &[LandscapeRow], out: W) -> Result<(), EnergyError> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::default_diagonal_weyl;

    #[test]
    fn published_rational_identity() {
        for n in 7..65 {
            assert_eq!(f1_factor(n) + f3_factor_published(n), fourth_order_factor_published(n));
            assert_eq!(f1_factor(n) + f3_factor(n), fourth_order_factor(n));
        }
        assert_eq!(-fourth_order_factor_published(11), rat(7, 2112));
    }

    #[test]
    fn pair_quartic_is_eighteen_h_squared() {
        let w = default_diagonal_weyl(8).unwrap();
        let z = [0.3, -0.1, 0.7, 0.2, 0.0, -0.5, 0.4, 0.1];
        let lhs = pair_tensor_quartic(&w, &z);
        let rhs = 18.0 * w.deformation().square_norm(&z);
        assert!((lhs - rhs).abs() < 1e-12 * rhs, "{lhs} {rhs}");
    }

    #[test]
    fn hessian_pieces_cancel() {
        let m = ModelData::new(default_diagonal_weyl(11).unwrap(), 1.0).unwrap();
        let h = hessian_z(&m, 1.3).unwrap();
        assert!(h.rational_cancellation);
        assert!(h.relative_residual < 1e-12, "{}", h.relative_residual);
    }

    #[test]
    fn rejects_small_dimension_and_bad_u0() {
        let w = default_diagonal_weyl(6).unwrap();
        assert!(matches!(ModelData::new(w, 1.0), Err(EnergyError::Dimension { .. })));
        let w = default_diagonal_weyl(11).unwrap();
        assert!(matches!(ModelData::new(w, 0.0), Err(EnergyError::NonPositiveU0(_))));
    }

    #[test]
    fn f3_quartic_quadrature_matches_three_pairings() {
        let model = ModelData::new(crate::weyl::default_diagonal_weyl(11).unwrap(), 1.0).unwrap();
        let mut e = vec![0.0; 11];
        e[0] = 0.6;
        e[3] = 0.8;
        let q = f3_quartic_oracle(&model, &e, &energy_oracle_config(11, 5)).unwrap();
        let sq = model.weyl().deformation().square_norm(&e);
        let c = model.coefficients();
        assert!(q.z_score(c.f3_quartic_corrected * sq) < 3.0, "{q:?} {}", c.f3_quartic_corrected * sq);
        assert!(q.z_score(c.f3_quartic * sq) > 100.0);
    }
}
