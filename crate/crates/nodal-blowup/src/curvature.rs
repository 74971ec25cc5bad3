//! Curvature of the deformed metric `exp(ε χ h)` by finite differences.
//!
//! Conventions: `Γ^l_ij` is stored at `(l, i, j)`, `R_abcd` is the fully
//! covariant tensor with `Ric_bd = g^{ac} R_abcd`, and the round sphere has
//! positive scalar curvature.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::weyl::WeylForm;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("eps must be finite and nonnegative, got {0}")]
    Amplitude(f64),
    #[error("cutoff radius must be positive, got {0}")]
    Radius(f64),
    #[error("point has dimension {got}, field has {want}")]
    Dimension { got: usize, want: usize },
    #[error("finite-difference step must be positive, got {0}")]
    Step(f64),
    #[error("stencil of half-width {reach} around the point leaves the smooth region")]
    StencilOutOfDomain { reach: f64 },
    #[error("need at least two amplitudes, sorted by halving")]
    Amplitudes,
}

/// Smooth step: 1 on `[0, 1]`, 0 on `[2, ∞)`.
pub fn cutoff(s: f64) -> f64 {
    let psi = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let a = psi(2.0 - s);
        a / (a + psi(s - 1.0))
    }
}

/// `ĝ(x) = exp(ε χ(|x-y|/r) h(x-y))`.
#[derive(Debug, Clone)]
pub struct MetricField {
    weyl: WeylForm,
    eps: f64,
    radius: f64,
    center: Vec<f64>,
}

impl MetricField {
    pub fn new(weyl: WeylForm, eps: f64, radius: f64, center: Vec<f64>) -> Result<Self, CurvatureError> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(CurvatureError::Amplitude(eps));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CurvatureError::Radius(radius));
        }
        if center.len() != weyl.dim() {
            return Err(CurvatureError::Dimension { got: center.len(), want: weyl.dim() });
        }
        Ok(MetricField { weyl, eps, radius, center })
    }

    /// Centre at the origin, radius 1.
    pub fn centered(weyl: WeylForm, eps: f64) -> Result<Self, CurvatureError> {
        let n = weyl.dim();
        Self::new(weyl, eps, 1.0, vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.weyl.dim()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn weyl(&self) -> &WeylForm {
        &self.weyl
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self, CurvatureError> {
        Self::new(self.weyl.clone(), eps, self.radius, self.center.clone())
    }

    fn offset(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(a, b)| a - b).collect()
    }

    /// The exponent `ε χ h(x-y)`: symmetric and trace-free.
    pub fn exponent(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.offset(x);
        let r = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let chi = cutoff(r / self.radius);
        if chi == 0.0 || self.eps == 0.0 {
            return DMatrix::zeros(self.dim(), self.dim());
        }
        self.weyl.deformation().eval(&d) * (self.eps * chi)
    }

    /// `(ĝ, ĝ⁻¹)`; the inverse is `exp(-A)` for the same exponent `A`.
    pub fn metric_eval(&self, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>), CurvatureError> {
        if x.len() != self.dim() {
            return Err(CurvatureError::Dimension { got: x.len(), want: self.dim() });
        }
        let a = self.exponent(x);
        Ok((symmetric_exp(&a), symmetric_exp(&(-a))))
    }

    pub fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        symmetric_exp(&self.exponent(x))
    }

    /// `ĝ(x) - I`.
    pub fn deviation(&self, x: &[f64]) -> DMatrix<f64> {
        symmetric_expm1(&self.exponent(x))
    }

    /// Distance from `x` to where the cutoff stops being smooth enough
    /// for polynomial stencils, i.e. the `χ ≡ 1` ball.
    fn inner_margin(&self, x: &[f64]) -> f64 {
        let d = self.offset(x);
        self.radius - d.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn symmetric_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    symmetric_expm1(a) + DMatrix::identity(a.nrows(), a.ncols())
}

/// `exp(A) - I`, kept away from the identity so that small exponents keep
/// their relative accuracy. Squaring uses `(I + X)² - I = 2X + X²`.
pub fn symmetric_expm1(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.norm();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.125 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * scale;
    let mut term = b.clone();
    let mut sum = b.clone();
    for k in 2..=14 {
        term = &term * &b / k as f64;
        sum += &term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * 2.0 + &sum * &sum;
    }
    // restore exact symmetry
    (&sum + sum.transpose()) * 0.5
}

/// Curvature quantities at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvaturePack {
    pub n: usize,
    /// `Γ^l_ij` at `(l * n + i) * n + j`.
    pub christoffel: Vec<f64>,
    /// `R_abcd` row-major.
    pub riemann: Vec<f64>,
    #[serde(skip)]
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// Riemann minus the Schouten part; row-major like `riemann`.
    pub weyl_part: Vec<f64>,
    /// Largest entry of the change in `weyl_part` between steps `h` and `2h`, over 15.
    pub discretization_error: f64,
}

impl CurvaturePack {
    pub fn christoffel(&self, l: usize, i: usize, j: usize) -> f64 {
        self.christoffel[(l * self.n + i) * self.n + j]
    }

    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riemann[idx4(self.n, a, b, c, d)]
    }

    pub fn weyl_part(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.weyl_part[idx4(self.n, a, b, c, d)]
    }
}

#[inline]
fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

// 4th-order central weights for the first derivative on offsets ±1, ±2
const D1: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
// and for the second derivative on offsets 0, ±1, ±2
const D2: [(f64, f64); 5] =
    [(-2.0, -1.0 / 12.0), (-1.0, 16.0 / 12.0), (0.0, -30.0 / 12.0), (1.0, 16.0 / 12.0), (2.0, -1.0 / 12.0)];

struct MetricJet {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    /// `∂_k g_ij` at `k`.
    dg: Vec<DMatrix<f64>>,
    /// `∂_k ∂_l g_ij` at `k * n + l`.
    ddg: Vec<DMatrix<f64>>,
}

fn jet(m: &MetricField, x: &[f64], step: f64) -> MetricJet {
    let n = m.dim();
    // differences of ĝ - I against the centre value: a flat metric stays
    // exactly flat and rounding scales with ε
    let d0 = m.deviation(x);
    let shifted = |moves: &[(usize, f64)]| {
        let mut p = x.to_vec();
        for &(k, s) in moves {
            p[k] += s * step;
        }
        m.deviation(&p) - &d0
    };
    let dg: Vec<DMatrix<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = DMatrix::zeros(n, n);
            for &(o, w) in &D1 {
                acc += shifted(&[(k, o)]) * w;
            }
            acc / step
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k..n).map(move |l| (k, l))).collect();
    let upper: Vec<DMatrix<f64>> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let mut acc = DMatrix::zeros(n, n);
            if k == l {
                for &(o, w) in &D2 {
                    acc += shifted(&[(k, o)]) * w;
                }
            } else {
                for &(o1, w1) in &D1 {
                    for &(o2, w2) in &D1 {
                        acc += shifted(&[(k, o1), (l, o2)]) * (w1 * w2);
                    }
                }
            }
            acc / (step * step)
        })
        .collect();
    let mut ddg = vec![DMatrix::zeros(n, n); n * n];
    for (&(k, l), d) in pairs.iter().zip(upper) {
        ddg[l * n + k] = d.clone();
        ddg[k * n + l] = d;
    }
    let ginv = symmetric_exp(&(-m.exponent(x)));
    MetricJet { g: d0 + DMatrix::identity(n, n), ginv, dg, ddg }
}

fn pack_from_jet(j: &MetricJet) -> CurvaturePack {
    let n = j.g.nrows();
    // Γ_kij = ½(∂_i g_jk + ∂_j g_ik - ∂_k g_ij), first kind
    let mut first = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for jj in 0..n {
                first[(k * n + i) * n + jj] = 0.5 * (j.dg[i][(jj, k)] + j.dg[jj][(i, k)] - j.dg[k][(i, jj)]);
            }
        }
    }
    let mut christoffel = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for jj in 0..n {
                christoffel[(l * n + i) * n + jj] = (0..n).map(|k| j.ginv[(l, k)] * first[(k * n + i) * n + jj]).sum();
            }
        }
    }
    let gam = |l: usize, i: usize, jj: usize| christoffel[(l * n + i) * n + jj];
    let first_kind = |k: usize, i: usize, jj: usize| first[(k * n + i) * n + jj];
    let dd = |a: usize, b: usize, i: usize, jj: usize| j.ddg[a * n + b][(i, jj)];
    // R_abcd = ½(∂_b∂_c g_ad + ∂_a∂_d g_bc - ∂_a∂_c g_bd - ∂_b∂_d g_ac)
    //          + Γ^e_bc Γ_{e,ad} - Γ^e_bd Γ_{e,ac}
    let mut riemann = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let second = 0.5 * (dd(b, c, a, d) + dd(a, d, b, c) - dd(a, c, b, d) - dd(b, d, a, c));
                    let quad: f64 = (0..n)
                        .map(|e| gam(e, b, c) * first_kind(e, a, d) - gam(e, b, d) * first_kind(e, a, c))
                        .sum();
                    riemann[idx4(n, a, b, c, d)] = second + quad;
                }
            }
        }
    }
    let ricci = DMatrix::from_fn(n, n, |b, d| {
        let mut s = 0.0;
        for a in 0..n {
            for c in 0..n {
                s += j.ginv[(a, c)] * riemann[idx4(n, a, b, c, d)];
            }
        }
        s
    });
    let scalar: f64 = (0..n).flat_map(|b| (0..n).map(move |d| (b, d))).map(|(b, d)| j.ginv[(b, d)] * ricci[(b, d)]).sum();
    let weyl_part = weyl_decomposition(&riemann, &ricci, scalar, &j.g);
    CurvaturePack { n, christoffel, riemann, ricci, scalar, weyl_part, discretization_error: 0.0 }
}

/// `Rm - P ⊙ g` with Schouten `P = (Ric - Scal g / (2(n-1))) / (n-2)`.
fn weyl_decomposition(riemann: &[f64], ricci: &DMatrix<f64>, scalar: f64, g: &DMatrix<f64>) -> Vec<f64> {
    let n = g.nrows();
    let nf = n as f64;
    let p = (ricci - g * (scalar / (2.0 * (nf - 1.0)))) / (nf - 2.0);
    let mut out = riemann.to_vec();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let kn = p[(a, c)] * g[(b, d)] + p[(b, d)] * g[(a, c)] - p[(a, d)] * g[(b, c)] - p[(b, c)] * g[(a, d)];
                    out[idx4(n, a, b, c, d)] -= kn;
                }
            }
        }
    }
    out
}

/// Curvature at `x`, with a step-doubling error estimate.
pub fn curvature(m: &MetricField, x: &[f64], step: f64) -> Result<CurvaturePack, CurvatureError> {
    if x.len() != m.dim() {
        return Err(CurvatureError::Dimension { got: x.len(), want: m.dim() });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CurvatureError::Step(step));
    }
    // a mixed stencil reaches 2√2 steps; the coarse one twice that
    let reach = 4.0 * std::f64::consts::SQRT_2 * step;
    if m.inner_margin(x) < reach {
        return Err(CurvatureError::StencilOutOfDomain { reach });
    }
    let mut pack = pack_from_jet(&jet(m, x, step));
    let coarse = pack_from_jet(&jet(m, x, 2.0 * step));
    pack.discretization_error = pack
        .weyl_part
        .iter()
        .zip(&coarse.weyl_part)
        .chain(pack.riemann.iter().zip(&coarse.riemann))
        .map(|(a, b)| (a - b).abs() / 15.0)
        .fold(0.0, f64::max);
    Ok(pack)
}

/// Largest violations of the algebraic identities of a curvature pack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryAudit {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    pub ricci_symmetry: f64,
    /// Largest trace `g^{ac} W_abcd` of the Weyl part.
    pub weyl_trace: f64,
}

impl SymmetryAudit {
    pub fn max(&self) -> f64 {
        [self.antisymmetry, self.pair_symmetry, self.bianchi, self.ricci_symmetry, self.weyl_trace]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn symmetry_audit(pack: &CurvaturePack, ginv: &DMatrix<f64>) -> SymmetryAudit {
    let n = pack.n;
    let r = |a, b, c, d| pack.riemann(a, b, c, d);
    let mut s = SymmetryAudit { antisymmetry: 0.0, pair_symmetry: 0.0, bianchi: 0.0, ricci_symmetry: 0.0, weyl_trace: 0.0 };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    s.antisymmetry = s.antisymmetry.max((r(a, b, c, d) + r(b, a, c, d)).abs()).max((r(a, b, c, d) + r(a, b, d, c)).abs());
                    s.pair_symmetry = s.pair_symmetry.max((r(a, b, c, d) - r(c, d, a, b)).abs());
                    s.bianchi = s.bianchi.max((r(a, b, c, d) + r(a, c, d, b) + r(a, d, b, c)).abs());
                }
            }
        }
        for b in 0..n {
            s.ricci_symmetry = s.ricci_symmetry.max((pack.ricci[(a, b)] - pack.ricci[(b, a)]).abs());
        }
    }
    for b in 0..n {
        for d in 0..n {
            let mut t = 0.0;
            for a in 0..n {
                for c in 0..n {
                    t += ginv[(a, c)] * pack.weyl_part(a, b, c, d);
                }
            }
            s.weyl_trace = s.weyl_trace.max(t.abs());
        }
    }
    s
}

/// Remainders of the three expansions and the Weyl linearization at one
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionRemainders {
    pub eps: f64,
    /// `max |ĝ^{ij} - (δ - εh + ε²h²/2)|`.
    pub inverse: f64,
    /// `max |Γ^l_ij - (ε/2)(∂_i h_jl + ∂_j h_il - ∂_l h_ij)|`.
    pub christoffel: f64,
    /// `|Scal + (ε²/4) Σ (∂_i h_jl)²|`.
    pub scalar: f64,
    /// `max |Weyl(ĝ)/ε + W|`.
    pub weyl_deviation: f64,
    /// The leading term `(ε²/4) Σ (∂_i h_jl)²`.
    pub scalar_leading: f64,
}

pub fn expansion_remainders(m: &MetricField, x: &[f64], step: f64) -> Result<ExpansionRemainders, CurvatureError> {
    let n = m.dim();
    let eps = m.eps();
    let d = m.offset(x);
    let field = m.weyl().deformation();
    let h = field.eval(&d);
    let (_, ginv) = m.metric_eval(x)?;
    let approx = DMatrix::identity(n, n) - &h * eps + (&h * &h) * (eps * eps / 2.0);
    let inverse = (ginv - approx).amax();

    let pack = curvature(m, x, step)?;
    let dh = field.gradient(&d);
    let mut christoffel = 0f64;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let lead = 0.5 * eps * (dh.get(i, j, l) + dh.get(j, i, l) - dh.get(l, i, j));
                christoffel = christoffel.max((pack.christoffel(l, i, j) - lead).abs());
            }
        }
    }
    let scalar_leading = eps * eps / 4.0 * dh.norm_sq();
    let scalar = (pack.scalar + scalar_leading).abs();
    let weyl_deviation = if eps == 0.0 {
        pack.weyl_part.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    } else {
        let w = m.weyl();
        let mut dev = 0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for dd in 0..n {
                        dev = dev.max((pack.weyl_part(a, b, c, dd) / eps + w.get(a, b, c, dd)).abs());
                    }
                }
            }
        }
        dev
    };
    Ok(ExpansionRemainders { eps, inverse, christoffel, scalar, weyl_deviation, scalar_leading })
}

/// Step used for the expansion checks. The `O(ε)` and `O(ε²)` parts of the
/// metric are polynomials of degree 2 and 4, which the stencils
/// differentiate exactly, so a coarse step costs nothing in truncation and
/// keeps rounding far below the `O(ε³)` remainders.
pub const EXPANSION_STEP: f64 = 2e-2;

/// Remainder ratios between consecutive halved amplitudes at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub point: Vec<f64>,
    pub distance: f64,
    pub rows: Vec<ExpansionRemainders>,
    pub inverse_ratios: Vec<f64>,
    pub christoffel_ratios: Vec<f64>,
    pub scalar_ratios: Vec<f64>,
    /// Ratios of `scalar / scalar_leading`, i.e. of the remainder relative to the leading term.
    pub scalar_relative_ratios: Vec<f64>,
    pub weyl_ratios: Vec<f64>,
}

pub fn expansion_check(m: &MetricField, x: &[f64], eps: &[f64], step: f64) -> Result<ExpansionReport, CurvatureError> {
    if eps.len() < 2 {
        return Err(CurvatureError::Amplitudes);
    }
    let rows = eps
        .iter()
        .map(|&e| expansion_remainders(&m.with_eps(e)?, x, step))
        .collect::<Result<Vec<_>, _>>()?;
    let ratios = |f: &dyn Fn(&ExpansionRemainders) -> f64| rows.windows(2).map(|w| f(&w[0]) / f(&w[1])).collect::<Vec<_>>();
    let d = m.offset(x);
    Ok(ExpansionReport {
        point: x.to_vec(),
        distance: d.iter().map(|v| v * v).sum::<f64>().sqrt(),
        inverse_ratios: ratios(&|r| r.inverse),
        christoffel_ratios: ratios(&|r| r.christoffel),
        scalar_ratios: ratios(&|r| r.scalar),
        scalar_relative_ratios: ratios(&|r| r.scalar / r.scalar_leading),
        weyl_ratios: ratios(&|r| r.weyl_deviation),
        rows,
    })
}

/// `max |Weyl(ĝ)(x)/ε + W|` at `x = y + offset`.
pub fn weyl_linearization(m: &MetricField, offset: &[f64], step: f64) -> Result<f64, CurvatureError> {
    let x: Vec<f64> = m.center().iter().zip(offset).map(|(a, b)| a + b).collect();
    Ok(expansion_remainders(m, &x, step)?.weyl_deviation)
}

/// A fixed point at distance `r` from the centre, along the normalised
/// direction `(1, 2, ..., n)`.
pub fn reference_point(m: &MetricField, r: f64) -> Vec<f64> {
    let n = m.dim();
    let norm = (1..=n).map(|i| (i * i) as f64).sum::<f64>().sqrt();
    m.center().iter().enumerate().map(|(i, c)| c + r * (i + 1) as f64 / norm).collect()
}

/// Random points with `|x - y|` uniform in `[lo, hi]`.
pub fn sample_points(m: &MetricField, count: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.dim();
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let r = rng.random_range(lo..=hi);
            m.center().iter().zip(&v).map(|(c, a)| c + r * a / norm).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::default_diagonal_weyl;

    #[test]
    fn cutoff_is_a_smooth_step() {
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
        assert!(cutoff(1.2) > cutoff(1.7));
    }

    #[test]
    fn flat_metric_has_no_curvature() {
        let m = MetricField::centered(default_diagonal_weyl(7).unwrap(), 0.0).unwrap();
        let p = curvature(&m, &reference_point(&m, 0.3), 1e-3).unwrap();
        assert!(p.riemann.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(p.scalar, 0.0);
    }

    #[test]
    fn det_one_and_identities() {
        let w = default_diagonal_weyl(7).unwrap();
        let m = MetricField::centered(w, 0.05).unwrap();
        for x in sample_points(&m, 10, 0.0, 0.9, 3) {
            let (g, ginv) = m.metric_eval(&x).unwrap();
            assert!((g.determinant() - 1.0).abs() < 1e-12);
            assert!((g * ginv - DMatrix::identity(7, 7)).amax() < 1e-13);
        }
        let x = reference_point(&m, 0.3);
        let p = curvature(&m, &x, 1e-2).unwrap();
        let a = symmetry_audit(&p, &m.metric_eval(&x).unwrap().1);
        assert!(a.max() < 1e-9 && a.max() <= 10.0 * p.discretization_error.max(1e-10), "{a:?} {}", p.discretization_error);
    }

    #[test]
    fn round_sphere_scalar_curvature() {
        // stereographic metric 4/(1+|x|²)² δ has scalar curvature n(n-1);
        // check the Riemann formula through the same jet code
        let n = 5;
        let x = vec![0.1, -0.2, 0.05, 0.0, 0.3];
        let step = 1e-3;
        let metric = |p: &[f64]| DMatrix::identity(n, n) * (4.0 / (1.0 + p.iter().map(|v| v * v).sum::<f64>()).powi(2));
        let mut dg = Vec::new();
        for k in 0..n {
            let mut acc = DMatrix::zeros(n, n);
            for &(o, w) in &D1 {
                let mut p = x.clone();
                p[k] += o * step;
                acc += metric(&p) * w;
            }
            dg.push(acc / step);
        }
        let mut ddg = vec![DMatrix::zeros(n, n); n * n];
        for k in 0..n {
            for l in 0..n {
                let mut acc = DMatrix::zeros(n, n);
                for &(o1, w1) in &D1 {
                    for &(o2, w2) in &D1 {
                        let mut p = x.clone();
                        p[k] += o1 * step;
                        p[l] += o2 * step;
                        acc += metric(&p) * (w1 * w2);
                    }
                }
                ddg[k * n + l] = acc / (step * step);
            }
        }
        let g = metric(&x);
        let ginv = g.clone().try_inverse().unwrap();
        let pack = pack_from_jet(&MetricJet { g, ginv, dg, ddg });
        assert!((pack.scalar - 20.0).abs() < 1e-6, "{}", pack.scalar);
        assert!(pack.weyl_part.iter().all(|v| v.abs() < 1e-6));
    }
}
