//! Weyl-type four-linear forms, their contraction tensor and the induced
//! quadratic deformation field `h(x)_ij = (1/3) Σ W_ipjq x_p x_q`.

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeylError {
    #[error("expected {expected} components for dimension {n}, got {got}")]
    Shape { n: usize, expected: usize, got: usize },
    #[error("dimension {n} is below the minimum {min}")]
    Dimension { n: usize, min: usize },
    #[error("tensor violates the Weyl symmetries: {0}")]
    Invalid(String),
    #[error("diagonal coefficient matrix rejected: {}", .0.join("; "))]
    Diagonal(Vec<String>),
    #[error("index {index} out of range for dimension {n} (indices are 1-based)")]
    Index { index: usize, n: usize },
    #[error("cannot read Weyl spec: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed Weyl spec: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Dense rank-4 tensor over ℝ^n, row-major in `(i, j, k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylForm {
    n: usize,
    c: Vec<f64>,
}

/// Largest violation of each symmetry family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub antisymmetry_first: f64,
    pub antisymmetry_second: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    pub trace: f64,
    pub norm_sq: f64,
    pub tolerance: f64,
    pub accepted: bool,
    pub trivial: bool,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        self.antisymmetry_first
            .max(self.antisymmetry_second)
            .max(self.pair_symmetry)
            .max(self.bianchi)
            .max(self.trace)
    }
}

#[inline]
fn idx(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

/// Residuals of the Weyl symmetries for a raw `n^4` array.
pub fn validate_weyl(n: usize, c: &[f64]) -> Result<ValidationReport, WeylError> {
    let expected = n.pow(4);
    if c.len() != expected {
        return Err(WeylError::Shape { n, expected, got: c.len() });
    }
    let at = |i, j, k, l| c[idx(n, i, j, k, l)];
    let (mut a1, mut a2, mut ps, mut bi, mut tr) = (0f64, 0f64, 0f64, 0f64, 0f64);
    let mut norm_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let w = at(i, j, k, l);
                    norm_sq += w * w;
                    a1 = a1.max((w + at(j, i, k, l)).abs());
                    a2 = a2.max((w + at(i, j, l, k)).abs());
                    ps = ps.max((w - at(k, l, i, j)).abs());
                    bi = bi.max((w + at(j, k, i, l) + at(k, i, j, l)).abs());
                }
            }
        }
    }
    for j in 0..n {
        for l in 0..n {
            let s: f64 = (0..n).map(|i| at(i, j, i, l)).sum();
            tr = tr.max(s.abs());
        }
    }
    let tolerance = 1e-12 * norm_sq.sqrt().max(1.0);
    let worst = a1.max(a2).max(ps).max(bi).max(tr);
    Ok(ValidationReport {
        n,
        antisymmetry_first: a1,
        antisymmetry_second: a2,
        pair_symmetry: ps,
        bianchi: bi,
        trace: tr,
        norm_sq,
        tolerance,
        accepted: worst <= tolerance,
        trivial: norm_sq == 0.0,
    })
}

/// `(A ⊙ B)_ijkl = A_ik B_jl + A_jl B_ik − A_il B_jk − A_jk B_il`.
pub(crate) fn kulkarni_nomizu(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut out = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out[idx(n, i, j, k, l)] = a[(i, k)] * b[(j, l)] + a[(j, l)] * b[(i, k)]
                        - a[(i, l)] * b[(j, k)]
                        - a[(j, k)] * b[(i, l)];
                }
            }
        }
    }
    out
}

/// Trace-free part of an algebraic curvature tensor with respect to `g`.
pub(crate) fn weyl_part(n: usize, r: &[f64], g: &DMatrix<f64>, g_inv: &DMatrix<f64>) -> Vec<f64> {
    let mut ric = DMatrix::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for k in 0..n {
                    s += g_inv[(i, k)] * r[idx(n, i, j, k, l)];
                }
            }
            ric[(j, l)] = s;
        }
    }
    let scal = g_inv.component_mul(&ric).sum();
    let ric_g = kulkarni_nomizu(&ric, g);
    let g_g = kulkarni_nomizu(g, g);
    let nf = n as f64;
    r.iter()
        .zip(ric_g.iter().zip(g_g.iter()))
        .map(|(&rv, (&rg, &gg))| rv - rg / (nf - 2.0) + scal / (2.0 * (nf - 1.0) * (nf - 2.0)) * gg)
        .collect()
}

impl WeylForm {
    /// Wraps a raw array after checking every symmetry.
    pub fn new(n: usize, c: Vec<f64>) -> Result<Self, WeylError> {
        let rep = validate_weyl(n, &c)?;
        if !rep.accepted {
            return Err(WeylError::Invalid(format!(
                "max residual {:.3e} above tolerance {:.3e}",
                rep.max_residual(),
                rep.tolerance
            )));
        }
        Ok(WeylForm { n, c })
    }

    pub fn zero(n: usize) -> Self {
        WeylForm { n, c: vec![0.0; n.pow(4)] }
    }

    /// Projects an arbitrary `n^4` array onto Weyl-type tensors: antisymmetrise
    /// both index pairs, symmetrise the pairs, remove the cyclic part and
    /// finally subtract all traces.
    pub fn project(n: usize, raw: &[f64]) -> Result<Self, WeylError> {
        if n < 3 {
            return Err(WeylError::Dimension { n, min: 3 });
        }
        let expected = n.pow(4);
        if raw.len() != expected {
            return Err(WeylError::Shape { n, expected, got: raw.len() });
        }
        let mut a = vec![0.0; expected];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = |i, j, k, l| raw[idx(n, i, j, k, l)];
                        a[idx(n, i, j, k, l)] =
                            0.25 * (r(i, j, k, l) - r(j, i, k, l) - r(i, j, l, k) + r(j, i, l, k));
                    }
                }
            }
        }
        let mut p = vec![0.0; expected];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        p[idx(n, i, j, k, l)] = 0.5 * (a[idx(n, i, j, k, l)] + a[idx(n, k, l, i, j)]);
                    }
                }
            }
        }
        let mut b = vec![0.0; expected];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let cyc = p[idx(n, i, j, k, l)] + p[idx(n, j, k, i, l)] + p[idx(n, k, i, j, l)];
                        b[idx(n, i, j, k, l)] = p[idx(n, i, j, k, l)] - cyc / 3.0;
                    }
                }
            }
        }
        let g = DMatrix::identity(n, n);
        let c = weyl_part(n, &b, &g, &g);
        Ok(WeylForm { n, c })
    }

    /// A random Weyl-type tensor from a seeded Gaussian array.
    pub fn random(n: usize, seed: u64) -> Result<Self, WeylError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n.pow(4)).map(|_| rng.sample(StandardNormal)).collect();
        Self::project(n, &raw)
    }

    /// The diagonal family `W_ijkl = (A_ij/2)(δ_ik δ_jl − δ_jk δ_il)`.
    pub fn diagonal(a: &DMatrix<f64>) -> Result<Self, WeylError> {
        let n = a.nrows();
        let mut problems = Vec::new();
        if a.ncols() != n {
            return Err(WeylError::Diagonal(vec![format!("matrix is {}x{}, not square", n, a.ncols())]));
        }
        let scale = a.amax().max(1.0);
        let tol = 1e-12 * scale;
        for i in 0..n {
            if a[(i, i)].abs() > tol {
                problems.push(format!("A[{0}][{0}] = {1} is not zero", i + 1, a[(i, i)]));
            }
            let row: f64 = a.row(i).sum();
            if row.abs() > tol * n as f64 {
                problems.push(format!("row {} sums to {row}", i + 1));
            }
            for j in 0..n {
                if (a[(i, j)] - a[(j, i)]).abs() > tol {
                    problems.push(format!("A is not symmetric at ({}, {})", i + 1, j + 1));
                }
                if i != j && a[(i, j)] == 0.0 {
                    problems.push(format!("off-diagonal A[{}][{}] vanishes", i + 1, j + 1));
                }
            }
        }
        if !problems.is_empty() {
            problems.dedup();
            return Err(WeylError::Diagonal(problems));
        }
        let mut c = vec![0.0; n.pow(4)];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = 0.5 * a[(i, j)];
                c[idx(n, i, j, i, j)] += v;
                c[idx(n, i, j, j, i)] -= v;
            }
        }
        WeylForm::new(n, c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[idx(self.n, i, j, k, l)]
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_weyl(self.n, &self.c).expect("shape is an invariant")
    }

    pub fn deformation(&self) -> DeformationField<'_> {
        DeformationField { weyl: self }
    }

    /// `S_abcd = Σ_pq W_apbq (W_cpdq + W_cqdp)`.
    pub fn pair_tensor(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += self.get(a, p, b, q) * (self.get(c, p, d, q) + self.get(c, q, d, p));
            }
        }
        s
    }
}

/// Circulant coefficient matrix for the diagonal family: `-(n-3)/2` at
/// cyclic distance one and `1` elsewhere off the diagonal.
pub fn default_diagonal_matrix(n: usize) -> Result<DMatrix<f64>, WeylError> {
    if n < 4 {
        return Err(WeylError::Dimension { n, min: 4 });
    }
    let near = -(n as f64 - 3.0) / 2.0;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let d = (i + n - j) % n;
        match d {
            0 => 0.0,
            1 => near,
            d if d == n - 1 => near,
            _ => 1.0,
        }
    }))
}

/// Diagonal Weyl form built from [`default_diagonal_matrix`].
pub fn default_diagonal_weyl(n: usize) -> Result<WeylForm, WeylError> {
    WeylForm::diagonal(&default_diagonal_matrix(n)?)
}

/// `T_kl = Σ (W_kpqr + W_krqp)(W_lpqr + W_lrqp)` together with the two
/// identities it must satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTensor {
    pub t: DMatrix<f64>,
    /// Largest entry of `T − 3 Σ W_kpqr W_lpqr`.
    pub three_form_residual: f64,
    /// `|trace T − 3|W|²|`.
    pub trace_residual: f64,
}

impl ContractionTensor {
    pub fn trace(&self) -> f64 {
        self.t.trace()
    }
}

pub fn contraction(w: &WeylForm) -> ContractionTensor {
    let n = w.n;
    let mut t = DMatrix::zeros(n, n);
    let mut short = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let (mut s, mut s3) = (0.0, 0.0);
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        let a = w.get(k, p, q, r) + w.get(k, r, q, p);
                        let b = w.get(l, p, q, r) + w.get(l, r, q, p);
                        s += a * b;
                        s3 += w.get(k, p, q, r) * w.get(l, p, q, r);
                    }
                }
            }
            t[(k, l)] = s;
            short[(k, l)] = 3.0 * s3;
        }
    }
    let three_form_residual = (&t - &short).amax();
    let trace_residual = (t.trace() - 3.0 * w.norm_sq()).abs();
    ContractionTensor { t, three_form_residual, trace_residual }
}

/// First derivatives `∂_i h_jl`, stored row-major in `(i, j, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient3 {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Gradient3 {
    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + l]
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// The quadratic matrix field induced by a Weyl form.
#[derive(Debug, Clone, Copy)]
pub struct DeformationField<'a> {
    weyl: &'a WeylForm,
}

impl<'a> DeformationField<'a> {
    pub fn weyl(&self) -> &'a WeylForm {
        self.weyl
    }

    /// `(1/3) Σ W_ipjq a_p b_q`; `h(x)` is the case `a = b = x`.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> DMatrix<f64> {
        let n = self.weyl.n;
        let w = &self.weyl.c;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for p in 0..n {
                if a[p] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let base = idx(n, i, p, j, 0);
                    let row = &w[base..base + n];
                    let s: f64 = row.iter().zip(b).map(|(x, y)| x * y).sum();
                    m[(i, j)] += a[p] * s;
                }
            }
        }
        m / 3.0
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        self.bilinear(x, x)
    }

    /// Single entry `h_ab(x)`.
    pub fn entry(&self, a: usize, b: usize, x: &[f64]) -> f64 {
        let n = self.weyl.n;
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += self.weyl.get(a, p, b, q) * x[p] * x[q];
            }
        }
        s / 3.0
    }

    /// `∇ h_ab(x)`, i.e. `(1/3) Σ_p (W_aibp + W_apbi) x_p` for each `i`.
    pub fn entry_gradient(&self, a: usize, b: usize, x: &[f64]) -> Vec<f64> {
        let n = self.weyl.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|p| (self.weyl.get(a, i, b, p) + self.weyl.get(a, p, b, i)) * x[p])
                    .sum::<f64>()
                    / 3.0
            })
            .collect()
    }

    /// `∂_i h_jl(x) = (1/3) Σ_p (W_jilp + W_jpli) x_p`.
    pub fn gradient(&self, x: &[f64]) -> Gradient3 {
        let n = self.weyl.n;
        let mut data = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for p in 0..n {
                        s += (self.weyl.get(j, i, l, p) + self.weyl.get(j, p, l, i)) * x[p];
                    }
                    data[(i * n + j) * n + l] = s / 3.0;
                }
            }
        }
        Gradient3 { n, data }
    }

    /// `Σ_pq h_pq(z)²`, the coercivity objective.
    pub fn square_norm(&self, z: &[f64]) -> f64 {
        self.eval(z).norm_squared()
    }

    /// Gradient of [`Self::square_norm`] in `z`.
    pub fn square_norm_gradient(&self, z: &[f64]) -> Vec<f64> {
        let n = self.weyl.n;
        let w = &self.weyl.c;
        // b[(i, j, k)] = Σ_p W_ikjp z_p, so 3 h_ij = Σ_k b_ijk z_k and, by
        // pair symmetry, ∂_k Σ h² = (4/3) Σ_ij h_ij b_ijk
        let mut b = vec![0.0; n * n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let base = idx(n, i, k, j, 0);
                    b[(i * n + j) * n + k] = w[base..base + n].iter().zip(z).map(|(x, y)| x * y).sum();
                }
            }
        }
        let mut g = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let row = &b[(i * n + j) * n..(i * n + j + 1) * n];
                let h: f64 = row.iter().zip(z).map(|(x, y)| x * y).sum::<f64>() / 3.0;
                for (gk, bk) in g.iter_mut().zip(row) {
                    *gk += h * bk;
                }
            }
        }
        g.iter_mut().for_each(|v| *v *= 4.0 / 3.0);
        g
    }

    /// Largest violation of trace-free, divergence-free and radial
    /// constraints at `x`.
    pub fn constraint_residuals(&self, x: &[f64]) -> (f64, f64, f64) {
        let n = self.weyl.n;
        let h = self.eval(x);
        let grad = self.gradient(x);
        let trace = h.trace().abs();
        let mut div = 0f64;
        let mut radial = 0f64;
        for i in 0..n {
            let d: f64 = (0..n).map(|j| grad.get(j, i, j)).sum();
            div = div.max(d.abs());
            let r: f64 = (0..n).map(|j| x[j] * h[(i, j)]).sum();
            radial = radial.max(r.abs());
        }
        (trace, div, radial)
    }
}

/// Outcome of the coercivity minimisation over the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityReport {
    pub minimum: f64,
    pub argmin: Vec<f64>,
    pub sweep_minimum: f64,
    pub descent_minimum: f64,
    pub starts: usize,
    pub samples: usize,
}

fn unit_gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-12 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

fn normalize(v: &mut [f64]) {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= r);
}

/// Nonzero entries of a Weyl form, for the value and gradient of `Σ h²`
/// in `O(nnz + n³)`.
struct SparseSquareNorm {
    n: usize,
    entries: Vec<(usize, usize, usize, usize, f64)>,
}

impl SparseSquareNorm {
    fn new(w: &WeylForm) -> Self {
        let n = w.n;
        let mut entries = Vec::new();
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    for p in 0..n {
                        let v = w.c[idx(n, i, k, j, p)];
                        if v != 0.0 {
                            entries.push((i, k, j, p, v));
                        }
                    }
                }
            }
        }
        SparseSquareNorm { n, entries }
    }

    /// `b[(i, j, k)] = Σ_p W_ikjp z_p`.
    fn contract(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut b = vec![0.0; n * n * n];
        for &(i, k, j, p, v) in &self.entries {
            b[(i * n + j) * n + k] += v * z[p];
        }
        b
    }

    fn value(&self, z: &[f64]) -> f64 {
        let n = self.n;
        let b = self.contract(z);
        b.chunks(n)
            .map(|row| {
                let h = row.iter().zip(z).map(|(x, y)| x * y).sum::<f64>() / 3.0;
                h * h
            })
            .sum()
    }

    fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let b = self.contract(z);
        let mut g = vec![0.0; n];
        for row in b.chunks(n) {
            let h = row.iter().zip(z).map(|(x, y)| x * y).sum::<f64>() / 3.0;
            for (gk, bk) in g.iter_mut().zip(row) {
                *gk += 4.0 / 3.0 * h * bk;
            }
        }
        g
    }
}

/// Minimises `Σ h_pq(z)²` over `|z| = 1` by a random sweep plus multi-start
/// projected gradient descent. Not a certificate of global optimality.
pub fn coercivity_check(w: &WeylForm, samples: usize, starts: usize, seed: u64) -> CoercivityReport {
    let n = w.n;
    let field = SparseSquareNorm::new(w);
    const CHUNK: usize = 1024;
    let chunks = samples.div_ceil(CHUNK);
    let sweep: Vec<(f64, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let mut best = (f64::INFINITY, vec![0.0; n]);
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let z = unit_gaussian(&mut rng, n);
                let v = field.value(&z);
                if v < best.0 {
                    best = (v, z);
                }
            }
            best
        })
        .collect();
    let sweep_best = sweep
        .into_iter()
        .fold((f64::INFINITY, vec![0.0; n]), |a, b| if b.0 < a.0 { b } else { a });

    let descents: Vec<(f64, Vec<f64>)> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            rng.set_stream(s as u64);
            let mut z = if s == 0 { sweep_best.1.clone() } else { unit_gaussian(&mut rng, n) };
            if z.iter().all(|v| *v == 0.0) {
                z = unit_gaussian(&mut rng, n);
            }
            let mut f = field.value(&z);
            let mut step = 0.1 / f.max(1e-12).sqrt().max(1.0);
            for _ in 0..400 {
                let g = field.gradient(&z);
                // project onto the tangent space
                let radial: f64 = g.iter().zip(&z).map(|(a, b)| a * b).sum();
                let tang: Vec<f64> = g.iter().zip(&z).map(|(a, b)| a - radial * b).collect();
                let gn = tang.iter().map(|v| v * v).sum::<f64>().sqrt();
                if gn < 1e-14 {
                    break;
                }
                let mut accepted = false;
                for _ in 0..40 {
                    let mut cand: Vec<f64> = z.iter().zip(&tang).map(|(a, b)| a - step * b).collect();
                    normalize(&mut cand);
                    let fc = field.value(&cand);
                    if fc < f - 1e-4 * step * gn * gn {
                        z = cand;
                        f = fc;
                        step *= 1.5;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            (f, z)
        })
        .collect();
    let descent_best = descents
        .into_iter()
        .fold((f64::INFINITY, vec![0.0; n]), |a, b| if b.0 < a.0 { b } else { a });
    let (minimum, argmin) = if descent_best.0 <= sweep_best.0 {
        descent_best.clone()
    } else {
        sweep_best.clone()
    };
    CoercivityReport {
        minimum,
        argmin,
        sweep_minimum: sweep_best.0,
        descent_minimum: descent_best.0,
        starts,
        samples,
    }
}

/// JSON description of a Weyl form. Indices in `entries` are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeylSpec {
    Diagonal {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Full {
        n: usize,
        entries: Vec<(usize, usize, usize, usize, f64)>,
    },
}

impl WeylSpec {
    pub fn from_path(path: &Path) -> Result<Self, WeylError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn dim(&self) -> usize {
        match self {
            WeylSpec::Diagonal { a } => a.len(),
            WeylSpec::Full { n, .. } => *n,
        }
    }

    /// The array as written, before any projection.
    pub fn raw_components(&self) -> Result<(usize, Vec<f64>), WeylError> {
        match self {
            WeylSpec::Diagonal { .. } => {
                let w = self.build()?;
                Ok((w.n, w.c))
            }
            WeylSpec::Full { n, entries } => {
                let n = *n;
                let mut c = vec![0.0; n.pow(4)];
                for &(i, j, k, l, v) in entries {
                    for index in [i, j, k, l] {
                        if index == 0 || index > n {
                            return Err(WeylError::Index { index, n });
                        }
                    }
                    c[idx(n, i - 1, j - 1, k - 1, l - 1)] = v;
                }
                Ok((n, c))
            }
        }
    }

    /// Diagonal specs are checked against their constraints; full specs are
    /// projected onto Weyl-type tensors.
    pub fn build(&self) -> Result<WeylForm, WeylError> {
        match self {
            WeylSpec::Diagonal { a } => {
                let n = a.len();
                if a.iter().any(|row| row.len() != n) {
                    return Err(WeylError::Diagonal(vec!["A is not square".into()]));
                }
                WeylForm::diagonal(&DMatrix::from_fn(n, n, |i, j| a[i][j]))
            }
            WeylSpec::Full { .. } => {
                let (n, c) = self.raw_components()?;
                WeylForm::project(n, &c)
            }
        }
    }

    /// Full spec listing every nonzero component, 1-based.
    pub fn from_form(w: &WeylForm) -> Self {
        let n = w.n;
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = w.get(i, j, k, l);
                        if v != 0.0 {
                            entries.push((i + 1, j + 1, k + 1, l + 1, v));
                        }
                    }
                }
            }
        }
        WeylSpec::Full { n, entries }
    }

    pub fn default_diagonal(n: usize) -> Result<Self, WeylError> {
        let a = default_diagonal_matrix(n)?;
        Ok(WeylSpec::Diagonal { a: (0..n).map(|i| a.row(i).iter().copied().collect()).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circulant_n4_is_valid() {
        let a = DMatrix::from_row_slice(4, 4, &[0., 1., -2., 1., 1., 0., 1., -2., -2., 1., 0., 1., 1., -2., 1., 0.]);
        let w = WeylForm::diagonal(&a).unwrap();
        let rep = w.validate();
        assert!(rep.accepted && !rep.trivial);
        assert!(w.norm_sq() > 0.0);
    }

    #[test]
    fn n3_diagonal_infeasible() {
        // zero row sums with zero diagonal force A = 0 in dimension 3
        let a = DMatrix::from_row_slice(3, 3, &[0., 1., -1., 1., 0., -1., -1., -1., 0.]);
        assert!(WeylForm::diagonal(&a).is_err());
        assert!(WeylForm::diagonal(&DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn zero_tensor_is_trivially_valid() {
        let rep = validate_weyl(5, &vec![0.0; 625]).unwrap();
        assert!(rep.accepted && rep.trivial);
    }

    #[test]
    fn perturbation_is_detected() {
        let w = default_diagonal_weyl(5).unwrap();
        let mut c = w.components().to_vec();
        c[idx(5, 0, 1, 0, 1)] += 1e-6;
        let rep = validate_weyl(5, &c).unwrap();
        // W_1212 is its own pair partner, so the violation shows up in the
        // antisymmetries and the trace
        assert_eq!(rep.pair_symmetry, 0.0);
        assert!((rep.antisymmetry_first - 1e-6).abs() < 1e-9);
        assert!((rep.antisymmetry_second - 1e-6).abs() < 1e-9);
        assert!(!rep.accepted);
        c[idx(5, 0, 1, 0, 2)] += 1e-6;
        let rep = validate_weyl(5, &c).unwrap();
        assert!((rep.pair_symmetry - 1e-6).abs() < 1e-9);
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(validate_weyl(4, &[0.0; 10]), Err(WeylError::Shape { .. })));
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec: WeylSpec = serde_json::from_str(r#"{"kind":"full","n":4,"entries":[[1,2,1,2,1.0]]}"#).unwrap();
        let w = spec.build().unwrap();
        assert!(w.validate().accepted);
        assert!(serde_json::from_str::<WeylSpec>(r#"{"kind":"full","n":4,"entries":[],"x":1}"#).is_err());
        let bad: WeylSpec = serde_json::from_str(r#"{"kind":"full","n":4,"entries":[[0,1,1,1,1.0]]}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn square_norm_gradient_matches_differences() {
        let w = WeylForm::random(6, 4).unwrap();
        let f = w.deformation();
        let z = [0.3, -0.1, 0.7, 0.2, -0.5, 0.4];
        let g = f.square_norm_gradient(&z);
        for k in 0..6 {
            let (mut up, mut dn) = (z, z);
            up[k] += 1e-6;
            dn[k] -= 1e-6;
            let fd = (f.square_norm(&up) - f.square_norm(&dn)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-7 * (1.0 + fd.abs()), "{k}: {fd} {}", g[k]);
        }
    }
}
