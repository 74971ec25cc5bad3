//! Which geometries admit sign-changing blow-up at the minimal energy
//! level, and the leading Pohozaev balance behind the answer.

use num::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{pohozaev_constant, sobolev_mass, sphere_volume, ten_dimensional_threshold, ExactError};

#[derive(Debug, Error)]
pub enum RegimeError {
    #[error("dimension must be at least 3, got {0}")]
    Dimension(usize),
    #[error("a locally conformally flat metric cannot have nowhere-vanishing Weyl tensor")]
    Inconsistent,
    #[error("the balance needs n >= 7, got {0}")]
    BalanceDimension(usize),
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("no sign change of the balance on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `u₀` against `(5/567)|Weyl|²` pointwise; only read at `n = 10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdComparison {
    Above,
    Below,
    EqualSomewhere,
    Unknown,
}

/// Sign of the linear perturbation `h`. `Nonneg` and `Nonpos` mean `h ≢ 0`,
/// so `max h > 0` or `min h < 0` respectively; `Mixed` has both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationSign {
    None,
    Nonneg,
    Nonpos,
    Mixed,
}

impl PerturbationSign {
    fn has_negative_min(self) -> bool {
        matches!(self, PerturbationSign::Nonpos | PerturbationSign::Mixed)
    }

    fn has_positive_max(self) -> bool {
        matches!(self, PerturbationSign::Nonneg | PerturbationSign::Mixed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub n: usize,
    pub lcf: bool,
    pub weyl_everywhere_nonzero: bool,
    pub u0_vs_threshold: ThresholdComparison,
    pub perturbation_sign: PerturbationSign,
}

impl GeometrySpec {
    pub fn new(n: usize, lcf: bool, weyl_everywhere_nonzero: bool) -> Self {
        GeometrySpec {
            n,
            lcf,
            weyl_everywhere_nonzero,
            u0_vs_threshold: ThresholdComparison::Unknown,
            perturbation_sign: PerturbationSign::None,
        }
    }

    pub fn with_threshold(mut self, c: ThresholdComparison) -> Self {
        self.u0_vs_threshold = c;
        self
    }

    pub fn with_perturbation(mut self, s: PerturbationSign) -> Self {
        self.perturbation_sign = s;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CompactBelowMinimalLevel,
    BlowupNotExcluded,
    BlowupConstructible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CompactBelowMinimalLevel => "compact_below_minimal_level",
            Verdict::BlowupNotExcluded => "blowup_not_excluded",
            Verdict::BlowupConstructible => "blowup_constructible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeVerdict {
    pub verdict: Verdict,
    /// The matched rule, in words.
    pub rule: &'static str,
}

fn verdict(verdict: Verdict, rule: &'static str) -> Result<RegimeVerdict, RegimeError> {
    Ok(RegimeVerdict { verdict, rule })
}

pub fn classify(spec: &GeometrySpec) -> Result<RegimeVerdict, RegimeError> {
    use PerturbationSign as P;
    use ThresholdComparison as T;
    use Verdict::*;
    let n = spec.n;
    if n < 3 {
        return Err(RegimeError::Dimension(n));
    }
    if spec.lcf && spec.weyl_everywhere_nonzero {
        return Err(RegimeError::Inconsistent);
    }
    let u0 = spec.u0_vs_threshold;
    let h = spec.perturbation_sign;
    if h == P::None {
        if spec.lcf {
            return verdict(CompactBelowMinimalLevel, "locally conformally flat");
        }
        if n <= 9 {
            return verdict(CompactBelowMinimalLevel, "n <= 9");
        }
        if n == 10 {
            return match u0 {
                T::Above | T::Below => verdict(CompactBelowMinimalLevel, "n = 10, u0 != (5/567)|Weyl|^2 everywhere"),
                _ => verdict(BlowupNotExcluded, "n = 10, u0 may meet (5/567)|Weyl|^2"),
            };
        }
        if spec.weyl_everywhere_nonzero {
            return verdict(CompactBelowMinimalLevel, "n >= 11, Weyl nonzero everywhere");
        }
        return verdict(BlowupConstructible, "n >= 11, Weyl vanishes somewhere: non-lcf deformation of an lcf background");
    }

    // no blowing-up sequence at all
    if n <= 6 {
        return verdict(CompactBelowMinimalLevel, "perturbed, 3 <= n <= 6");
    }
    if h == P::Nonneg && n <= 9 {
        return verdict(CompactBelowMinimalLevel, "h >= 0, 7 <= n <= 9");
    }
    if n == 10 && h == P::Nonneg && u0 == T::Above {
        return verdict(CompactBelowMinimalLevel, "h >= 0, n = 10, u0 above threshold");
    }
    if n == 10 && h == P::Nonpos && u0 == T::Below {
        return verdict(CompactBelowMinimalLevel, "h <= 0, n = 10, u0 below threshold");
    }
    if n >= 11 && h == P::Nonneg && spec.lcf {
        return verdict(CompactBelowMinimalLevel, "h >= 0, n >= 11, locally conformally flat");
    }
    if n >= 11 && h == P::Nonpos && spec.weyl_everywhere_nonzero {
        return verdict(CompactBelowMinimalLevel, "h <= 0, n >= 11, Weyl nonzero everywhere");
    }

    // constructible, for a nondegenerate u0
    if h.has_negative_min() && n <= 9 {
        return verdict(BlowupConstructible, "min h < 0, 7 <= n <= 9");
    }
    if n == 10 && h.has_negative_min() && u0 == T::Above {
        return verdict(BlowupConstructible, "min h < 0, n = 10, u0 above threshold");
    }
    if n == 10 && h.has_positive_max() && u0 == T::Below {
        return verdict(BlowupConstructible, "max h > 0, n = 10, u0 below threshold");
    }
    if n >= 11 && h.has_negative_min() && spec.lcf {
        return verdict(BlowupConstructible, "min h < 0, n >= 11, locally conformally flat");
    }
    if n >= 11 && h.has_positive_max() && spec.weyl_everywhere_nonzero {
        return verdict(BlowupConstructible, "max h > 0, n >= 11, Weyl nonzero everywhere");
    }
    verdict(BlowupNotExcluded, "perturbed, no listed case applies")
}

/// One row of the reference table: `None` matches either value.
#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    pub n_min: usize,
    pub n_max: usize,
    pub lcf: Option<bool>,
    pub weyl_everywhere_nonzero: Option<bool>,
    pub u0: &'static [ThresholdComparison],
    pub perturbation: &'static [PerturbationSign],
    pub verdict: Verdict,
}

impl TableRow {
    fn matches(&self, s: &GeometrySpec) -> bool {
        (self.n_min..=self.n_max).contains(&s.n)
            && self.lcf.is_none_or(|v| v == s.lcf)
            && self.weyl_everywhere_nonzero.is_none_or(|v| v == s.weyl_everywhere_nonzero)
            && self.u0.contains(&s.u0_vs_threshold)
            && self.perturbation.contains(&s.perturbation_sign)
    }
}

/// The regime table written out row by row; the first matching row wins
/// and anything unmatched is `BlowupNotExcluded`.
pub fn reference_table() -> Vec<TableRow> {
    use PerturbationSign as P;
    use ThresholdComparison as T;
    use Verdict::*;
    const ANY_U0: &[T] = &[T::Above, T::Below, T::EqualSomewhere, T::Unknown];
    const STRICT: &[T] = &[T::Above, T::Below];
    const NONE: &[P] = &[P::None];
    const PERTURBED: &[P] = &[P::Nonneg, P::Nonpos, P::Mixed];
    const NEG_MIN: &[P] = &[P::Nonpos, P::Mixed];
    const POS_MAX: &[P] = &[P::Nonneg, P::Mixed];
    let row = |n_min, n_max, lcf, wnz, u0, perturbation, verdict| TableRow {
        n_min,
        n_max,
        lcf,
        weyl_everywhere_nonzero: wnz,
        u0,
        perturbation,
        verdict,
    };
    let big = usize::MAX;
    vec![
        // unperturbed
        row(3, big, Some(true), None, ANY_U0, NONE, CompactBelowMinimalLevel),
        row(3, 9, None, None, ANY_U0, NONE, CompactBelowMinimalLevel),
        row(10, 10, None, None, STRICT, NONE, CompactBelowMinimalLevel),
        row(11, big, None, Some(true), ANY_U0, NONE, CompactBelowMinimalLevel),
        row(11, big, Some(false), Some(false), ANY_U0, NONE, BlowupConstructible),
        // perturbed, excluded
        row(3, 6, None, None, ANY_U0, PERTURBED, CompactBelowMinimalLevel),
        row(7, 9, None, None, ANY_U0, &[P::Nonneg], CompactBelowMinimalLevel),
        row(10, 10, None, None, &[T::Above], &[P::Nonneg], CompactBelowMinimalLevel),
        row(10, 10, None, None, &[T::Below], &[P::Nonpos], CompactBelowMinimalLevel),
        row(11, big, Some(true), None, ANY_U0, &[P::Nonneg], CompactBelowMinimalLevel),
        row(11, big, None, Some(true), ANY_U0, &[P::Nonpos], CompactBelowMinimalLevel),
        // perturbed, constructible
        row(7, 9, None, None, ANY_U0, NEG_MIN, BlowupConstructible),
        row(10, 10, None, None, &[T::Above], NEG_MIN, BlowupConstructible),
        row(10, 10, None, None, &[T::Below], POS_MAX, BlowupConstructible),
        row(11, big, Some(true), None, ANY_U0, NEG_MIN, BlowupConstructible),
        row(11, big, None, Some(true), ANY_U0, POS_MAX, BlowupConstructible),
    ]
}

/// Verdict read off [`reference_table`]; `None` for inconsistent specs.
pub fn reference_verdict(spec: &GeometrySpec) -> Option<Verdict> {
    if spec.n < 3 || (spec.lcf && spec.weyl_everywhere_nonzero) {
        return None;
    }
    Some(
        reference_table()
            .iter()
            .find(|r| r.matches(spec))
            .map_or(Verdict::BlowupNotExcluded, |r| r.verdict),
    )
}

/// Every combination of the [`GeometrySpec`] fields for `n` in `dims`, consistent or not.
pub fn cross_product(dims: std::ops::RangeInclusive<usize>) -> Vec<GeometrySpec> {
    use PerturbationSign as P;
    use ThresholdComparison as T;
    let mut out = Vec::new();
    for n in dims {
        for lcf in [false, true] {
            for wnz in [false, true] {
                for u0 in [T::Above, T::Below, T::EqualSomewhere, T::Unknown] {
                    for h in [P::None, P::Nonneg, P::Nonpos, P::Mixed] {
                        out.push(GeometrySpec::new(n, lcf, wnz).with_threshold(u0).with_perturbation(h));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceInput {
    pub n: usize,
    pub u0_at_blowup: f64,
    pub weyl_norm_sq_at_blowup: f64,
    pub mu: f64,
}

/// The two balance coefficients: `A μ^{(n-6)/2} u₀ - a_n |Weyl|² μ²`
/// with `A = ½ n^{(n-2)/2} (n-2)^{(n+2)/2} ω_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceCoefficients {
    pub n: usize,
    pub mass: f64,
    pub an: f64,
}

impl BalanceCoefficients {
    pub fn new(n: usize) -> Result<Self, RegimeError> {
        if n < 7 {
            return Err(RegimeError::BalanceDimension(n));
        }
        let nf = n as f64;
        let omega = sphere_volume(n)?.to_f64();
        let mass = 0.5 * nf.powf((nf - 2.0) / 2.0) * (nf - 2.0).powf((nf + 2.0) / 2.0) * omega;
        Ok(BalanceCoefficients { n, mass, an: pohozaev_constant(n)?.to_f64() })
    }

    pub fn eval(&self, u0: f64, weyl_sq: f64, mu: f64) -> f64 {
        let nf = self.n as f64;
        self.mass * u0 * mu.powf((nf - 6.0) / 2.0) - self.an * weyl_sq * mu * mu
    }

    /// The positive root in `μ` for `n ≥ 11`: `μ^{(n-10)/2} = a_n|Weyl|² / (A u₀)`.
    pub fn mu_root(&self, u0: f64, weyl_sq: f64) -> Option<f64> {
        if self.n <= 10 || weyl_sq <= 0.0 || u0 <= 0.0 {
            return None;
        }
        let nf = self.n as f64;
        Some((self.an * weyl_sq / (self.mass * u0)).powf(2.0 / (nf - 10.0)))
    }
}

pub fn balance(input: &BalanceInput) -> Result<f64, RegimeError> {
    if input.n < 7 {
        return Err(RegimeError::BalanceDimension(input.n));
    }
    for (name, value) in [("u0_at_blowup", input.u0_at_blowup), ("mu", input.mu)] {
        if !(value > 0.0) {
            return Err(RegimeError::NotPositive { name, value });
        }
    }
    if !(input.weyl_norm_sq_at_blowup >= 0.0) {
        return Err(RegimeError::NotPositive { name: "weyl_norm_sq_at_blowup", value: input.weyl_norm_sq_at_blowup });
    }
    Ok(BalanceCoefficients::new(input.n)?.eval(input.u0_at_blowup, input.weyl_norm_sq_at_blowup, input.mu))
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64, RegimeError> {
    let (a, b) = (lo, hi);
    let mut flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == f(hi).signum() {
        return Err(RegimeError::NoBracket { lo: a, hi: b });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ratio `u₀/|Weyl|²` at which the `n = 10` balance vanishes, found by
/// bisection, with the exact threshold beside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CancellationRoot {
    pub root: f64,
    pub exact: f64,
    pub abs_error: f64,
}

pub fn ten_dimensional_cancellation(mu: f64) -> Result<CancellationRoot, RegimeError> {
    if !(mu > 0.0) {
        return Err(RegimeError::NotPositive { name: "mu", value: mu });
    }
    let c = BalanceCoefficients::new(10)?;
    // scale out μ² and the magnitude so the bisection sees an O(1) function
    let f = |ratio: f64| c.eval(ratio, 1.0, mu) / (c.an * mu * mu);
    let root = bisect(f, 1e-6, 1.0)?;
    let exact = ten_dimensional_threshold().to_f64().unwrap_or(f64::NAN);
    Ok(CancellationRoot { root, exact, abs_error: (root - exact).abs() })
}

/// `Y(M)^{n/2} + Y(Sⁿ)^{n/2}` with `Y(Sⁿ) = K_n^{-2}`.
pub fn minimal_energy_gap(n: usize, yamabe_m: f64) -> Result<f64, RegimeError> {
    if n < 3 {
        return Err(RegimeError::Dimension(n));
    }
    if !(yamabe_m > 0.0) {
        return Err(RegimeError::NotPositive { name: "yamabe_M", value: yamabe_m });
    }
    let sphere = sobolev_mass(n)?.to_f64();
    Ok(yamabe_m.powf(n as f64 / 2.0) + sphere)
}

/// `Y(Sⁿ) = K_n^{-2}`.
pub fn sphere_yamabe(n: usize) -> Result<f64, RegimeError> {
    if n < 3 {
        return Err(RegimeError::Dimension(n));
    }
    Ok(sobolev_mass(n)?.to_f64().powf(2.0 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_examples() {
        let v = |s: GeometrySpec| classify(&s).unwrap().verdict;
        assert_eq!(v(GeometrySpec::new(8, false, false)), Verdict::CompactBelowMinimalLevel);
        assert_eq!(v(GeometrySpec::new(12, false, true)), Verdict::CompactBelowMinimalLevel);
        assert_eq!(
            v(GeometrySpec::new(12, true, false).with_perturbation(PerturbationSign::Nonpos)),
            Verdict::BlowupConstructible
        );
        assert!(matches!(classify(&GeometrySpec::new(12, true, true)), Err(RegimeError::Inconsistent)));
    }

    #[test]
    fn ten_dimensional_root() {
        let r = ten_dimensional_cancellation(0.37).unwrap();
        assert!(r.abs_error <= 1e-12, "{r:?}");
    }

    #[test]
    fn balance_root_in_mu() {
        let c = BalanceCoefficients::new(11).unwrap();
        let mu = c.mu_root(1.0, 1.0).unwrap();
        let f = |m: f64| c.eval(1.0, 1.0, m);
        let b = bisect(|m| f(m) / (c.an * m * m), mu / 10.0, mu * 10.0).unwrap();
        assert!((b - mu).abs() <= 1e-12 * mu);
    }

    #[test]
    fn energy_gap_limits() {
        let n = 11;
        let ys = sphere_yamabe(n).unwrap();
        let kn = sobolev_mass(n).unwrap().to_f64();
        assert!((minimal_energy_gap(n, ys).unwrap() - 2.0 * kn).abs() <= 1e-12 * kn);
        assert!((minimal_energy_gap(n, 1e-12).unwrap() - kn).abs() <= 1e-12 * kn);
    }

    #[test]
    fn classify_agrees_with_reference_table() {
        for spec in cross_product(3..=30) {
            match classify(&spec) {
                Ok(v) => assert_eq!(Some(v.verdict), reference_verdict(&spec), "{spec:?}"),
                Err(_) => assert_eq!(reference_verdict(&spec), None),
            }
        }
    }
}
