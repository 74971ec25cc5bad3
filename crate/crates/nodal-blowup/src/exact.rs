//! Exact values of the form `rational · π^(k/2) · √r` and the dimensional
//! constants built from Beta and Gamma functions at half-integer arguments.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

/// π to 120 decimal places; enough for 50+ significant digits after a few
/// multiplications and square roots.
const PI_DIGITS: &str = "3.141592653589793238462643383279502884197169399375105820974944592307816406286208998628034825342117067982148086513282306647093844";

/// Digits carried internally when rendering decimals.
const WORK_DIGITS: u32 = 90;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("radial integral diverges: need p - q > 1, got p = {p}, q = {q}")]
    Divergent { p: f64, q: f64 },
    #[error("radial integral needs q >= 0, got q = {0}")]
    NegativeExponent(f64),
    #[error("dimension {n} is below the minimum {min} for this quantity")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("{0} is not a positive half-integer")]
    NotHalfInteger(f64),
    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),
}

/// A real number `v/2` with integer `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub fn int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    /// Recognises `x` as a half-integer, if it is one.
    pub fn try_from_f64(x: f64) -> Option<Self> {
        let t = 2.0 * x;
        if t.is_finite() && (t - t.round()).abs() < 1e-12 && t.abs() < 1e15 {
            Some(HalfInt(t.round() as i64))
        } else {
            None
        }
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn add_int(self, k: i64) -> Self {
        HalfInt(self.0 + 2 * k)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `coeff · π^(half_pi/2) · √radicand`, with `radicand` square-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactValue {
    coeff: BigRational,
    half_pi: i64,
    radicand: u64,
}

fn square_free_split(mut r: u64) -> (u64, u64) {
    // r = free * root^2
    let mut root = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= r {
        let mut e = 0;
        while r % p == 0 {
            r /= p;
            e += 1;
        }
        root *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= r;
    (free, root)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

impl ExactValue {
    pub fn rational(coeff: BigRational) -> Self {
        ExactValue { coeff, half_pi: 0, radicand: 1 }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    pub fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    /// π^(half_pi/2).
    pub fn pi_power(half_pi: i64) -> Self {
        ExactValue { coeff: BigRational::one(), half_pi, radicand: 1 }
    }

    /// `base^(e/2)` for a positive integer base.
    pub fn int_pow_half(base: u64, e: HalfInt) -> Self {
        assert!(base > 0, "base must be positive");
        let tw = e.twice();
        let whole = tw.div_euclid(2);
        let odd = tw.rem_euclid(2) == 1;
        let b = BigRational::from_integer(BigInt::from(base));
        let coeff = if whole >= 0 {
            Pow::pow(b, whole as u32)
        } else {
            Pow::pow(b.recip(), (-whole) as u32)
        };
        let mut v = Self::rational(coeff);
        if odd {
            v = v * Self::sqrt_int(base);
        }
        v
    }

    /// √k as an exact value.
    pub fn sqrt_int(k: u64) -> Self {
        let (free, root) = square_free_split(k);
        ExactValue { coeff: rat(root as i64, 1), half_pi: 0, radicand: free }
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn half_pi(&self) -> i64 {
        self.half_pi
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        ExactValue { coeff: &self.coeff * r, half_pi: self.half_pi, radicand: self.radicand }
    }

    pub fn recip(&self) -> Self {
        // 1/(c π^a √r) = (1/(c r)) π^-a √r
        ExactValue {
            coeff: (&self.coeff * BigRational::from_integer(BigInt::from(self.radicand))).recip(),
            half_pi: -self.half_pi,
            radicand: self.radicand,
        }
    }

    /// Rational `self / other` when both lie in the same transcendental class.
    pub fn ratio_to(&self, other: &ExactValue) -> Option<BigRational> {
        let q = self.clone() / other.clone();
        if q.half_pi == 0 && q.radicand == 1 {
            Some(q.coeff)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        c * std::f64::consts::PI.powf(self.half_pi as f64 / 2.0) * (self.radicand as f64).sqrt()
    }

    /// Decimal rendering with `digits` significant digits (at most 80).
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.clamp(1, 80);
        if self.coeff.is_zero() {
            return "0".to_string();
        }
        let scale = BigInt::from(10u32).pow(WORK_DIGITS);
        let pi = parse_decimal(PI_DIGITS);
        let sqrt_pi = sqrt_rational(&pi, &scale);
        let mut v = self.coeff.clone();
        let pi_whole = self.half_pi.div_euclid(2);
        if pi_whole >= 0 {
            v *= Pow::pow(pi.clone(), pi_whole as u32);
        } else {
            v /= Pow::pow(pi.clone(), (-pi_whole) as u32);
        }
        if self.half_pi.rem_euclid(2) == 1 {
            v *= sqrt_pi;
        }
        if self.radicand != 1 {
            v *= sqrt_rational(&BigRational::from_integer(BigInt::from(self.radicand)), &scale);
        }
        format_significant(&v, digits)
    }

    /// Human-readable symbolic form, e.g. `3/8 * pi^(5/2) * sqrt(33)`.
    pub fn symbolic(&self) -> String {
        let mut s = format!("{}", self.coeff);
        match self.half_pi {
            0 => {}
            2 => s.push_str(" * pi"),
            k if k % 2 == 0 => s.push_str(&format!(" * pi^{}", k / 2)),
            k => s.push_str(&format!(" * pi^({}/2)", k)),
        }
        if self.radicand != 1 {
            s.push_str(&format!(" * sqrt({})", self.radicand));
        }
        s
    }
}

impl Mul for ExactValue {
    type Output = ExactValue;
    fn mul(self, o: ExactValue) -> ExactValue {
        let prod = self
            .radicand
            .checked_mul(o.radicand)
            .expect("radicand overflow in exact arithmetic");
        let (free, root) = square_free_split(prod);
        ExactValue {
            coeff: self.coeff * o.coeff * rat(root as i64, 1),
            half_pi: self.half_pi + o.half_pi,
            radicand: free,
        }
    }
}

impl Div for ExactValue {
    type Output = ExactValue;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: ExactValue) -> ExactValue {
        self * o.recip()
    }
}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbolic())
    }
}

fn parse_decimal(s: &str) -> BigRational {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal literal");
    BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32))
}

/// Truncated square root of a positive rational at resolution `1/scale`.
fn sqrt_rational(x: &BigRational, scale: &BigInt) -> BigRational {
    let scaled = (x * BigRational::from_integer(scale * scale)).to_integer();
    let root = scaled.to_biguint().expect("positive").sqrt();
    BigRational::new(BigInt::from(root), scale.clone())
}

fn format_significant(v: &BigRational, digits: usize) -> String {
    let neg = v.is_negative();
    let a = v.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            Pow::pow(ten.clone(), k as u32)
        } else {
            Pow::pow(ten.recip(), (-k) as u32)
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let m = (&a * pow10(shift)).round().to_integer();
    let mut ms = m.to_string();
    let mut e = e;
    if ms.len() > digits {
        ms.truncate(digits);
        e += 1;
    }
    let sign = if neg { "-" } else { "" };
    format!("{sign}{}.{}e{}", &ms[..1], &ms[1..], e)
}

/// Γ(x) for a positive half-integer `x`.
pub fn gamma_half(x: HalfInt) -> Result<ExactValue, ExactError> {
    let tw = x.twice();
    if tw <= 0 {
        return Err(ExactError::GammaPole(x.to_f64()));
    }
    if tw % 2 == 0 {
        let k = (tw / 2) as u64;
        Ok(ExactValue::rational(BigRational::from_integer(factorial(k - 1))))
    } else {
        // Γ(k + 1/2) = (2k)! / (4^k k!) √π
        let k = ((tw - 1) / 2) as u64;
        let num = factorial(2 * k);
        let den = BigInt::from(4u32).pow(k as u32) * factorial(k);
        Ok(ExactValue { coeff: BigRational::new(num, den), half_pi: 1, radicand: 1 })
    }
}

/// Beta(a, b) for positive half-integers.
pub fn beta_half(a: HalfInt, b: HalfInt) -> Result<ExactValue, ExactError> {
    Ok(gamma_half(a)? * gamma_half(b)? / gamma_half(a + b)?)
}

/// A scalar that is exact when the arguments allow it.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(ExactValue),
    Approx(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(v) => v.to_f64(),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&ExactValue> {
        match self {
            Scalar::Exact(v) => Some(v),
            Scalar::Approx(_) => None,
        }
    }
}

fn check_radial_domain(p: f64, q: f64) -> Result<(), ExactError> {
    if q < 0.0 {
        return Err(ExactError::NegativeExponent(q));
    }
    if p - q <= 1.0 {
        return Err(ExactError::Divergent { p, q });
    }
    Ok(())
}

/// `∫_0^∞ r^q (1+r)^(-p) dr = Beta(q+1, p-q-1)` for half-integer exponents.
pub fn radial_integral_exact(p: HalfInt, q: HalfInt) -> Result<ExactValue, ExactError> {
    check_radial_domain(p.to_f64(), q.to_f64())?;
    beta_half(q.add_int(1), (p - q).add_int(-1))
}

/// Same integral for real exponents: exact at half-integers, otherwise a
/// log-gamma evaluation in double precision.
pub fn radial_integral(p: f64, q: f64) -> Result<Scalar, ExactError> {
    check_radial_domain(p, q)?;
    match (HalfInt::try_from_f64(p), HalfInt::try_from_f64(q)) {
        (Some(hp), Some(hq)) => Ok(Scalar::Exact(radial_integral_exact(hp, hq)?)),
        _ => {
            use statrs::function::gamma::ln_gamma;
            let a = q + 1.0;
            let b = p - q - 1.0;
            Ok(Scalar::Approx((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()))
        }
    }
}

/// The exponents `(n, (n-2)/2)` of the base integral.
pub fn base_indices(n: usize) -> (HalfInt, HalfInt) {
    (HalfInt::int(n as i64), HalfInt::from_twice(n as i64 - 2))
}

/// Radial integrals of one dimension, stored as rationals relative to the
/// base `I_n^((n-2)/2)`.
#[derive(Debug, Clone)]
pub struct RadialIntegralTable {
    n: usize,
    base: ExactValue,
    ratios: BTreeMap<(HalfInt, HalfInt), BigRational>,
}

impl RadialIntegralTable {
    /// Eagerly fills all valid index pairs within `window` integer shifts
    /// of the base indices.
    pub fn new(n: usize, window: i64) -> Result<Self, ExactError> {
        if n < 3 {
            return Err(ExactError::DimensionTooSmall { n, min: 3 });
        }
        let (p0, q0) = base_indices(n);
        let base = radial_integral_exact(p0, q0)?;
        let mut ratios = BTreeMap::new();
        for i in -window..=window {
            for j in -window..=window {
                let (p, q) = (p0.add_int(i), q0.add_int(j));
                if let Ok(v) = radial_integral_exact(p, q) {
                    let r = v.ratio_to(&base).expect("same class as base");
                    ratios.insert((p, q), r);
                }
            }
        }
        Ok(RadialIntegralTable { n, base, ratios })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &ExactValue {
        &self.base
    }

    /// `I_p^q / I_n^((n-2)/2)` when the indices are integer shifts of the
    /// base indices and the integral converges.
    pub fn ratio(&self, p: HalfInt, q: HalfInt) -> Option<BigRational> {
        if let Some(r) = self.ratios.get(&(p, q)) {
            return Some(r.clone());
        }
        let (p0, q0) = base_indices(self.n);
        if !(p - p0).is_integer() || !(q - q0).is_integer() {
            return None;
        }
        let v = radial_integral_exact(p, q).ok()?;
        v.ratio_to(&self.base)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(HalfInt, HalfInt), &BigRational)> {
        self.ratios.iter()
    }
}

/// One closed-form relation `I_p^q = ratio · I_n^((n-2)/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialIdentity {
    pub p: String,
    pub q: String,
    pub claimed: String,
    pub computed: String,
    pub holds: bool,
}

/// The six shifted integrals used by the energy coefficients, each
/// compared exactly against its claimed rational multiple of the base.
pub fn radial_identities(n: usize) -> Result<Vec<RadialIdentity>, ExactError> {
    if n < 7 {
        return Err(ExactError::DimensionTooSmall { n, min: 7 });
    }
    let ni = n as i64;
    let h = |twice: i64| HalfInt::from_twice(twice);
    let claims = [
        (h(2 * ni), h(ni), rat(ni, ni - 2)),
        (h(2 * ni), h(ni + 2), rat((ni + 2) * ni, (ni - 4) * (ni - 2))),
        (h(2 * ni + 4), h(ni + 4), rat((ni + 4) * (ni + 2), 4 * (ni - 2) * (ni + 1))),
        (h(2 * ni + 2), h(ni + 2), rat(ni + 2, 2 * (ni - 2))),
        (h(2 * ni - 4), h(ni - 2), rat(4 * (ni - 1), ni - 4)),
        (h(2 * ni - 4), h(ni), rat(4 * ni * (ni - 1), (ni - 4) * (ni - 6))),
    ];
    let (p0, q0) = base_indices(n);
    let base = radial_integral_exact(p0, q0)?;
    claims
        .into_iter()
        .map(|(p, q, claimed)| {
            let computed = radial_integral_exact(p, q)?.ratio_to(&base);
            Ok(RadialIdentity {
                p: p.to_string(),
                q: q.to_string(),
                claimed: claimed.to_string(),
                computed: computed.as_ref().map_or_else(|| "not rational".into(), |c| c.to_string()),
                holds: computed.as_ref() == Some(&claimed),
            })
        })
        .collect()
}

/// Checks `I_{p+1}^q = (p-q-1)/p · I_p^q` and
/// `I_{p+1}^{q+1} = (q+1)/(p-q-1) · I_{p+1}^q` on every convergent pair
/// within `window` integer shifts of the base indices. Returns the number
/// of pairs checked and the number of failures.
pub fn recursion_check(n: usize, window: i64) -> Result<(usize, usize), ExactError> {
    let (p0, q0) = base_indices(n);
    let half = |x: HalfInt| BigRational::new(BigInt::from(x.twice()), BigInt::from(2));
    let (mut checked, mut failed) = (0, 0);
    for i in -window..=window {
        for j in -window..=window {
            let (p, q) = (p0.add_int(i), q0.add_int(j));
            if q.to_f64() < 0.0 || p.to_f64() <= 0.0 {
                continue;
            }
            let (Ok(ipq), Ok(ip1q)) = (radial_integral_exact(p, q), radial_integral_exact(p.add_int(1), q)) else {
                continue;
            };
            let (pr, qr) = (half(p), half(q));
            let one = BigRational::one();
            let first = ip1q.ratio_to(&ipq) == Some((&pr - &qr - &one) / &pr);
            let second = match radial_integral_exact(p.add_int(1), q.add_int(1)) {
                Ok(v) => v.ratio_to(&ip1q) == Some((&qr + &one) / (&pr - &qr - &one)),
                Err(_) => true,
            };
            checked += 1;
            if !(first && second) {
                failed += 1;
            }
        }
    }
    Ok((checked, failed))
}

/// ω_{n-1}, the area of the unit sphere in ℝ^n.
pub fn sphere_volume(n: usize) -> Result<ExactValue, ExactError> {
    if n < 2 {
        return Err(ExactError::DimensionTooSmall { n, min: 2 });
    }
    let g = gamma_half(HalfInt::from_twice(n as i64))?;
    Ok(ExactValue::from_ratio(2, 1) * ExactValue::pi_power(n as i64) / g)
}

fn m_pow_half_n(n: usize) -> ExactValue {
    let m = (n * (n - 2)) as u64;
    ExactValue::int_pow_half(m, HalfInt::from_twice(n as i64))
}

/// `∫ B^{2*}` for the unit bubble, i.e. K_n^{-n}.
pub fn sobolev_mass(n: usize) -> Result<ExactValue, ExactError> {
    if n < 3 {
        return Err(ExactError::DimensionTooSmall { n, min: 3 });
    }
    let (p, q) = base_indices(n);
    let base = radial_integral_exact(p, q)?;
    Ok(sphere_volume(n)? * ExactValue::from_ratio(1, 2) * m_pow_half_n(n) * base)
}

/// `∫ (1+|x|²/(n(n-2)))^{-(n+2)/2} dx`.
pub fn lambda_constant(n: usize) -> Result<ExactValue, ExactError> {
    if n < 3 {
        return Err(ExactError::DimensionTooSmall { n, min: 3 });
    }
    // u = |x|²/m turns the radial part into I_{(n+2)/2}^{(n-2)/2} = Beta(n/2, 1)
    let i = radial_integral_exact(HalfInt::from_twice(n as i64 + 2), HalfInt::from_twice(n as i64 - 2))?;
    Ok(sphere_volume(n)? * ExactValue::from_ratio(1, 2) * m_pow_half_n(n) * i)
}

/// Conformal Laplacian coefficient (n-2)/(4(n-1)).
pub fn conformal_coefficient(n: usize) -> Result<BigRational, ExactError> {
    if n < 3 {
        return Err(ExactError::DimensionTooSmall { n, min: 3 });
    }
    Ok(rat(n as i64 - 2, 4 * (n as i64 - 1)))
}

/// Rational factor of the Pohozaev constant relative to K_n^{-n}.
pub fn pohozaev_factor(n: usize) -> Result<BigRational, ExactError> {
    if n < 7 {
        return Err(ExactError::DimensionTooSmall { n, min: 7 });
    }
    let n = n as i64;
    Ok(rat(n * (n - 2) * (n - 2), 6 * (n - 6) * (n - 4)))
}

/// Closed form of the Pohozaev constant a_n.
pub fn pohozaev_constant(n: usize) -> Result<ExactValue, ExactError> {
    let f = pohozaev_factor(n)?;
    Ok(sobolev_mass(n)?.scale(&f))
}

/// The Pohozaev constant computed from its defining radial integral
/// `(c_n/24)(n-2)² ∫ (1+s)^{1-n} (s-1) s dy`, `s = |y|²/(n(n-2))`.
pub fn pohozaev_constant_integral_form(n: usize) -> Result<ExactValue, ExactError> {
    if n < 7 {
        return Err(ExactError::DimensionTooSmall { n, min: 7 });
    }
    let ni = n as i64;
    let p = HalfInt::int(ni - 1);
    let hi = radial_integral_exact(p, HalfInt::from_twice(ni + 2))?;
    let lo = radial_integral_exact(p, HalfInt::from_twice(ni))?;
    // both share the class of the base, so the difference stays exact
    let (p0, q0) = base_indices(n);
    let base = radial_integral_exact(p0, q0)?;
    let diff = hi.ratio_to(&base).expect("same class") - lo.ratio_to(&base).expect("same class");
    let radial = base.scale(&diff);
    let pref = conformal_coefficient(n)? * rat((ni - 2) * (ni - 2), 24);
    Ok((sphere_volume(n)? * ExactValue::from_ratio(1, 2) * m_pow_half_n(n) * radial).scale(&pref))
}

/// Exact values of all dimensional constants.
#[derive(Debug, Clone)]
pub struct ExactConstants {
    pub n: usize,
    pub omega: ExactValue,
    pub kn_pow: ExactValue,
    pub lambda_n: ExactValue,
    pub cn: BigRational,
    pub an: Option<ExactValue>,
}

impl ExactConstants {
    pub fn new(n: usize) -> Result<Self, ExactError> {
        Ok(ExactConstants {
            n,
            omega: sphere_volume(n)?,
            kn_pow: sobolev_mass(n)?,
            lambda_n: lambda_constant(n)?,
            cn: conformal_coefficient(n)?,
            an: if n >= 7 { Some(pohozaev_constant(n)?) } else { None },
        })
    }

    pub fn to_bundle(&self) -> ConstantsBundle {
        ConstantsBundle {
            n: self.n,
            omega: self.omega.to_f64(),
            kn_pow: self.kn_pow.to_f64(),
            lambda_n: self.lambda_n.to_f64(),
            cn: self.cn.to_f64().unwrap_or(f64::NAN),
            an: self.an.as_ref().map(ExactValue::to_f64),
        }
    }
}

/// Floating-point view of the dimensional constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsBundle {
    pub n: usize,
    pub omega: f64,
    pub kn_pow: f64,
    pub lambda_n: f64,
    pub cn: f64,
    pub an: Option<f64>,
}

impl ConstantsBundle {
    pub fn new(n: usize) -> Result<Self, ExactError> {
        Ok(ExactConstants::new(n)?.to_bundle())
    }
}

/// Checks `2·10⁻⁴·8⁻⁶·a_10 = (5/567)·ω_9` in exact arithmetic.
pub fn ten_dimensional_identity() -> Result<(ExactValue, ExactValue), ExactError> {
    let a10 = pohozaev_constant(10)?;
    let lhs = a10.scale(&BigRational::new(
        BigInt::from(2),
        BigInt::from(10_000u64) * BigInt::from(262_144u64),
    ));
    let rhs = sphere_volume(10)?.scale(&rat(5, 567));
    Ok((lhs, rhs))
}

/// The threshold ratio u0/|Weyl|² at which the ten-dimensional balance vanishes.
pub fn ten_dimensional_threshold() -> BigRational {
    rat(5, 567)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_half(HalfInt::int(5)).unwrap(), ExactValue::from_ratio(24, 1));
        let g = gamma_half(HalfInt::from_twice(1)).unwrap();
        assert!((g.to_f64() - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        let g = gamma_half(HalfInt::from_twice(7)).unwrap();
        assert!((g.to_f64() - 3.323_350_970_447_842_6).abs() < 1e-14);
        assert!(gamma_half(HalfInt::int(0)).is_err());
    }

    #[test]
    fn radial_small_cases() {
        let v = radial_integral_exact(HalfInt::int(3), HalfInt::int(0)).unwrap();
        assert_eq!(v, ExactValue::from_ratio(1, 2));
        assert!(matches!(
            radial_integral(2.0, 1.0),
            Err(ExactError::Divergent { .. })
        ));
        assert!(matches!(radial_integral(3.0, -0.5), Err(ExactError::NegativeExponent(_))));
        let approx = radial_integral(5.3, 1.2).unwrap();
        assert!(matches!(approx, Scalar::Approx(_)));
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_volume(2).unwrap().to_f64() - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_volume(3).unwrap().to_f64() - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        let w9 = sphere_volume(10).unwrap();
        assert_eq!(w9.ratio_to(&ExactValue::pi_power(10)), Some(rat(1, 12)));
    }

    #[test]
    fn lambda_reduction_is_exact() {
        for n in 3..20 {
            let l = lambda_constant(n).unwrap();
            let r = l.scale(&rat(n as i64, 1)) / (sphere_volume(n).unwrap() * m_pow_half_n(n));
            assert_eq!(r, ExactValue::one(), "n = {n}");
        }
    }

    #[test]
    fn decimal_rendering() {
        let s = ExactValue::pi_power(2).to_decimal(50);
        assert!(s.starts_with("3.1415926535897932384626433832795028841971693993751"), "{s}");
        let s = ExactValue::sqrt_int(2).to_decimal(30);
        assert!(s.starts_with("1.4142135623730950488016887242"), "{s}");
        assert_eq!(ExactValue::from_ratio(-1, 8).to_decimal(3), "-1.25e-1");
    }

    #[test]
    fn square_free() {
        assert_eq!(square_free_split(72), (2, 6));
        assert_eq!(ExactValue::sqrt_int(99) * ExactValue::sqrt_int(11), ExactValue::from_ratio(33, 1));
    }

    #[test]
    fn ten_dim_identity_exact() {
        let (l, r) = ten_dimensional_identity().unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn radial_relations_hold() {
        for n in 7..=25 {
            assert!(radial_identities(n).unwrap().iter().all(|r| r.holds), "n = {n}");
            let (checked, failed) = recursion_check(n, 3).unwrap();
            assert!(checked > 20 && failed == 0);
        }
    }
}
