//! Exact rational polynomial engine.
//!
//! Polynomials live in the monomial basis with `BigRational` coefficients, so
//! `U_n`, `Ũ_n` and `D̃` applied to a polynomial incur no rounding at all. The
//! interior functionals use the Beta integral
//! `∫₀¹ t^{j+i} (1-t)^{m-j} dt = (j+i)! (m-j)! / (m+i+1)!` termwise.
//!
//! Every polynomial `g` satisfies `φ(0) g''(0) = φ(1) g''(1) = 0`, so the
//! boundary conditions required by the commutation identities hold
//! automatically and are not checked here.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Polynomial with rational coefficients, `coeffs[i]` multiplying `x^i`.
/// Trailing zeros are always stripped; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `x^d`.
    pub fn monomial(d: usize) -> Self {
        let mut c = vec![Rational::zero(); d + 1];
        c[d] = Rational::one();
        Self::new(c)
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// `φ(x) = x - x²`.
    pub fn phi() -> Self {
        Self::from_integers(&[0, 1, -1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_f64_coeffs().iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &RationalPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }

    /// Largest coefficient magnitude; zero exactly when the polynomial is zero.
    pub fn max_abs_coeff(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("cannot parse rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            BigInt::from_str(n.trim()).map_err(|_| bad())?,
            BigInt::from_str(d.trim()).map_err(|_| bad())?,
        ),
        None => (BigInt::from_str(s).map_err(|_| bad())?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(Error::Domain(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Serialized as a JSON array of `"num/den"` strings, lowest power first.
impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&format_rational(c))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        // Integers may be written bare; anything else must be a "p/q" string.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coeff {
            Int(i64),
            Text(String),
        }
        let raw = Vec::<Coeff>::deserialize(deserializer)?;
        let coeffs = raw
            .iter()
            .map(|c| match c {
                Coeff::Int(v) => Ok(int(*v)),
                Coeff::Text(s) => parse_rational(s).map_err(de::Error::custom),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(RationalPoly::new(coeffs))
    }
}

/// `C(n,k) x^k (1-x)^{n-k}` in the monomial basis.
pub fn bernstein_poly(n: usize, k: usize) -> RationalPoly {
    let mut coeffs = vec![Rational::zero(); n + 1];
    let c_nk = binomial(n, k);
    for j in 0..=n - k {
        let v = &c_nk * binomial(n - k, j);
        coeffs[k + j] = Rational::from_integer(if j % 2 == 0 { v } else { -v });
    }
    RationalPoly::new(coeffs)
}

/// Polynomial stored by its coefficients in the degree-`n` Bernstein basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactBernsteinForm {
    pub n: usize,
    pub coeffs: Vec<Rational>,
}

impl ExactBernsteinForm {
    /// Bernstein coefficients of `p` in degree `n`:
    /// `c_k = Σ_{i≤k} C(k,i)/C(n,i) a_i`.
    pub fn from_monomial(p: &RationalPoly, n: usize) -> Result<Self> {
        if p.degree().is_some_and(|d| d > n) {
            return Err(Error::Domain(format!(
                "degree {} polynomial has no degree-{n} Bernstein form",
                p.degree().unwrap()
            )));
        }
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = Rational::zero();
                for (i, a) in p.coeffs.iter().enumerate().take(k + 1) {
                    if a.is_zero() {
                        continue;
                    }
                    acc += a * Rational::new(binomial(k, i), binomial(n, i));
                }
                acc
            })
            .collect();
        Ok(Self { n, coeffs })
    }

    pub fn to_monomial(&self) -> RationalPoly {
        let mut out = vec![Rational::zero(); self.n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let b = bernstein_poly(self.n, k);
            for (i, bc) in b.coeffs().iter().enumerate() {
                out[i] += c * bc;
            }
        }
        RationalPoly::new(out)
    }

    /// Same polynomial in the degree `n + 1` basis.
    pub fn elevate(&self) -> Self {
        let n1 = self.n + 1;
        let coeffs = (0..=n1)
            .map(|k| {
                let left = if k > 0 {
                    &self.coeffs[k - 1] * rat(k as i64, n1 as i64)
                } else {
                    Rational::zero()
                };
                let right = if k <= self.n {
                    &self.coeffs[k] * rat((n1 - k) as i64, n1 as i64)
                } else {
                    Rational::zero()
                };
                left + right
            })
            .collect();
        Self { n: n1, coeffs }
    }

    /// `D̃` as a coefficient map: `(D̃p)_j = j(n-j)(c_{j+1} - 2c_j + c_{j-1})`.
    pub fn dtilde(&self) -> Self {
        let n = self.n;
        let coeffs = (0..=n)
            .map(|j| {
                if j == 0 || j == n {
                    return Rational::zero();
                }
                let second = &self.coeffs[j + 1] - int(2) * &self.coeffs[j] + &self.coeffs[j - 1];
                second * int((j * (n - j)) as i64)
            })
            .collect();
        Self { n, coeffs }
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }
}

/// `∫₀¹ P_{m,j}(t) p(t) dt`, exact.
pub fn integrate_against_basis(m: usize, j: usize, p: &RationalPoly) -> Result<Rational> {
    if j > m {
        return Err(Error::Domain(format!("basis index {j} exceeds degree {m}")));
    }
    // C(m,j) ∫ t^{j+i}(1-t)^{m-j} = w_i with w_0 = 1/(m+1),
    // w_i = w_{i-1} (j+i)/(m+i+1).
    let mut weight = rat(1, (m + 1) as i64);
    let mut acc = Rational::zero();
    for (i, a) in p.coeffs().iter().enumerate() {
        if i > 0 {
            weight *= rat((j + i) as i64, (m + i + 1) as i64);
        }
        if !a.is_zero() {
            acc += a * &weight;
        }
    }
    Ok(acc)
}

/// `u_{n,0} = f(0)`, `u_{n,n} = f(1)` and
/// `u_{n,k} = (n-1) ∫₀¹ P_{n-2,k-1}(t) f(t) dt` in between.
pub fn u_coefficients_exact(f: &RationalPoly, n: usize) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::Domain("U_n needs n >= 1".into()));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(f.eval(&Rational::zero()));
    let scale = int(n as i64 - 1);
    for k in 1..n {
        out.push(integrate_against_basis(n - 2, k - 1, f)? * &scale);
    }
    out.push(f.eval(&Rational::one()));
    Ok(out)
}

pub fn apply_u_exact(f: &RationalPoly, n: usize) -> Result<ExactBernsteinForm> {
    Ok(ExactBernsteinForm {
        n,
        coeffs: u_coefficients_exact(f, n)?,
    })
}

/// `D̃p = φ p''`.
pub fn dtilde_exact(p: &RationalPoly) -> RationalPoly {
    &RationalPoly::phi() * &p.derivative().derivative()
}

pub fn dtilde_power_exact(p: &RationalPoly, ell: usize) -> RationalPoly {
    (0..ell).fold(p.clone(), |acc, _| dtilde_exact(&acc))
}

/// `Ũ_n f`, evaluated two independent ways:
///
/// 1. `U_n(f - D̃f/n)`;
/// 2. `Σ_k u_{n,k}(f) (P_{n,k} - D̃P_{n,k}/n)` with each `D̃P_{n,k}` expanded
///    in the monomial basis.
///
/// Disagreement is a bug and is reported as an invariant violation.
pub fn apply_utilde_exact(f: &RationalPoly, n: usize) -> Result<ExactBernsteinForm> {
    let inv_n = rat(1, n.max(1) as i64);
    let shifted = f - &dtilde_exact(f).scale(&inv_n);
    let first = apply_u_exact(&shifted, n)?;
    let second = utilde_by_modified_basis(f, n)?;
    let first_poly = first.to_monomial();
    if first_poly != second {
        return Err(Error::InvariantViolation(format!(
            "Ũ_{n} routes disagree: U_n(f - D̃f/n) = {first_poly}, Σ u P̃ = {second}"
        )));
    }
    Ok(first)
}

/// `Σ_k u_{n,k}(f) (P_{n,k} - D̃P_{n,k}/n)`, straight from the definition.
pub fn utilde_by_modified_basis(f: &RationalPoly, n: usize) -> Result<RationalPoly> {
    let inv_n = rat(1, n.max(1) as i64);
    let u = u_coefficients_exact(f, n)?;
    let mut out = RationalPoly::zero();
    for (k, uk) in u.iter().enumerate() {
        if uk.is_zero() {
            continue;
        }
        let p = bernstein_poly(n, k);
        let modified = &p - &dtilde_exact(&p).scale(&inv_n);
        out = &out + &modified.scale(uk);
    }
    Ok(out)
}

/// `U_n f` as a monomial polynomial.
pub fn u_poly(f: &RationalPoly, n: usize) -> Result<RationalPoly> {
    Ok(apply_u_exact(f, n)?.to_monomial())
}

/// `Ũ_n f` as a monomial polynomial.
pub fn utilde_poly(f: &RationalPoly, n: usize) -> Result<RationalPoly> {
    Ok(apply_utilde_exact(f, n)?.to_monomial())
}

/// One exactly checked identity and the largest coefficient of `lhs - rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub name: &'static str,
    pub value: Rational,
}

impl Discrepancy {
    fn between(name: &'static str, lhs: &RationalPoly, rhs: &RationalPoly) -> Self {
        Self {
            name,
            value: (lhs - rhs).max_abs_coeff(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// Discrepancies of `D̃U_n = U_nD̃`, `Σ u_{n,k} P̃_{n,k} = U_n(f - D̃f/n)
/// = U_n f - D̃U_n f/n`, `D̃Ũ_n = Ũ_nD̃`, `U_nŨ_n = Ũ_nU_n` and
/// `Ũ_mŨ_n = Ũ_nŨ_m` on `f`, without judging them.
pub fn commute_discrepancies(f: &RationalPoly, n: usize, m: usize) -> Result<Vec<Discrepancy>> {
    let df = dtilde_exact(f);
    let un_f = u_poly(f, n)?;
    let ut_n_f = utilde_poly(f, n)?;
    let ut_m_f = utilde_poly(f, m)?;
    let by_basis = utilde_by_modified_basis(f, n)?;
    let inv_n = rat(1, n as i64);
    Ok(vec![
        Discrepancy::between("DU=UD", &dtilde_exact(&un_f), &u_poly(&df, n)?),
        Discrepancy::between("Ut=U(I-D/n)", &by_basis, &u_poly(&(f - &df.scale(&inv_n)), n)?),
        Discrepancy::between("Ut=U-DU/n", &by_basis, &(&un_f - &dtilde_exact(&un_f).scale(&inv_n))),
        Discrepancy::between("DUt=UtD", &dtilde_exact(&ut_n_f), &utilde_poly(&df, n)?),
        Discrepancy::between("UUt=UtU", &u_poly(&ut_n_f, n)?, &utilde_poly(&un_f, n)?),
        Discrepancy::between("UtmUtn=UtnUtm", &utilde_poly(&ut_n_f, m)?, &utilde_poly(&ut_m_f, n)?),
    ])
}

/// Report of [`commute_check_exact`]; every discrepancy is exactly zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommuteReport {
    pub n: usize,
    pub m: usize,
    pub discrepancies: Vec<Discrepancy>,
}

pub fn commute_check_exact(f: &RationalPoly, n: usize, m: usize) -> Result<CommuteReport> {
    let discrepancies = commute_discrepancies(f, n, m)?;
    if let Some(bad) = discrepancies.iter().find(|d| !d.is_zero()) {
        return Err(Error::InvariantViolation(format!(
            "{} fails for f = {f}, n = {n}, m = {m}: discrepancy {}",
            bad.name, bad.value
        )));
    }
    Ok(CommuteReport { n, m, discrepancies })
}

/// `Ũ_k f - Ũ_{k+1} f + D̃U_{k+1}D̃f / (k²(k+1))`.
pub fn telescope_discrepancy(f: &RationalPoly, k: usize) -> Result<RationalPoly> {
    if k == 0 {
        return Err(Error::Domain("telescoping step needs k >= 1".into()));
    }
    let step = &utilde_poly(f, k)? - &utilde_poly(f, k + 1)?;
    let kk = k as i64;
    let correction = dtilde_exact(&u_poly(&dtilde_exact(f), k + 1)?).scale(&rat(1, kk * kk * (kk + 1)));
    Ok(&step + &correction)
}

/// Exact check of `Ũ_k f - Ũ_{k+1} f = -D̃U_{k+1}D̃f / (k²(k+1))`; returns the
/// (zero) discrepancy.
pub fn telescope_check_exact(f: &RationalPoly, k: usize) -> Result<Rational> {
    let d = telescope_discrepancy(f, k)?.max_abs_coeff();
    if !d.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "telescoping identity fails for f = {f}, k = {k}: discrepancy {d}"
        )));
    }
    Ok(d)
}
