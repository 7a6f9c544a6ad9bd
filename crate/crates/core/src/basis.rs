//! Bernstein basis evaluation and the scalar quantities built on it.
//!
//! `P_{n,k}(x) = C(n,k) x^k (1-x)^{n-k}` is evaluated with the triangular
//! degree-raising recurrence. The rational functions
//!
//! ```text
//! T_{n,k}(x) = k(k-1)(1-x)/x - 2k(n-k) + (n-k)(n-k-1) x/(1-x)
//! ```
//!
//! satisfy `φ P''_{n,k} = T_{n,k} P_{n,k}` and drive every norm estimate for the
//! modified operator.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Below this distance from an endpoint, `T_{n,k}` is treated as singular.
pub const SINGULAR_EPS: f64 = 1e-30;

/// Degrees above this switch to log-space evaluation of the basis.
pub const LOG_SPACE_DEGREE: usize = 1000;

/// All `n + 1` Bernstein basis values at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector {
    pub n: usize,
    pub x: f64,
    pub values: Vec<f64>,
}

impl BasisVector {
    /// `P_{n,k}(x)`, with the convention `P_{n,k} = 0` outside `0..=n`.
    #[inline]
    pub fn get(&self, k: isize) -> f64 {
        if k < 0 || k as usize > self.n {
            0.0
        } else {
            self.values[k as usize]
        }
    }

    /// `D̃ P_{n,k}(x)` from the three-term expansion
    /// `(k-1)(n-k+1) P_{n,k-1} - 2k(n-k) P_{n,k} + (k+1)(n-k-1) P_{n,k+1}`.
    ///
    /// Unlike `T_{n,k} P_{n,k}` this has no singularity at the endpoints.
    pub fn dtilde(&self, k: usize) -> f64 {
        let n = self.n as f64;
        let kf = k as f64;
        let k = k as isize;
        (kf - 1.0) * (n - kf + 1.0) * self.get(k - 1) - 2.0 * kf * (n - kf) * self.get(k)
            + (kf + 1.0) * (n - kf - 1.0) * self.get(k + 1)
    }

    /// `P̃_{n,k}(x) = P_{n,k}(x) - D̃P_{n,k}(x) / n`.
    pub fn modified(&self, k: usize) -> f64 {
        if self.n == 0 {
            return self.values[0];
        }
        self.values[k] - self.dtilde(k) / self.n as f64
    }
}

fn check_unit_interval(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} lies outside [0, 1]")));
    }
    Ok(())
}

/// Evaluates `P_{n,0}(x), ..., P_{n,n}(x)`.
///
/// Up to degree [`LOG_SPACE_DEGREE`] this runs the triangular recurrence
/// `P_{j+1,k} = (1-x) P_{j,k} + x P_{j,k-1}`; above it, values come from
/// `exp(ln C(n,k) + k ln x + (n-k) ln(1-x))` so nothing overflows.
pub fn bernstein_vector(n: usize, x: f64) -> Result<BasisVector> {
    check_unit_interval(x)?;
    let values = if n > LOG_SPACE_DEGREE {
        log_space_vector(n, x)
    } else {
        let mut values = vec![0.0; n + 1];
        fill_triangular(&mut values, x);
        values
    };
    Ok(BasisVector { n, x, values })
}

/// Triangular recurrence writing degree `out.len() - 1` basis values into `out`.
/// No domain check; callers guarantee `x ∈ [0, 1]`.
pub(crate) fn fill_triangular(out: &mut [f64], x: f64) {
    let n = out.len() - 1;
    let y = 1.0 - x;
    out[0] = 1.0;
    for j in 1..=n {
        out[j] = x * out[j - 1];
        for k in (1..j).rev() {
            out[k] = y * out[k] + x * out[k - 1];
        }
        out[0] *= y;
    }
}

fn log_space_vector(n: usize, x: f64) -> Vec<f64> {
    let mut values = vec![0.0; n + 1];
    if x == 0.0 {
        values[0] = 1.0;
        return values;
    }
    if x == 1.0 {
        values[n] = 1.0;
        return values;
    }
    let lx = x.ln();
    let ly = (-x).ln_1p();
    for (k, v) in values.iter_mut().enumerate() {
        let ln = ln_binomial(n, k) + k as f64 * lx + (n - k) as f64 * ly;
        *v = ln.exp();
    }
    values
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn check_index(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("T_{n,k} needs n >= 1".into()));
    }
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

/// Checks that the singular terms of `T_{n,k}` and its derivatives are finite at `x`.
/// The `1/x` part carries `k(k-1)` and the `1/(1-x)` part `(n-k)(n-k-1)`, so
/// for `k ∈ {0, 1}` (resp. `n - k ∈ {0, 1}`) the endpoint is allowed.
fn check_t_domain(n: usize, k: usize, x: f64) -> Result<()> {
    check_index(n, k)?;
    check_unit_interval(x)?;
    if k >= 2 && x < SINGULAR_EPS {
        return Err(Error::Domain(format!("T_{{{n},{k}}} is singular at x = {x}")));
    }
    if n - k >= 2 && 1.0 - x < SINGULAR_EPS {
        return Err(Error::Domain(format!("T_{{{n},{k}}} is singular at x = {x}")));
    }
    Ok(())
}

#[inline]
fn left_weight(k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64
}

#[inline]
fn right_weight(n: usize, k: usize) -> f64 {
    left_weight(n - k)
}

/// `T_{n,k}(x)` in its rational form.
pub fn t_value(n: usize, k: usize, x: f64) -> Result<f64> {
    check_t_domain(n, k, x)?;
    let a = left_weight(k);
    let b = right_weight(n, k);
    let left = if a == 0.0 { 0.0 } else { a * (1.0 - x) / x };
    let right = if b == 0.0 { 0.0 } else { b * x / (1.0 - x) };
    Ok(left - 2.0 * (k * (n - k)) as f64 + right)
}

/// `T_{n,k}(x)` written through the centered moment variable `k/n - x`:
/// `n [-1 - (1-2x)/φ (k/n - x) + n/φ (k/n - x)^2]`. Only defined on `(0, 1)`.
pub fn t_value_centered(n: usize, k: usize, x: f64) -> Result<f64> {
    check_index(n, k)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("centered form of T needs 0 < x < 1, got {x}")));
    }
    let nf = n as f64;
    let phi = x * (1.0 - x);
    let d = k as f64 / nf - x;
    Ok(nf * (-1.0 - (1.0 - 2.0 * x) / phi * d + nf / phi * d * d))
}

/// `T'_{n,k}(x) = -k(k-1)/x^2 + (n-k)(n-k-1)/(1-x)^2`.
pub fn t_prime(n: usize, k: usize, x: f64) -> Result<f64> {
    check_t_domain(n, k, x)?;
    let a = left_weight(k);
    let b = right_weight(n, k);
    let left = if a == 0.0 { 0.0 } else { a / (x * x) };
    let right = if b == 0.0 { 0.0 } else { b / ((1.0 - x) * (1.0 - x)) };
    Ok(right - left)
}

/// `T''_{n,k}(x) = 2k(k-1)/x^3 + 2(n-k)(n-k-1)/(1-x)^3`, positive on `(0, 1)`
/// whenever `n >= 2`.
pub fn t_double_prime(n: usize, k: usize, x: f64) -> Result<f64> {
    check_t_domain(n, k, x)?;
    let a = left_weight(k);
    let b = right_weight(n, k);
    let left = if a == 0.0 { 0.0 } else { 2.0 * a / (x * x * x) };
    let y = 1.0 - x;
    let right = if b == 0.0 { 0.0 } else { 2.0 * b / (y * y * y) };
    Ok(left + right)
}

/// The unique zero of `T'_{n,k}` in `(0, 1)`:
/// `√C(k,2) / (√C(k,2) + √C(n-k,2))`. For `2k < n` it lies in
/// `((k-1)/n, k/n)`; `ξ_{n-k} = 1 - ξ_k` gives the other half.
pub fn xi_zero(n: usize, k: usize) -> Result<f64> {
    if k < 2 || k + 2 > n {
        return Err(Error::Domain(format!(
            "xi_zero needs 2 <= k <= n - 2, got n = {n}, k = {k}"
        )));
    }
    let a = (left_weight(k) / 2.0).sqrt();
    let b = (right_weight(n, k) / 2.0).sqrt();
    Ok(a / (a + b))
}

/// Closed form of the Bernstein central moment `μ_{n,i}(x) = Σ (k/n - x)^i P_{n,k}(x)`
/// for `i ≤ 4`.
pub fn moment(n: usize, i: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("moments need n >= 1".into()));
    }
    let nf = n as f64;
    let phi = x * (1.0 - x);
    match i {
        0 => Ok(1.0),
        1 => Ok(0.0),
        2 => Ok(phi / nf),
        3 => Ok((1.0 - 2.0 * x) * phi / (nf * nf)),
        4 => Ok((3.0 * (nf - 2.0) * phi * phi + phi) / (nf * nf * nf)),
        _ => Err(Error::Unsupported(format!(
            "no closed form housed for moment order {i} (max 4)"
        ))),
    }
}

/// `Φ(α) = Σ_k (α - T_{n,k}(x)/n)^2 P_{n,k}(x)`, summed term by term.
pub fn phi_big(alpha: f64, n: usize, x: f64) -> Result<f64> {
    let basis = bernstein_vector(n, x)?;
    let nf = n as f64;
    let mut sum = 0.0;
    for (k, &p) in basis.values.iter().enumerate() {
        if p == 0.0 {
            // Still validate the singular endpoints.
            check_t_domain(n, k, x)?;
            continue;
        }
        let d = alpha - t_value(n, k, x)? / nf;
        sum += d * d * p;
    }
    Ok(sum)
}

/// `λ(n) = Σ_{k≥n} 1/(k²(k+1))` and `θ(n) = Σ_{k≥n} 1/(k²(k+1)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSums {
    pub n: usize,
    pub lambda: f64,
    pub theta: f64,
    /// Certified bound on `|lambda - λ(n)|`.
    pub abs_err: f64,
    /// Certified bound on `|theta - θ(n)|`.
    pub theta_abs_err: f64,
}

const DIRECT_TERMS: usize = 32;

/// `B_{2j} / (2j)!` for `j = 1..=6`.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

/// Summand `x^{-a} (x+1)^{-b}` of a tail series.
#[derive(Debug, Clone, Copy)]
struct PowerProduct {
    a: u32,
    b: u32,
}

impl PowerProduct {
    fn eval(self, x: f64) -> f64 {
        x.powi(-(self.a as i32)) * (x + 1.0).powi(-(self.b as i32))
    }

    /// m-th derivative by Leibniz. All products carry the sign `(-1)^m`, so
    /// the sum has no cancellation.
    fn derivative(self, m: u32, x: f64) -> f64 {
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=m {
            let du = rising(self.a, j) * x.powi(-((self.a + j) as i32));
            let dv = rising(self.b, m - j) * (x + 1.0).powi(-((self.b + m - j) as i32));
            total += binom * du * dv;
            binom = binom * (m - j) as f64 / (j + 1) as f64;
        }
        if m % 2 == 1 {
            -total
        } else {
            total
        }
    }

    /// `∫_K^∞ x^{-a}(x+1)^{-b} dx` from the expansion
    /// `(x+1)^{-b} = Σ_i (-1)^i C(b+i-1, i) x^{-b-i}`, valid for `K > 1`.
    fn tail_integral(self, big_k: f64) -> f64 {
        let mut sum = 0.0;
        let mut coeff = 1.0; // C(b+i-1, i)
        let mut i = 0u32;
        loop {
            let p = (self.a + self.b + i - 1) as i32;
            let term = coeff / (p as f64 * big_k.powi(p));
            let signed = if i.is_multiple_of(2) { term } else { -term };
            sum += signed;
            if term <= 1e-22 * sum.abs() || i > 200 {
                break;
            }
            coeff = coeff * (self.b + i) as f64 / (i + 1) as f64;
            i += 1;
        }
        sum
    }

    /// Returns the tail `Σ_{k≥n}` and a certified error bound.
    fn tail_sum(self, n: usize) -> (f64, f64) {
        let mut acc = NeumaierSum::default();
        for k in n..n + DIRECT_TERMS {
            acc.add(self.eval(k as f64));
        }
        let big_k = (n + DIRECT_TERMS) as f64;
        acc.add(self.tail_integral(big_k));
        acc.add(0.5 * self.eval(big_k));
        let p = BERNOULLI_OVER_FACTORIAL.len() - 1;
        for (j, c) in BERNOULLI_OVER_FACTORIAL[..p].iter().enumerate() {
            acc.add(-c * self.derivative(2 * j as u32 + 1, big_k));
        }
        let value = acc.total();
        // The summand is completely monotone, so the Euler-Maclaurin remainder
        // is bounded by the first omitted correction.
        let truncation = (BERNOULLI_OVER_FACTORIAL[p] * self.derivative(2 * p as u32 + 1, big_k)).abs();
        (value, truncation + 8.0 * f64::EPSILON * value)
    }
}

fn rising(a: u32, j: u32) -> f64 {
    (0..j).map(|i| (a + i) as f64).product()
}

#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Computes `λ(n)` and `θ(n)` by direct summation of the first terms followed
/// by an Euler-Maclaurin tail.
pub fn tail_sums(n: usize) -> Result<TailSums> {
    if n < 2 {
        return Err(Error::Domain(format!("tail sums need n >= 2, got {n}")));
    }
    let (lambda, abs_err) = PowerProduct { a: 2, b: 1 }.tail_sum(n);
    let (theta, theta_abs_err) = PowerProduct { a: 2, b: 2 }.tail_sum(n);
    Ok(TailSums {
        n,
        lambda,
        theta,
        abs_err,
        theta_abs_err,
    })
}
