//! Floating-point operators on Bernstein forms.
//!
//! Every output of `U_n` or `Ũ_n` is a degree-`n` polynomial, stored by its
//! Bernstein coefficients and evaluated with de Casteljau. `D̃` acts on those
//! coefficients directly:
//!
//! ```text
//! (D̃p)_j = j (n - j) (c_{j+1} - 2 c_j + c_{j-1})
//! ```
//!
//! which follows from `P''` in the degree `n - 2` basis and
//! `φ P_{n-2,k} = (k+1)(n-k-1)/((n-1)n) · P_{n,k+1}`. Iterates of `D̃` on operator
//! outputs therefore never touch a grid.

use crate::error::{Error, Result};
use crate::exactpoly::{dtilde_power_exact, u_coefficients_exact, RationalPoly};
use crate::quadrature::{gauss_legendre, u_coefficients_numeric, FnIntegrand, Integrand, MAX_NODES};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default target tolerance for the quadrature of interior functionals.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Membership flags deciding which estimates apply to a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SmoothnessClass {
    /// `f ∈ W²(φ)`: `φ f''` bounded.
    pub w2: bool,
    /// `f ∈ W²₀(φ)`: additionally `φ f'' → 0` at both endpoints.
    pub w2_zero: bool,
    /// `D̃f ∈ W²(φ)`.
    pub dtilde_w2: bool,
    /// `D̃f ∈ W²₀(φ)`.
    pub dtilde_w2_zero: bool,
    /// `D̃³f` bounded.
    pub dtilde3_bounded: bool,
}

impl SmoothnessClass {
    const SMOOTH: Self = Self {
        w2: true,
        w2_zero: true,
        dtilde_w2: true,
        dtilde_w2_zero: true,
        dtilde3_bounded: true,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Polynomial(RationalPoly),
    Exp,
    SinPi,
    /// `|t - 1/2|^{5/2}`.
    AbsPow52,
}

/// A test function with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub id: String,
    pub kind: FunctionKind,
    poly_f64: Vec<f64>,
}

pub const CATALOG_IDS: [&str; 8] = ["one", "t", "t2", "t3", "t5-t2", "exp", "sinpi", "abs52"];

impl FunctionSpec {
    pub fn polynomial(id: impl Into<String>, p: RationalPoly) -> Self {
        let poly_f64 = p.to_f64_coeffs();
        Self {
            id: id.into(),
            kind: FunctionKind::Polynomial(p),
            poly_f64,
        }
    }

    fn transcendental(id: &str, kind: FunctionKind) -> Self {
        Self {
            id: id.into(),
            kind,
            poly_f64: Vec::new(),
        }
    }

    /// Looks up a catalog entry.
    pub fn by_id(id: &str) -> Result<Self> {
        let poly = |c: &[i64]| Ok(Self::polynomial(id, RationalPoly::from_integers(c)));
        match id {
            "one" => poly(&[1]),
            "t" => poly(&[0, 1]),
            "t2" => poly(&[0, 0, 1]),
            "t3" => poly(&[0, 0, 0, 1]),
            "t5-t2" => poly(&[0, 0, -1, 0, 0, 1]),
            "exp" => Ok(Self::transcendental(id, FunctionKind::Exp)),
            "sinpi" => Ok(Self::transcendental(id, FunctionKind::SinPi)),
            "abs52" => Ok(Self::transcendental(id, FunctionKind::AbsPow52)),
            _ => Err(Error::Domain(format!(
                "unknown function id {id:?}; known: {}",
                CATALOG_IDS.join(", ")
            ))),
        }
    }

    pub fn catalog() -> Vec<Self> {
        CATALOG_IDS.iter().map(|id| Self::by_id(id).unwrap()).collect()
    }

    pub fn exact_poly(&self) -> Option<&RationalPoly> {
        match &self.kind {
            FunctionKind::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    /// `None` for transcendental functions; the zero polynomial reports degree 0.
    pub fn polynomial_degree(&self) -> Option<usize> {
        self.exact_poly().map(|p| p.degree().unwrap_or(0))
    }

    pub fn smoothness(&self) -> SmoothnessClass {
        match self.kind {
            FunctionKind::AbsPow52 => SmoothnessClass {
                w2: true,
                w2_zero: true,
                // φ f'''' ~ |t - 1/2|^{-3/2} near the kink.
                dtilde_w2: false,
                dtilde_w2_zero: false,
                dtilde3_bounded: false,
            },
            _ => SmoothnessClass::SMOOTH,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `f^{(order)}(x)`.
    pub fn derivative(&self, order: usize, x: f64) -> f64 {
        match &self.kind {
            FunctionKind::Polynomial(_) => {
                let c = &self.poly_f64;
                if order >= c.len() {
                    return 0.0;
                }
                // Horner on the differentiated coefficients.
                let mut acc = 0.0;
                for i in (order..c.len()).rev() {
                    let falling: f64 = (0..order).map(|r| (i - r) as f64).product();
                    acc = acc * x + c[i] * falling;
                }
                acc
            }
            FunctionKind::Exp => x.exp(),
            FunctionKind::SinPi => {
                let amp = PI.powi(order as i32);
                let arg = PI * x;
                amp * match order % 4 {
                    0 => arg.sin(),
                    1 => arg.cos(),
                    2 => -arg.sin(),
                    _ => -arg.cos(),
                }
            }
            FunctionKind::AbsPow52 => {
                let u = x - 0.5;
                let p = 2.5 - order as f64;
                let coeff: f64 = (0..order).map(|r| 2.5 - r as f64).product();
                let sign = if u < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
                if u == 0.0 {
                    return if p > 0.0 { 0.0 } else { f64::INFINITY };
                }
                sign * coeff * u.abs().powf(p)
            }
        }
    }

    /// `x ↦ D̃^ℓ f(x)`. Polynomials go through the exact operator; other
    /// functions through the expansion `D̃^ℓ f = Σ_j a_j(x) f^{(j)}(x)`.
    pub fn dtilde_power(&self, ell: usize) -> Box<dyn Fn(f64) -> f64 + Send + Sync + '_> {
        if let Some(p) = self.exact_poly() {
            let q = dtilde_power_exact(p, ell).to_f64_coeffs();
            return Box::new(move |x| q.iter().rev().fold(0.0, |acc, c| acc * x + c));
        }
        let expr = dtilde_expansion(ell);
        Box::new(move |x| {
            expr.iter()
                .enumerate()
                .filter(|(_, a)| !a.is_empty())
                .map(|(j, a)| {
                    let coeff = a.iter().rev().fold(0.0, |acc, c| acc * x + c);
                    if coeff == 0.0 {
                        0.0
                    } else {
                        coeff * self.derivative(j, x)
                    }
                })
                .sum()
        })
    }

    /// `D̃f` as a catalog-style spec, available for polynomials only.
    pub fn dtilde_spec(&self) -> Option<Self> {
        self.exact_poly()
            .map(|p| Self::polynomial(format!("D({})", self.id), dtilde_power_exact(p, 1)))
    }
}

impl Integrand for FunctionSpec {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn polynomial_degree(&self) -> Option<usize> {
        FunctionSpec::polynomial_degree(self)
    }
}

/// Coefficient polynomials `a_j` (f64, monomial) with `D̃^ℓ = Σ_j a_j D^j`,
/// from `D̃ (a D^j) = φ (a'' D^j + 2a' D^{j+1} + a D^{j+2})`.
pub fn dtilde_expansion(ell: usize) -> Vec<Vec<f64>> {
    let mut ops: Vec<RationalPoly> = vec![RationalPoly::one()];
    let phi = RationalPoly::phi();
    for _ in 0..ell {
        let mut next = vec![RationalPoly::zero(); ops.len() + 2];
        for (j, a) in ops.iter().enumerate() {
            let da = a.derivative();
            let dda = da.derivative();
            next[j] = &next[j] + &(&phi * &dda);
            next[j + 1] = &next[j + 1] + &(&phi * &da).scale(&crate::exactpoly::int(2));
            next[j + 2] = &next[j + 2] + &(&phi * a);
        }
        ops = next;
    }
    ops.iter().map(RationalPoly::to_f64_coeffs).collect()
}

/// Polynomial `Σ c_k P_{n,k}` in the degree-`n` Bernstein basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinForm {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl BernsteinForm {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("a Bernstein form needs at least one coefficient".into()));
        }
        Ok(Self {
            degree: coeffs.len() - 1,
            coeffs,
        })
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; degree + 1],
        }
    }

    pub fn from_exact(form: &crate::exactpoly::ExactBernsteinForm) -> Self {
        Self {
            degree: form.n,
            coeffs: form.to_f64_coeffs(),
        }
    }

    /// Rejects forms whose coefficient count does not match the degree
    /// (possible after deserialization).
    pub fn validate(&self) -> Result<()> {
        if self.coeffs.len() != self.degree + 1 {
            return Err(Error::Domain(format!(
                "degree {} form carries {} coefficients",
                self.degree,
                self.coeffs.len()
            )));
        }
        Ok(())
    }

    /// de Casteljau evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut b = self.coeffs.clone();
        let y = 1.0 - x;
        for r in 1..b.len() {
            for i in 0..b.len() - r {
                b[i] = y * b[i] + x * b[i + 1];
            }
        }
        b[0]
    }

    /// Same polynomial in the degree `degree + 1` basis.
    pub fn elevate(&self) -> Self {
        let n1 = self.degree + 1;
        let mut coeffs = vec![0.0; n1 + 1];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            let a = k as f64 / n1 as f64;
            let left = if k > 0 { self.coeffs[k - 1] } else { 0.0 };
            let right = if k <= self.degree { self.coeffs[k] } else { 0.0 };
            *slot = a * left + (1.0 - a) * right;
        }
        Self { degree: n1, coeffs }
    }

    pub fn elevate_to(&self, degree: usize) -> Result<Self> {
        if degree < self.degree {
            return Err(Error::Domain(format!(
                "cannot lower a degree-{} form to {degree}",
                self.degree
            )));
        }
        let mut out = self.clone();
        while out.degree < degree {
            out = out.elevate();
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s · other`, elevating to the common degree.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        let d = self.degree.max(other.degree);
        let a = self.elevate_to(d).unwrap();
        let b = other.elevate_to(d).unwrap();
        Self {
            degree: d,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + s * y).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, -1.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// `D̃p` for a Bernstein form; output has the same degree.
pub fn dtilde_form(p: &BernsteinForm) -> BernsteinForm {
    let n = p.degree;
    if n < 2 {
        return BernsteinForm::zero(n);
    }
    // Second differences give p'' / (n(n-1)) in the degree n-2 basis; the
    // weight (i+1)(n-1-i) absorbs both that factor and multiplication by φ.
    let c = &p.coeffs;
    let mut out = vec![0.0; n + 1];
    for i in 0..=n - 2 {
        let second = c[i + 2] - 2.0 * c[i + 1] + c[i];
        out[i + 1] = ((i + 1) * (n - 1 - i)) as f64 * second;
    }
    BernsteinForm { degree: n, coeffs: out }
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("operators need n >= 1".into()));
    }
    Ok(())
}

/// `U_n f` for a catalog function. Polynomials use the exact coefficients.
pub fn apply_u(f: &FunctionSpec, n: usize, tol: f64) -> Result<BernsteinForm> {
    check_degree(n)?;
    if let Some(p) = f.exact_poly() {
        let u = u_coefficients_exact(p, n)?;
        return BernsteinForm::new(u.iter().map(crate::exactpoly::rational_to_f64).collect());
    }
    apply_u_integrand(f, n, tol)
}

/// `U_n f` for any sampled integrand, through quadrature.
pub fn apply_u_integrand(f: &dyn Integrand, n: usize, tol: f64) -> Result<BernsteinForm> {
    check_degree(n)?;
    BernsteinForm::new(u_coefficients_numeric(f, n, tol)?)
}

/// `U_n p` for a polynomial given as a Bernstein form. The interior
/// integrands are polynomials of degree `n - 2 + deg p`, so one Gauss rule of
/// matching size integrates them exactly.
pub fn apply_u_form(p: &BernsteinForm, n: usize) -> Result<BernsteinForm> {
    check_degree(n)?;
    p.validate()?;
    let exact_nodes = (n + p.degree).div_ceil(2).max(1);
    if exact_nodes > MAX_NODES {
        return Err(Error::Unsupported(format!(
            "U_{n} of a degree-{} form needs {exact_nodes} nodes (max {MAX_NODES})",
            p.degree
        )));
    }
    let integrand = FnIntegrand {
        f: |x| p.eval(x),
        degree: Some(p.degree),
    };
    let rule = gauss_legendre(exact_nodes)?;
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = p.coeffs[0];
    coeffs[n] = p.coeffs[p.degree];
    if n >= 2 {
        let mut basis = vec![0.0; n - 1];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = integrand.value(t) * w;
            crate::basis::fill_triangular(&mut basis, t);
            for (k, b) in basis.iter().enumerate() {
                coeffs[k + 1] += v * b;
            }
        }
        for c in &mut coeffs[1..n] {
            *c *= (n - 1) as f64;
        }
    }
    BernsteinForm::new(coeffs)
}

/// `U - D̃U/n` on an already computed `U_n` output.
fn modify(u: BernsteinForm) -> BernsteinForm {
    let n = u.degree as f64;
    let d = dtilde_form(&u);
    u.add_scaled(&d, -1.0 / n)
}

/// `Ũ_n f = U_n f - (1/n) D̃ U_n f`.
pub fn apply_utilde(f: &FunctionSpec, n: usize, tol: f64) -> Result<BernsteinForm> {
    Ok(modify(apply_u(f, n, tol)?))
}

pub fn apply_utilde_integrand(f: &dyn Integrand, n: usize, tol: f64) -> Result<BernsteinForm> {
    Ok(modify(apply_u_integrand(f, n, tol)?))
}

pub fn apply_utilde_form(p: &BernsteinForm, n: usize) -> Result<BernsteinForm> {
    Ok(modify(apply_u_form(p, n)?))
}

/// `Ũ_n^times f`. After the first application the operand is a polynomial,
/// so later steps use [`apply_u_form`].
pub fn iterate_utilde(f: &FunctionSpec, n: usize, times: usize, tol: f64) -> Result<BernsteinForm> {
    if times == 0 {
        return Err(Error::Domain("iterate_utilde needs times >= 1".into()));
    }
    let mut g = apply_utilde(f, n, tol)?;
    for _ in 1..times {
        g = apply_utilde_form(&g, n)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{bernstein_vector, t_value};
    use crate::exactpoly::{apply_utilde_exact, rat, utilde_poly, ExactBernsteinForm};
    use approx::assert_abs_diff_eq;

    fn spec(id: &str) -> FunctionSpec {
        FunctionSpec::by_id(id).unwrap()
    }

    fn grid() -> impl Iterator<Item = f64> {
        (0..=200).map(|i| i as f64 / 200.0)
    }

    #[test]
    fn catalog_is_complete() {
        let cat = FunctionSpec::catalog();
        assert_eq!(cat.len(), CATALOG_IDS.len());
        assert!(FunctionSpec::by_id("nope").is_err());
        assert_eq!(spec("t5-t2").polynomial_degree(), Some(5));
        assert_eq!(spec("one").polynomial_degree(), Some(0));
        assert_eq!(spec("exp").polynomial_degree(), None);
        assert!(!spec("abs52").smoothness().dtilde_w2);
        assert!(spec("abs52").smoothness().w2_zero);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for f in FunctionSpec::catalog() {
            for j in 1..=6 {
                for i in 1..=50 {
                    let x = i as f64 / 51.0;
                    if f.kind == FunctionKind::AbsPow52 && (x - 0.5).abs() < 0.02 {
                        continue;
                    }
                    let fd = (f.derivative(j - 1, x + h) - f.derivative(j - 1, x - h)) / (2.0 * h);
                    let d = f.derivative(j, x);
                    let scale = d.abs().max(1.0);
                    assert!((fd - d).abs() <= 1e-5 * scale, "{} j={j} x={x}: {fd} vs {d}", f.id);
                }
            }
            assert_eq!(f.derivative(0, 0.3), f.eval(0.3));
        }
    }

    #[test]
    fn dtilde_expansion_matches_exact_on_polynomials() {
        let f = spec("t5-t2");
        let p = f.exact_poly().unwrap();
        for ell in 1..=3 {
            let expr = dtilde_expansion(ell);
            let exact = dtilde_power_exact(p, ell);
            for x in grid() {
                let via_expr: f64 = expr
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a.iter().rev().fold(0.0, |acc, c| acc * x + c) * f.derivative(j, x))
                    .sum();
                assert!((via_expr - exact.eval_f64(x)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn dtilde_of_exp_matches_hand_expansion() {
        // D̃e^t = φ e^t, D̃²e^t = φ(φ e^t)'' = φ e^t (φ - 2 + 2(1 - 2x)).
        let f = spec("exp");
        let d1 = f.dtilde_power(1);
        let d2 = f.dtilde_power(2);
        for x in grid() {
            let phi = x * (1.0 - x);
            assert_abs_diff_eq!(d1(x), phi * x.exp(), epsilon = 1e-14);
            let expect = phi * x.exp() * (phi - 2.0 + 2.0 * (1.0 - 2.0 * x));
            assert_abs_diff_eq!(d2(x), expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn form_evaluation_and_elevation() {
        let p = BernsteinForm::new(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(1.0), 3.0);
        let e = p.elevate_to(7).unwrap();
        for x in grid() {
            assert_abs_diff_eq!(p.eval(x), e.eval(x), epsilon = 1e-14);
        }
        assert!(e.elevate_to(3).is_err());
        assert!(BernsteinForm::new(vec![]).is_err());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"degree":3,"coeffs":[1.0,-2.0,0.5,3.0]}"#);
        let bad: BernsteinForm = serde_json::from_str(r#"{"degree":4,"coeffs":[1.0]}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dtilde_form_examples() {
        for n in [2, 5, 40, 100, 512] {
            let lin = BernsteinForm::new((0..=n).map(|k| 0.3 - 1.7 * k as f64 / n as f64).collect()).unwrap();
            let d = dtilde_form(&lin);
            let scale = n as f64 * f64::EPSILON * lin.max_abs_coeff();
            let sup = (0..=2000).map(|i| d.eval(i as f64 / 2000.0).abs()).fold(0.0, f64::max);
            assert!(sup <= 8.0 * scale, "n={n}: {sup}");
            // Coefficientwise, rounding in c is amplified by j(n - j) ≤ n²/4.
            assert!(d.max_abs_coeff() <= n as f64 * scale);
        }
        let t2 = BernsteinForm::from_exact(&ExactBernsteinForm::from_monomial(&RationalPoly::monomial(2), 2).unwrap());
        assert_abs_diff_eq!(dtilde_form(&t2).eval(0.25), 0.375, epsilon = 1e-15);
        assert_eq!(
            dtilde_form(&BernsteinForm::new(vec![1.0, 2.0]).unwrap()).coeffs,
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn dtilde_form_on_unit_vectors_is_t_times_p() {
        for n in [2usize, 3, 9, 30] {
            for k in 0..=n {
                let mut c = vec![0.0; n + 1];
                c[k] = 1.0;
                let d = dtilde_form(&BernsteinForm::new(c).unwrap());
                for &x in &[0.07, 0.33, 0.5, 0.91] {
                    let b = bernstein_vector(n, x).unwrap();
                    let expect = t_value(n, k, x).unwrap() * b.values[k];
                    assert!((d.eval(x) - expect).abs() <= 1e-12 * (n * n) as f64);
                }
            }
        }
    }

    #[test]
    fn dtilde_form_matches_exact_coefficient_map() {
        let p = RationalPoly::from_integers(&[2, -3, 0, 7, -1]);
        for n in 4..20 {
            let exact = ExactBernsteinForm::from_monomial(&p, n).unwrap();
            let float = dtilde_form(&BernsteinForm::from_exact(&exact));
            let expect = exact.dtilde().to_f64_coeffs();
            for (a, b) in float.coeffs.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn apply_u_examples() {
        let u = apply_u(&spec("t"), 9, DEFAULT_TOL).unwrap();
        for (k, c) in u.coeffs.iter().enumerate() {
            assert_abs_diff_eq!(*c, k as f64 / 9.0, epsilon = 1e-15);
        }
        for x in grid() {
            assert_abs_diff_eq!(u.eval(x), x, epsilon = 1e-12);
        }
        assert!(apply_u(&spec("one"), 6, DEFAULT_TOL)
            .unwrap()
            .coeffs
            .iter()
            .all(|&c| c == 1.0));
        let u2 = apply_u(&spec("t2"), 2, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(u2.eval(0.5), 5.0 / 12.0, epsilon = 1e-15);
        assert!(apply_u(&spec("t2"), 0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn apply_utilde_examples() {
        let ut = apply_utilde(&spec("t"), 7, DEFAULT_TOL).unwrap();
        for x in grid() {
            assert_abs_diff_eq!(ut.eval(x), x, epsilon = 1e-12);
        }
        let ut3 = apply_utilde(&spec("t2"), 3, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(ut3.eval(0.5), 0.25 + 0.25 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn float_utilde_matches_exact_for_polynomials() {
        for id in ["t2", "t3", "t5-t2"] {
            let f = spec(id);
            for n in [1, 2, 3, 8, 20, 40] {
                let exact = apply_utilde_exact(f.exact_poly().unwrap(), n).unwrap();
                let exact_f64 = BernsteinForm::from_exact(&exact);
                let float = apply_utilde(&f, n, DEFAULT_TOL).unwrap();
                for x in grid() {
                    assert!((float.eval(x) - exact_f64.eval(x)).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn form_path_matches_exact_composition() {
        // Ũ_2 Ũ_2 t² from the exact oracle.
        let t2 = RationalPoly::monomial(2);
        let twice = utilde_poly(&utilde_poly(&t2, 2).unwrap(), 2).unwrap();
        let float = iterate_utilde(&spec("t2"), 2, 2, DEFAULT_TOL).unwrap();
        for x in grid() {
            assert!((float.eval(x) - twice.eval_f64(x)).abs() <= 1e-10);
        }
        let f = RationalPoly::from_integers(&[0, 0, -1, 0, 0, 1]);
        let exact = utilde_poly(&utilde_poly(&utilde_poly(&f, 9).unwrap(), 9).unwrap(), 9).unwrap();
        let float = iterate_utilde(&spec("t5-t2"), 9, 3, DEFAULT_TOL).unwrap();
        for x in grid() {
            assert!((float.eval(x) - exact.eval_f64(x)).abs() <= 1e-10);
        }
        assert!(iterate_utilde(&spec("t2"), 3, 0, DEFAULT_TOL).is_err());
        // Mixed degrees: U_4 of a degree-9 form.
        let g = BernsteinForm::from_exact(&ExactBernsteinForm::from_monomial(&f, 9).unwrap());
        let via_form = apply_u_form(&g, 4).unwrap();
        let exact = crate::exactpoly::u_poly(&f, 4).unwrap();
        for x in grid() {
            assert!((via_form.eval(x) - exact.eval_f64(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn endpoint_interpolation_and_linear_reproduction() {
        let lin = FunctionSpec::polynomial("lin", RationalPoly::new(vec![rat(3, 4), rat(-5, 2)]));
        for f in FunctionSpec::catalog() {
            for n in [1, 2, 5, 16] {
                for op in [apply_u, apply_utilde] {
                    let g = op(&f, n, DEFAULT_TOL).unwrap();
                    assert!((g.eval(0.0) - f.eval(0.0)).abs() <= 1e-12);
                    assert!((g.eval(1.0) - f.eval(1.0)).abs() <= 1e-12);
                }
            }
        }
        for n in 1..=100 {
            for op in [apply_u, apply_utilde] {
                let g = op(&lin, n, DEFAULT_TOL).unwrap();
                for x in (0..=20).map(|i| i as f64 / 20.0) {
                    assert!((g.eval(x) - lin.eval(x)).abs() <= 1e-12, "n={n}");
                }
            }
        }
    }

    #[test]
    fn numeric_and_exact_paths_agree() {
        let f = spec("t3");
        let generic = FnIntegrand {
            f: |x: f64| x * x * x,
            degree: None,
        };
        for n in [2, 7, 30] {
            let a = apply_utilde(&f, n, DEFAULT_TOL).unwrap();
            let b = apply_utilde_integrand(&generic, n, DEFAULT_TOL).unwrap();
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
