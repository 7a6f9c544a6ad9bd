//! Gauss-Legendre rules on `[0, 1]` and the composite integration used for the
//! interior functionals `u_{n,k}(f) = (n-1) ∫₀¹ P_{n-2,k-1}(t) f(t) dt`.

use crate::basis::fill_triangular;
use crate::error::{Error, Result};

pub const MAX_NODES: usize = 512;
pub const MAX_PANELS: usize = 1 << 10;
const NEWTON_MAX_ITER: usize = 100;
const NEWTON_STEP_TOL: f64 = 1e-15;

/// Anything that can be sampled on `[0, 1]`. The declared polynomial degree
/// lets rules be sized for exact integration.
pub trait Integrand: Sync {
    fn value(&self, x: f64) -> f64;

    /// `None` for transcendental functions.
    fn polynomial_degree(&self) -> Option<usize>;
}

/// Wraps a closure as an [`Integrand`].
pub struct FnIntegrand<F> {
    pub f: F,
    pub degree: Option<usize>,
}

impl<F: Fn(f64) -> f64 + Sync> Integrand for FnIntegrand<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn polynomial_degree(&self) -> Option<usize> {
        self.degree
    }
}

/// Gauss-Legendre rule mapped to `[0, 1]`; exact for polynomials of degree
/// `2m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub m: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

/// `(P_m(z), P_m'(z))` by the three-term recurrence.
fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let (pm, pm1) = if m == 0 { (1.0, 0.0) } else { (p1, p0) };
    let mf = m as f64;
    // Never evaluated at z = ±1.
    let dp = mf * (z * pm - pm1) / (z * z - 1.0);
    (pm, dp)
}

/// Builds the `m`-point rule by Newton iteration from the Chebyshev-like guesses
/// `cos(π (i + 3/4) / (m + 1/2))`. Only the positive half of the roots is
/// computed; the rest follow by symmetry.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    if m == 0 || m > MAX_NODES {
        return Err(Error::Domain(format!("rule size must be in 1..={MAX_NODES}, got {m}")));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut converged = false;
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < NEWTON_STEP_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence(format!(
                "Newton iteration for Legendre root {i} of degree {m}"
            )));
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d.is_finite() { d } else { dp };
        let w = 1.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[m - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        let (_, dp) = legendre_with_derivative(m, 0.0);
        nodes[m / 2] = 0.5;
        weights[m / 2] = 1.0 / (dp * dp);
    }
    Ok(QuadratureRule {
        m,
        nodes,
        weights,
        exactness: 2 * m - 1,
    })
}

/// Composite rule over `panels` equal subintervals of `[0, 1]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule, panels: usize) -> Result<f64> {
    if panels == 0 {
        return Err(Error::Domain("need at least one panel".into()));
    }
    let h = 1.0 / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        let mut panel = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = a + h * x;
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { x: t, value: v });
            }
            panel += w * v;
        }
        total += h * panel;
    }
    Ok(total)
}

/// Rule size for the interior functionals of `U_n`: exact when the integrand
/// `P_{n-2,k-1} f` is a polynomial; transcendental inputs are sized as if of
/// degree `n` and rely on panel doubling.
pub fn rule_size_for(n: usize, degree: Option<usize>) -> usize {
    let d = degree.unwrap_or(n);
    ((n + d).div_ceil(2) + 4).clamp(24, MAX_NODES)
}

fn interior_integrals(f: &dyn Integrand, n: usize, rule: &QuadratureRule, panels: usize) -> Result<Vec<f64>> {
    let m = n - 2;
    let mut acc = vec![0.0; m + 1];
    let mut basis = vec![0.0; m + 1];
    let h = 1.0 / panels as f64;
    for p in 0..panels {
        let a = p as f64 * h;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = a + h * x;
            let v = f.value(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { x: t, value: v });
            }
            fill_triangular(&mut basis, t);
            let scaled = h * w * v;
            for (slot, b) in acc.iter_mut().zip(&basis) {
                *slot += scaled * b;
            }
        }
    }
    let scale = (n - 1) as f64;
    Ok(acc.into_iter().map(|v| v * scale).collect())
}

/// `u_{n,0..=n}(f)` with endpoints taken exactly and the interior integrals
/// refined by panel doubling until two successive estimates differ by less
/// than `target_tol · max(1, |u|)` in every coefficient.
pub fn u_coefficients_numeric(f: &dyn Integrand, n: usize, target_tol: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("U_n needs n >= 1".into()));
    }
    let f0 = f.value(0.0);
    let f1 = f.value(1.0);
    for (x, v) in [(0.0, f0), (1.0, f1)] {
        if !v.is_finite() {
            return Err(Error::NonFinite { x, value: v });
        }
    }
    if n == 1 {
        return Ok(vec![f0, f1]);
    }
    let rule = gauss_legendre(rule_size_for(n, f.polynomial_degree()))?;
    let mut panels = 1;
    let mut prev = interior_integrals(f, n, &rule, panels)?;
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = interior_integrals(f, n, &rule, panels)?;
        change = 0.0;
        let mut ok = true;
        for (a, b) in prev.iter().zip(&next) {
            let d = (a - b).abs();
            change = f64::max(change, d);
            if d >= target_tol * b.abs().max(1.0) {
                ok = false;
            }
        }
        prev = next;
        if ok {
            return Ok(assemble(f0, prev, f1));
        }
    }
    Err(Error::Tolerance {
        tol: target_tol,
        achieved: change,
        panels,
        best: assemble(f0, prev, f1),
    })
}

fn assemble(f0: f64, interior: Vec<f64>, f1: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(interior.len() + 2);
    out.push(f0);
    out.extend(interior);
    out.push(f1);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{rational_to_f64, u_coefficients_exact, RationalPoly};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn small_rules() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes, vec![0.5]);
        assert_abs_diff_eq!(r1.weights[0], 1.0, epsilon = 1e-15);
        let r2 = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r2.nodes[0], (1.0 - s) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.nodes[1], (1.0 + s) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights[1], 0.5, epsilon = 1e-15);
        assert_eq!(r2.exactness, 3);
        let r5 = gauss_legendre(5).unwrap();
        assert_abs_diff_eq!(integrate(|x| x.powi(9), &r5, 1).unwrap(), 0.1, epsilon = 1e-14);
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(513).is_err());
    }

    #[test]
    fn rule_structure() {
        for m in [1usize, 2, 3, 7, 24, 64, 129, 256, 512] {
            let r = gauss_legendre(m).unwrap();
            let sum: f64 = r.weights.iter().sum();
            assert!((sum - 1.0).abs() <= 4.0 * m as f64 * f64::EPSILON, "m={m} sum={sum}");
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
            assert!(r.nodes.iter().all(|&x| x > 0.0 && x < 1.0));
            for i in 0..m {
                assert!((r.nodes[i] + r.nodes[m - 1 - i] - 1.0).abs() <= 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn monomial_exactness() {
        for m in (1..=48).chain([64, 100, 128, 256, 512]) {
            let r = gauss_legendre(m).unwrap();
            for d in 0..=2 * m - 1 {
                let got = integrate(|x| x.powi(d as i32), &r, 1).unwrap();
                let exact = 1.0 / (d + 1) as f64;
                assert!((got - exact).abs() <= 1e-13 * exact, "m={m} d={d}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let r2 = gauss_legendre(2).unwrap();
        assert_abs_diff_eq!(integrate(|_| 1.0, &r2, 3).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(integrate(|t| t * t, &r2, 1).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let r16 = gauss_legendre(16).unwrap();
        assert_abs_diff_eq!(integrate(f64::exp, &r16, 1).unwrap(), E - 1.0, epsilon = 1e-13);
        assert!(matches!(
            integrate(|t| 1.0 / (t - 0.5), &gauss_legendre(1).unwrap(), 1),
            Err(Error::NonFinite { .. })
        ));
        assert!(integrate(|t| t, &r2, 0).is_err());
    }

    fn poly_integrand(p: &RationalPoly) -> FnIntegrand<impl Fn(f64) -> f64 + Sync + '_> {
        FnIntegrand {
            f: move |x| p.eval_f64(x),
            degree: p.degree(),
        }
    }

    #[test]
    fn u_numeric_examples() {
        let t2 = RationalPoly::monomial(2);
        let u = u_coefficients_numeric(&poly_integrand(&t2), 2, 1e-14).unwrap();
        assert_abs_diff_eq!(u[0], 0.0);
        assert_abs_diff_eq!(u[1], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u[2], 1.0);
        let one = FnIntegrand {
            f: |_| 1.0,
            degree: Some(0),
        };
        let u = u_coefficients_numeric(&one, 7, 1e-14).unwrap();
        assert!(u.iter().all(|&c| (c - 1.0).abs() <= 4.0 * f64::EPSILON));
        let exp = FnIntegrand {
            f: f64::exp,
            degree: None,
        };
        let u = u_coefficients_numeric(&exp, 3, 1e-14).unwrap();
        assert_abs_diff_eq!(u[1], 2.0 * (E - 2.0), epsilon = 1e-13);
        assert_abs_diff_eq!(u[1], 1.436563656918, epsilon = 1e-12);
    }

    #[test]
    fn u_numeric_matches_exact_oracle() {
        let polys = [
            RationalPoly::from_integers(&[0, 0, 0, 1]),
            RationalPoly::from_integers(&[0, 0, -1, 0, 0, 1]),
            RationalPoly::from_integers(&[1, -4, 6, -4, 1, 0, 3, -2, 1]),
        ];
        for p in &polys {
            for n in 1..=40 {
                let exact = u_coefficients_exact(p, n).unwrap();
                let numeric = u_coefficients_numeric(&poly_integrand(p), n, 1e-14).unwrap();
                for (a, b) in exact.iter().zip(&numeric) {
                    assert!((rational_to_f64(a) - b).abs() <= 1e-12, "n={n}");
                }
            }
        }
    }

    #[test]
    fn u_numeric_positive_for_nonnegative_input() {
        let bump = FnIntegrand {
            f: |t: f64| (t - 0.5).abs().powf(2.5),
            degree: None,
        };
        let sin = FnIntegrand {
            f: |t: f64| (std::f64::consts::PI * t).sin(),
            degree: None,
        };
        for n in [2, 5, 17, 64] {
            for f in [&bump as &dyn Integrand, &sin] {
                let u = u_coefficients_numeric(f, n, 1e-13).unwrap();
                assert!(u.iter().all(|&c| c >= -1e-14));
            }
        }
    }

    #[test]
    fn tolerance_failure_carries_best_estimate() {
        // Discontinuous at an irrational point: panel doubling never settles to 1e-15.
        let step = FnIntegrand {
            f: |t: f64| if t < std::f64::consts::FRAC_1_SQRT_2 { 0.0 } else { 1.0 },
            degree: None,
        };
        match u_coefficients_numeric(&step, 3, 1e-15) {
            Err(Error::Tolerance { best, panels, .. }) => {
                assert_eq!(best.len(), 4);
                assert_eq!(panels, MAX_PANELS);
            }
            other => panic!("expected tolerance error, got {other:?}"),
        }
    }
}
