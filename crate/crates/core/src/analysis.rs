//! Sup norms and checkers for the approximation estimates.
//!
//! Every checker returns an [`InequalityReport`] whose verdict is derived from
//! `lhs` and `rhs` with a fixed rounding allowance. Precondition failures
//! (an estimate that does not apply to the given function) are errors, not
//! failed reports.

use crate::basis::{bernstein_vector, moment, phi_big, t_double_prime, t_prime, t_value, tail_sums, xi_zero};
use crate::error::{Error, Result};
use crate::operators::{
    apply_u, apply_u_integrand, apply_utilde, dtilde_form, iterate_utilde, BernsteinForm, FunctionSpec, DEFAULT_TOL,
};
use crate::quadrature::FnIntegrand;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;
pub const SQRT6: f64 = 2.449_489_742_783_178;
/// Constant of the Bernstein-type inequality, `6.5 + √6`.
pub const C_TILDE: f64 = 6.5 + SQRT6;
/// Converse threshold: estimates hold for `ℓ ≥ L n`.
pub const L_CONVERSE: f64 = 16.0 * C_TILDE / 9.0;
/// Converse constant `4 + √3 + C̃²`.
pub const C_CONVERSE: f64 = 4.0 + SQRT3 + C_TILDE * C_TILDE;

pub const DEFAULT_GRID: usize = 2001;
pub const MIN_GRID: usize = 64;
const GOLDEN_ITERS: usize = 50;
/// Error norms below this are treated as rounding noise by [`rate_fit`].
pub const RATE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub grid_size: usize,
    pub tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID,
            tol: DEFAULT_TOL,
        }
    }
}

/// `lhs ≤ rhs·(1 + 1e-9) + 1e-12`.
pub fn passes(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + 1e-9) + 1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    pub f: String,
    pub n: usize,
    pub ell: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, f: impl Into<String>, n: usize, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            f: f.into(),
            n,
            ell: None,
            lhs,
            rhs,
        }
    }

    pub fn with_ell(mut self, ell: usize) -> Self {
        self.ell = Some(ell);
        self
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn pass(&self) -> bool {
        passes(self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNormEstimate {
    pub value: f64,
    pub argmax: f64,
    pub grid_size: usize,
    pub refined: bool,
}

/// Chebyshev points of the first kind mapped to `(0, 1)`, plus both endpoints,
/// in increasing order.
pub fn chebyshev_grid(grid_size: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(grid_size + 2);
    pts.push(0.0);
    let m = grid_size as f64;
    pts.extend((0..grid_size).map(|i| 0.5 * (1.0 - (std::f64::consts::PI * (i as f64 + 0.5) / m).cos())));
    pts.push(1.0);
    pts
}

/// Sup norm of a fallible function: coarse Chebyshev scan, then golden-section
/// search between the neighbours of the best grid point.
pub fn try_sup_norm<F: Fn(f64) -> Result<f64>>(g: F, grid_size: usize) -> Result<SupNormEstimate> {
    if grid_size < MIN_GRID {
        return Err(Error::Domain(format!("grid_size {grid_size} below minimum {MIN_GRID}")));
    }
    let abs_at = |x: f64| -> Result<f64> {
        let v = g(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { x, value: v });
        }
        Ok(v.abs())
    };
    let pts = chebyshev_grid(grid_size);
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &x) in pts.iter().enumerate() {
        let v = abs_at(x)?;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut argmax = pts[best_i];
    let mut a = pts[best_i.saturating_sub(1)];
    let mut b = pts[(best_i + 1).min(pts.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut hc, mut hd) = (abs_at(c)?, abs_at(d)?);
    for _ in 0..GOLDEN_ITERS {
        for (x, h) in [(c, hc), (d, hd)] {
            if h > best {
                best = h;
                argmax = x;
            }
        }
        if hc > hd {
            b = d;
            d = c;
            hd = hc;
            c = b - inv_phi * (b - a);
            hc = abs_at(c)?;
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + inv_phi * (b - a);
            hd = abs_at(d)?;
        }
    }
    for (x, h) in [(c, hc), (d, hd)] {
        if h > best {
            best = h;
            argmax = x;
        }
    }
    Ok(SupNormEstimate {
        value: best,
        argmax,
        grid_size,
        refined: true,
    })
}

pub fn sup_norm<F: Fn(f64) -> f64>(g: F, grid_size: usize) -> Result<SupNormEstimate> {
    try_sup_norm(|x| Ok(g(x)), grid_size)
}

pub fn sup_norm_form(p: &BernsteinForm, grid_size: usize) -> Result<SupNormEstimate> {
    sup_norm(|x| p.eval(x), grid_size)
}

/// `‖f - p‖`.
pub fn sup_distance(f: &FunctionSpec, p: &BernsteinForm, grid_size: usize) -> Result<SupNormEstimate> {
    sup_norm(|x| f.eval(x) - p.eval(x), grid_size)
}

/// `‖D̃^ℓ f‖`.
pub fn dtilde_norm(f: &FunctionSpec, ell: usize, grid_size: usize) -> Result<f64> {
    let g = f.dtilde_power(ell);
    Ok(sup_norm(g, grid_size)?.value)
}

/// `sup_x Σ_k |P̃_{n,k}(x)|`, an upper bound for the operator norm of `Ũ_n`.
pub fn lebesgue_bound(n: usize, grid_size: usize) -> Result<SupNormEstimate> {
    if n < 2 {
        return Err(Error::Domain(format!("lebesgue_bound needs n >= 2, got {n}")));
    }
    try_sup_norm(
        |x| {
            let b = bernstein_vector(n, x)?;
            Ok((0..=n).map(|k| b.modified(k).abs()).sum())
        },
        grid_size,
    )
}

pub fn check_lebesgue(n: usize, grid_size: usize) -> Result<InequalityReport> {
    let est = lebesgue_bound(n, grid_size)?;
    let rhs = (3.0 - 2.0 / n as f64).sqrt();
    Ok(InequalityReport::new("lebesgue", "-", n, est.value, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    U,
    Utilde,
}

/// `‖L_n f - f‖` for `L = U` or `Ũ`.
pub fn error_norm(f: &FunctionSpec, n: usize, kind: OperatorKind, cfg: &AnalysisConfig) -> Result<f64> {
    let g = match kind {
        OperatorKind::U => apply_u(f, n, cfg.tol)?,
        OperatorKind::Utilde => apply_utilde(f, n, cfg.tol)?,
    };
    Ok(sup_distance(f, &g, cfg.grid_size)?.value)
}

fn require(ok: bool, what: &str, f: &FunctionSpec) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{} does not satisfy {what}", f.id)))
    }
}

fn require_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!("n must be at least {min}, got {n}")));
    }
    Ok(())
}

/// `‖U_n f - f‖ ≤ ‖D̃f‖ / n` for `f ∈ W²(φ)`.
pub fn check_contraction_u(f: &FunctionSpec, n: usize, cfg: &AnalysisConfig) -> Result<InequalityReport> {
    require_n(n, 1)?;
    require(f.smoothness().w2, "f ∈ W²(φ)", f)?;
    let lhs = error_norm(f, n, OperatorKind::U, cfg)?;
    let rhs = dtilde_norm(f, 1, cfg.grid_size)? / n as f64;
    Ok(InequalityReport::new("contraction_U", &f.id, n, lhs, rhs))
}

/// `‖Ũ_n f - f‖ ≤ 2‖D̃f‖ / n` for `f ∈ W²₀(φ)`.
pub fn check_contraction_utilde(f: &FunctionSpec, n: usize, cfg: &AnalysisConfig) -> Result<InequalityReport> {
    require_n(n, 1)?;
    require(f.smoothness().w2_zero, "f ∈ W²₀(φ)", f)?;
    let lhs = error_norm(f, n, OperatorKind::Utilde, cfg)?;
    let rhs = 2.0 * dtilde_norm(f, 1, cfg.grid_size)? / n as f64;
    Ok(InequalityReport::new("contraction_Utilde", &f.id, n, lhs, rhs))
}

/// `‖Ũ_n³ f‖ ≤ 3√3 ‖f‖`.
pub fn check_triple_norm(f: &FunctionSpec, n: usize, cfg: &AnalysisConfig) -> Result<InequalityReport> {
    require_n(n, 1)?;
    let g = iterate_utilde(f, n, 3, cfg.tol)?;
    let lhs = sup_norm_form(&g, cfg.grid_size)?.value;
    let rhs = 3.0 * SQRT3 * sup_norm(|x| f.eval(x), cfg.grid_size)?.value;
    Ok(InequalityReport::new("triple_norm", &f.id, n, lhs, rhs))
}

/// `‖Ũ_n f - f‖ ≤ ‖D̃²f‖ / n²`.
pub fn check_jackson(f: &FunctionSpec, n: usize, cfg: &AnalysisConfig) -> Result<InequalityReport> {
    require_n(n, 1)?;
    let s = f.smoothness();
    require(s.w2_zero && s.dtilde_w2, "f ∈ W²₀(φ) with D̃f ∈ W²(φ)", f)?;
    let lhs = error_norm(f, n, OperatorKind::Utilde, cfg)?;
    let rhs = dtilde_norm(f, 2, cfg.grid_size)? / (n * n) as f64;
    Ok(InequalityReport::new("jackson", &f.id, n, lhs, rhs))
}

/// `‖Ũ_n f - f + λ(n) D̃²f‖ ≤ θ(n) ‖D̃³f‖`.
pub fn check_voronovskaya(f: &FunctionSpec, n: usize, cfg: &AnalysisConfig) -> Result<InequalityReport> {
    require_n(n, 2)?;
    let s = f.smoothness();
    require(
        s.w2_zero && s.dtilde_w2_zero && s.dtilde3_bounded,
        "f, D̃f ∈ W²₀(φ) with D̃³f bounded",
        f,
    )?;
    let ts = tail_sums(n)?;
    let g = apply_utilde(f, n, cfg.tol)?;
    let d2 = f.dtilde_power(2);
    let lhs = sup_norm(|x| g.eval(x) - f.eval(x) + ts.lambda * d2(x), cfg.grid_size)?.value;
    let rhs = ts.theta * dtilde_norm(f, 3, cfg.grid_size)?;
    Ok(InequalityReport::new("voronovskaya", &f.id, n, lhs, rhs))
}

/// `‖D̃Ũ_n f‖ ≤ C̃ n ‖f‖`.
pub fn check_bernstein_inequality(f: &FunctionSpec, n: usize, cfg: &AnalysisConfig) -> Result<InequalityReport> {
    require_n(n, 2)?;
    let g = apply_utilde(f, n, cfg.tol)?;
    let lhs = sup_norm_form(&dtilde_form(&g), cfg.grid_size)?.value;
    let rhs = C_TILDE * n as f64 * sup_norm(|x| f.eval(x), cfg.grid_size)?.value;
    Ok(InequalityReport::new("bernstein", &f.id, n, lhs, rhs))
}

/// Outcome of the coefficient-space search for large `‖D̃Ũ_n f‖ / (n‖f‖)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinProbe {
    pub trials: usize,
    /// Largest ratio over random sign patterns.
    pub random_ratio: f64,
    pub random_n: usize,
    /// `max_n sup_x Σ_k |D̃P̃_{n,k}(x)| / n`, the ratio reached by the worst
    /// sign pattern at the worst point.
    pub majorant_ratio: f64,
    pub majorant_n: usize,
}

impl BernsteinProbe {
    pub fn report(&self) -> InequalityReport {
        let lhs = self.random_ratio.max(self.majorant_ratio);
        InequalityReport::new("bernstein_probe", "probe", self.majorant_n, lhs, C_TILDE)
    }
}

/// Bernstein coefficients of `D̃P̃_{n,k}`, nonzero only for `j ∈ k-2..=k+2`.
fn dtilde_modified_columns(n: usize) -> Vec<Vec<(usize, f64)>> {
    (0..=n)
        .map(|k| {
            let mut unit = vec![0.0; n + 1];
            unit[k] = 1.0;
            let e = BernsteinForm::new(unit).unwrap();
            let c = e.add_scaled(&dtilde_form(&e), -1.0 / n as f64);
            dtilde_form(&c)
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, v)| (j, *v))
                .collect()
        })
        .collect()
}

/// For `f = Σ u_k P̃_{n,k}` with `max |u_k| = 1` (so `f` takes the values `u_k`
/// as coefficients of `Ũ_n`-images), evaluates `‖D̃f‖ / n` for `trials` random
/// sign patterns spread over `ns`, and the exact worst case over all patterns.
pub fn bernstein_probe(ns: &[usize], trials: usize, seed: u64, grid_size: usize) -> Result<BernsteinProbe> {
    if ns.is_empty() {
        return Err(Error::Domain("bernstein_probe needs at least one n".into()));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::Domain(format!("bernstein_probe needs n >= 2, got {n}")));
    }
    let per_n = trials.div_ceil(ns.len());
    let mut out = BernsteinProbe {
        trials: per_n * ns.len(),
        random_ratio: 0.0,
        random_n: ns[0],
        majorant_ratio: 0.0,
        majorant_n: ns[0],
    };
    let pts = chebyshev_grid(grid_size);
    for &n in ns {
        let cols = dtilde_modified_columns(n);
        let row_at = |x: f64| -> Result<Vec<f64>> {
            let b = bernstein_vector(n, x)?;
            Ok(cols
                .iter()
                .map(|col| col.iter().map(|&(j, v)| v * b.values[j]).sum())
                .collect())
        };
        let rows = pts.iter().map(|&x| row_at(x)).collect::<Result<Vec<_>>>()?;

        let majorant = try_sup_norm(|x| Ok(row_at(x)?.iter().map(|v| v.abs()).sum()), grid_size)?;
        let ratio = majorant.value / n as f64;
        if ratio > out.majorant_ratio {
            out.majorant_ratio = ratio;
            out.majorant_n = n;
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut u = vec![0.0; n + 1];
        for _ in 0..per_n {
            for v in &mut u {
                *v = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
            let sup = rows
                .iter()
                .map(|r| r.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0, f64::max);
            let ratio = sup / n as f64;
            if ratio > out.random_ratio {
                out.random_ratio = ratio;
                out.random_n = n;
            }
        }
    }
    Ok(out)
}

/// Pointwise pieces of `Σ_k |D̃P̃_{n,k}(x)| ≤ a_n + b_n + c_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Signed counterpart of `b`: `-(2φ/n) Σ T'_{n,k} P'_{n,k}`.
    pub s: f64,
}

pub fn decomposition_at(n: usize, x: f64) -> Result<Decomposition> {
    require_n(n, 2)?;
    let nf = n as f64;
    let phi = x * (1.0 - x);
    let p = bernstein_vector(n, x)?;
    let q = bernstein_vector(n - 1, x)?;
    let (mut a, mut b, mut c, mut s) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..=n {
        let pk = p.values[k];
        let dpk = nf * (q.get(k as isize - 1) - q.get(k as isize));
        let t = t_value(n, k, x)?;
        let tp = t_prime(n, k, x)?;
        a += t_double_prime(n, k, x)?.abs() * pk;
        b += (tp * dpk).abs();
        s += tp * dpk;
        c += ((1.0 - t / nf) * t).abs() * pk;
    }
    Ok(Decomposition {
        a: phi / nf * a,
        b: 2.0 * phi / nf * b,
        c,
        s: -2.0 * phi / nf * s,
    })
}

/// `s_k = (2φ/n)|T'_{n,k} P'_{n,k}|`, one term of `b_n`.
pub fn b_term(n: usize, k: usize, x: f64) -> Result<f64> {
    require_n(n, 2)?;
    let nf = n as f64;
    let q = bernstein_vector(n - 1, x)?;
    let dpk = nf * (q.get(k as isize - 1) - q.get(k as isize));
    Ok(2.0 * x * (1.0 - x) / nf * (t_prime(n, k, x)? * dpk).abs())
}

/// A window `(lo, hi)` on which exactly the term `k` of `-φ Σ T'P'` is negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignWindow {
    pub lo: f64,
    pub hi: f64,
    pub k: usize,
}

/// Intervals `(ξ_k, k/n)` and their mirror images, `k = 1..⌊(n-1)/2⌋`, on which
/// `b_n` exceeds `4(n-1)`.
pub fn sign_windows(n: usize) -> Result<Vec<SignWindow>> {
    let mut w = Vec::new();
    for k in 1..=(n - 1) / 2 {
        let lo = if k == 1 { 0.0 } else { xi_zero(n, k)? };
        let hi = k as f64 / n as f64;
        w.push(SignWindow { lo, hi, k });
        w.push(SignWindow {
            lo: 1.0 - hi,
            hi: 1.0 - lo,
            k: n - k,
        });
    }
    Ok(w)
}

/// Checks on interior Chebyshev points: `a_n = 2(n-1)`, `b_n ≤ 4.5n`,
/// `c_n ≤ √6 n`, `S = 4(n-1)`, `b_n = 4(n-1)` outside the sign windows and
/// `b_n = 4(n-1) + 2 s_k` inside window `k`.
///
/// Since `S` already subtracts the one negative term `s_k`, `b_n = S + 2 s_k`
/// in a window, not `S + s_k`; with `s_k ≤ n/2` the attainable bound is
/// `b_n ≤ 5n - 4`, reported as well. `b_n ≤ 4.5n` fails from `n = 37` on
/// (`max b_n / n → 4 + e^{-1/2}`). Identities are reported as
/// `lhs = max deviation`, `rhs = 1e-8`.
pub fn check_bn_decomposition(n: usize, grid_size: usize) -> Result<Vec<InequalityReport>> {
    require_n(n, 2)?;
    if grid_size < MIN_GRID {
        return Err(Error::Domain(format!("grid_size {grid_size} below minimum {MIN_GRID}")));
    }
    let nf = n as f64;
    let windows = sign_windows(n)?;
    let plateau = 4.0 * (nf - 1.0);
    let (mut a_dev, mut b_max, mut c_max, mut s_dev, mut off_dev, mut in_dev) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let pts = chebyshev_grid(grid_size);
    for &x in &pts[1..pts.len() - 1] {
        let d = decomposition_at(n, x)?;
        a_dev = a_dev.max((d.a - 2.0 * (nf - 1.0)).abs());
        b_max = b_max.max(d.b);
        c_max = c_max.max(d.c);
        s_dev = s_dev.max((d.s - plateau).abs());
        match windows.iter().find(|w| w.lo < x && x < w.hi) {
            Some(w) => in_dev = in_dev.max((d.b - plateau - 2.0 * b_term(n, w.k, x)?).abs()),
            None => off_dev = off_dev.max((d.b - plateau).abs()),
        }
    }
    let r = |name: &str, lhs, rhs| InequalityReport::new(name, "-", n, lhs, rhs);
    Ok(vec![
        r("a_n=2(n-1)", a_dev, 1e-8),
        r("b_n<=4.5n", b_max, 4.5 * nf),
        r("c_n<=sqrt6*n", c_max, SQRT6 * nf),
        r("S=4(n-1)", s_dev, 1e-8),
        r("b_n=4(n-1) off windows", off_dev, 1e-8),
        r("b_n=4(n-1)+2s_k in windows", in_dev, 1e-8),
        r("b_n<=5n-4", b_max, 5.0 * nf - 4.0),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct KfSandwich {
    pub f: String,
    pub n: usize,
    /// `1/n²`.
    pub t: f64,
    pub upper: f64,
    pub lower: f64,
    pub candidate_id: String,
    /// `‖Ũ_n f - f‖`, from which `lower` is derived.
    pub error_norm: f64,
    pub candidates: Vec<(String, f64)>,
}

impl KfSandwich {
    /// `‖Ũ_n f - f‖ ≤ (1+√3) K(f, 1/n²)`, using `upper ≥ K`.
    pub fn direct_report(&self) -> InequalityReport {
        InequalityReport::new("direct", &self.f, self.n, self.error_norm, (1.0 + SQRT3) * self.upper)
    }

    pub fn consistency_report(&self) -> InequalityReport {
        InequalityReport::new("sandwich", &self.f, self.n, self.lower, self.upper)
    }
}

pub fn default_candidate_ms(n: usize) -> Vec<usize> {
    vec![n, 2 * n, 4 * n, 8 * n]
}

/// Brackets `K(f, 1/n²)`: `upper` is attained by an explicit `g`, `lower`
/// follows from the direct estimate.
pub fn kfunctional_sandwich(
    f: &FunctionSpec,
    n: usize,
    candidate_ms: &[usize],
    cfg: &AnalysisConfig,
) -> Result<KfSandwich> {
    require_n(n, 2)?;
    if candidate_ms.is_empty() {
        return Err(Error::Domain(
            "kfunctional_sandwich needs at least one candidate m".into(),
        ));
    }
    let t = 1.0 / (n * n) as f64;
    let error_norm = error_norm(f, n, OperatorKind::Utilde, cfg)?;
    let mut candidates = Vec::new();
    let s = f.smoothness();
    if s.w2_zero && s.dtilde_w2 {
        candidates.push(("f".to_string(), t * dtilde_norm(f, 2, cfg.grid_size)?));
    }
    for &m in candidate_ms {
        let g = iterate_utilde(f, m, 3, cfg.tol)?;
        let d2 = dtilde_form(&dtilde_form(&g));
        let value = sup_distance(f, &g, cfg.grid_size)?.value + t * sup_norm_form(&d2, cfg.grid_size)?.value;
        candidates.push((format!("Ut3_m={m}"), value));
    }
    let (candidate_id, upper) = candidates.iter().min_by(|a, b| a.1.total_cmp(&b.1)).cloned().unwrap();
    Ok(KfSandwich {
        f: f.id.clone(),
        n,
        t,
        upper,
        lower: error_norm / (1.0 + SQRT3),
        candidate_id,
        error_norm,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverseReport {
    pub sandwich: KfSandwich,
    /// `K ≤ C (ℓ²/n²)(‖Ũ_n f - f‖ + ‖Ũ_ℓ f - f‖)`, with `upper` standing in for `K`.
    pub converse: InequalityReport,
    /// `‖f - Ũ_n³ f‖ ≤ (4+√3) ‖f - Ũ_n f‖`.
    pub smoothing: InequalityReport,
}

pub fn converse_threshold(n: usize) -> usize {
    (L_CONVERSE * n as f64).ceil() as usize
}

pub fn check_converse(f: &FunctionSpec, n: usize, ell: usize, cfg: &AnalysisConfig) -> Result<ConverseReport> {
    require_n(n, 2)?;
    let need = converse_threshold(n);
    if ell < need {
        return Err(Error::Precondition(format!(
            "ℓ = {ell} is below L·n = {:.4}·{n}; need ℓ ≥ {need}",
            L_CONVERSE
        )));
    }
    let sandwich = kfunctional_sandwich(f, n, &default_candidate_ms(n), cfg)?;
    let err_ell = error_norm(f, ell, OperatorKind::Utilde, cfg)?;
    let ratio = (ell as f64 / n as f64).powi(2);
    let rhs = C_CONVERSE * ratio * (sandwich.error_norm + err_ell);
    let converse = InequalityReport::new("converse", &f.id, n, sandwich.upper, rhs).with_ell(ell);
    let cubed = iterate_utilde(f, n, 3, cfg.tol)?;
    let smoothing = InequalityReport::new(
        "smoothing",
        &f.id,
        n,
        sup_distance(f, &cubed, cfg.grid_size)?.value,
        (4.0 + SQRT3) * sandwich.error_norm,
    )
    .with_ell(ell);
    Ok(ConverseReport {
        sandwich,
        converse,
        smoothing,
    })
}

/// Truncated series `Ũ_n f - f = -Σ_{k≥n} D̃U_{k+1}D̃f / (k²(k+1))`: the
/// residual after summing through `k = big_n` is at most `‖D̃²f‖ λ(big_n + 1)`.
pub fn check_series_representation(
    f: &FunctionSpec,
    n: usize,
    big_n: usize,
    cfg: &AnalysisConfig,
) -> Result<InequalityReport> {
    require_n(n, 2)?;
    if big_n < n {
        return Err(Error::Domain(format!("series cut-off {big_n} below n = {n}")));
    }
    let s = f.smoothness();
    require(s.w2_zero && s.dtilde_w2, "f ∈ W²₀(φ) with D̃f ∈ W²(φ)", f)?;
    let df = f.dtilde_spec();
    let df_fn = f.dtilde_power(1);
    let mut partial = BernsteinForm::zero(big_n + 1);
    for k in n..=big_n {
        let u = match &df {
            Some(spec) => apply_u(spec, k + 1, cfg.tol)?,
            None => apply_u_integrand(
                &FnIntegrand {
                    f: &df_fn,
                    degree: None,
                },
                k + 1,
                cfg.tol,
            )?,
        };
        let kf = k as f64;
        partial = partial.add_scaled(&dtilde_form(&u), 1.0 / (kf * kf * (kf + 1.0)));
    }
    let g = apply_utilde(f, n, cfg.tol)?;
    let lhs = sup_norm(|x| g.eval(x) - f.eval(x) + partial.eval(x), cfg.grid_size)?.value;
    let rhs = dtilde_norm(f, 2, cfg.grid_size)? * tail_sums(big_n + 1)?.lambda;
    Ok(InequalityReport::new("series", &f.id, n, lhs, rhs).with_ell(big_n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub n: usize,
    pub err: f64,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub f: String,
    pub kind: OperatorKind,
    pub slope: f64,
    pub points: Vec<RatePoint>,
}

fn check_geometric(ns: &[usize]) -> Result<()> {
    if ns.len() < 4 {
        return Err(Error::Domain(format!(
            "rate fit needs at least 4 values of n, got {}",
            ns.len()
        )));
    }
    if ns[0] == 0 || ns[1] <= ns[0] {
        return Err(Error::Domain("rate fit needs increasing positive n".into()));
    }
    let r = ns[1] as f64 / ns[0] as f64;
    for w in ns.windows(2) {
        let q = w[1] as f64 / w[0] as f64;
        if (q - r).abs() > 1e-12 * r {
            return Err(Error::Domain(format!("n values {ns:?} are not geometric")));
        }
    }
    Ok(())
}

/// Least-squares slope of `log ‖L_n f - f‖` against `log n`.
pub fn rate_fit(f: &FunctionSpec, ns: &[usize], kind: OperatorKind, cfg: &AnalysisConfig) -> Result<RateFit> {
    check_geometric(ns)?;
    let points = ns
        .iter()
        .map(|&n| {
            let err = error_norm(f, n, kind, cfg)?;
            Ok(RatePoint {
                n,
                err,
                used: err >= RATE_FLOOR,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.used)
        .map(|p| ((p.n as f64).ln(), p.err.ln()))
        .collect();
    if used.len() < 2 {
        return Err(Error::Precondition(format!(
            "rate fit for {} rejected: fewer than two errors above {RATE_FLOOR:e}",
            f.id
        )));
    }
    let m = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / m;
    let my = used.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(RateFit {
        f: f.id.clone(),
        kind,
        slope: sxy / sxx,
        points,
    })
}

/// `α` values for the quadratic-form identity `Φ(α) = α² + 2 - 2/n`.
pub const PHI_ALPHAS: [f64; 6] = [-2.0, -1.0, 0.0, 1.0, 2.0, std::f64::consts::PI];

/// `count` reproducible points in `(0, 1)`.
pub fn seeded_points(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(f64::EPSILON..1.0)).collect()
}

/// `φ P''_{n,k}`, with `P''` from second differences of the degree `n-2`
/// basis, against `T_{n,k} P_{n,k}`. Deviations are relative to
/// `max(|T P|, P)`; points with `P_{n,k}(x) ≤ 1e-30` are skipped.
pub fn check_eigen_relation(n: usize, xs: &[f64]) -> Result<InequalityReport> {
    require_n(n, 2)?;
    let nf = n as f64;
    let mut worst = 0.0f64;
    for &x in xs {
        let p = bernstein_vector(n, x)?;
        let q = bernstein_vector(n - 2, x)?;
        let phi = x * (1.0 - x);
        for k in 0..=n {
            let pk = p.values[k];
            if pk <= 1e-30 {
                continue;
            }
            let k = k as isize;
            let second = nf * (nf - 1.0) * (q.get(k - 2) - 2.0 * q.get(k - 1) + q.get(k));
            let tp = t_value(n, k as usize, x)? * pk;
            worst = worst.max((phi * second - tp).abs() / tp.abs().max(pk));
        }
    }
    Ok(InequalityReport::new("eigen_relation", "-", n, worst, 1e-10))
}

/// Closed-form central moments of order `0..=4` against direct sums.
pub fn check_moments(n: usize, xs: &[f64]) -> Result<InequalityReport> {
    require_n(n, 1)?;
    let nf = n as f64;
    let mut worst = 0.0f64;
    for &x in xs {
        let p = bernstein_vector(n, x)?;
        for i in 0..=4 {
            let direct: f64 = p
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| (k as f64 / nf - x).powi(i as i32) * v)
                .sum();
            worst = worst.max((direct - moment(n, i, x)?).abs());
        }
    }
    Ok(InequalityReport::new("moments", "-", n, worst, 1e-12))
}

pub fn check_phi_identity(n: usize, xs: &[f64]) -> Result<InequalityReport> {
    require_n(n, 1)?;
    let mut worst = 0.0f64;
    for &x in xs {
        for alpha in PHI_ALPHAS {
            let expect = alpha * alpha + 2.0 - 2.0 / n as f64;
            worst = worst.max((phi_big(alpha, n, x)? - expect).abs());
        }
    }
    Ok(InequalityReport::new("phi_identity", "-", n, worst, 1e-9))
}

/// `1/(2n²) ≤ λ(n) ≤ 1/n²` and `θ(n) ≤ 4/(9n³)`.
pub fn check_tail_bounds(n: usize) -> Result<Vec<InequalityReport>> {
    let ts = tail_sums(n)?;
    let nf = n as f64;
    Ok(vec![
        InequalityReport::new("lambda>=1/(2n^2)", "-", n, 0.5 / (nf * nf), ts.lambda),
        InequalityReport::new("lambda<=1/n^2", "-", n, ts.lambda, 1.0 / (nf * nf)),
        InequalityReport::new("theta<=4/(9n^3)", "-", n, ts.theta, 4.0 / (9.0 * nf * nf * nf)),
    ])
}
