//! Acceptance suite: every criterion runs, prints one PASS/FAIL line, and the
//! process exits non-zero if any criterion fails.

use gsops::analysis::{
    bernstein_probe, check_bernstein_inequality, check_bn_decomposition, check_converse, check_eigen_relation,
    check_jackson, check_lebesgue, check_moments, check_phi_identity, check_tail_bounds, check_voronovskaya,
    converse_threshold, default_candidate_ms, kfunctional_sandwich, rate_fit, seeded_points, AnalysisConfig,
    InequalityReport, OperatorKind, C_CONVERSE, C_TILDE, DEFAULT_GRID, SQRT3, SQRT6,
};
use gsops::basis::tail_sums;
use gsops::exactpoly::{commute_check_exact, telescope_check_exact, RationalPoly};
use gsops::operators::{FunctionSpec, CATALOG_IDS};
use gsops::Error;
use std::process::ExitCode;
use std::time::{Duration, Instant};

/// π²/6 − 3/2 and π²/3 − 13/4 to 20 digits.
#[allow(clippy::excessive_precision)]
const LAMBDA2_20: f64 = 0.144_934_066_848_226_436_47;
#[allow(clippy::excessive_precision)]
const THETA2_20: f64 = 0.039_868_133_696_452_872_94;

type Criterion = (&'static str, fn(&mut Tally));

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn report(&mut self, r: &InequalityReport) {
        self.check(r.pass(), || {
            format!(
                "{} f={} n={} ell={:?}: lhs {:e} > rhs {:e}",
                r.name, r.f, r.n, r.ell, r.lhs, r.rhs
            )
        });
    }

    fn result<T>(&mut self, label: &str, r: gsops::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.failures.push(format!("{label}: {e}"));
                None
            }
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn runtime(&mut self, start: Instant, limit: Duration) {
        let took = start.elapsed();
        self.note(format!("{:.2}s", took.as_secs_f64()));
        self.check(took < limit, || format!("runtime {took:?} exceeds {limit:?}"));
    }
}

fn spec(id: &str) -> FunctionSpec {
    FunctionSpec::by_id(id).unwrap()
}

fn cfg() -> AnalysisConfig {
    AnalysisConfig::default()
}

fn powers_of_two(lo: usize, hi: usize) -> Vec<usize> {
    std::iter::successors(Some(lo), |n| Some(n * 2))
        .take_while(|&n| n <= hi)
        .collect()
}

fn exact_identities(t: &mut Tally) {
    let start = Instant::now();
    let fs = [
        RationalPoly::from_integers(&[0, 0, 1]),
        RationalPoly::from_integers(&[0, 0, 0, 1]),
        RationalPoly::from_integers(&[0, 0, -1, 0, 0, 1]),
    ];
    for f in &fs {
        for n in 2..=8 {
            for m in 2..=8 {
                if let Some(rep) = t.result(&format!("commute f={f} n={n} m={m}"), commute_check_exact(f, n, m)) {
                    t.check(rep.discrepancies.iter().all(|d| d.is_zero()), || {
                        format!("f={f} n={n} m={m}")
                    });
                }
            }
            t.result(&format!("telescope f={f} k={n}"), telescope_check_exact(f, n));
        }
    }
    t.runtime(start, Duration::from_secs(30));
}

fn phi_identity(t: &mut Tally) {
    let start = Instant::now();
    for n in 1..=200 {
        let xs = seeded_points(100, n as u64);
        if let Some(r) = t.result("phi", check_phi_identity(n, &xs)) {
            t.report(&r);
        }
    }
    t.runtime(start, Duration::from_secs(10));
}

fn eigen_and_moments(t: &mut Tally) {
    let mut worst = (0.0f64, 0.0f64);
    for n in 2..=100 {
        let xs = seeded_points(50, 1000 + n as u64);
        if let Some(r) = t.result("eigen", check_eigen_relation(n, &xs)) {
            worst.0 = worst.0.max(r.lhs);
            t.check(r.lhs <= 1e-10, || {
                format!("eigen relation n={n}: relative deviation {:e}", r.lhs)
            });
        }
        if let Some(r) = t.result("moments", check_moments(n, &xs)) {
            worst.1 = worst.1.max(r.lhs);
            t.check(r.lhs <= 1e-12, || format!("moments n={n}: deviation {:e}", r.lhs));
        }
    }
    t.note(format!("eigen rel {:.1e}, moments abs {:.1e}", worst.0, worst.1));
}

fn lebesgue(t: &mut Tally) {
    let mut top = 0.0f64;
    for n in 2..=128 {
        if let Some(r) = t.result("lebesgue", check_lebesgue(n, DEFAULT_GRID)) {
            top = top.max(r.lhs);
            let bound = (3.0 - 2.0 / n as f64).sqrt();
            t.check(r.lhs <= bound + 1e-9, || {
                format!("n={n}: {} > √(3−2/n) = {bound}", r.lhs)
            });
            t.check(r.lhs >= 1.0 - 1e-12, || format!("n={n}: {} < 1", r.lhs));
        }
    }
    t.note(format!("max {top:.6}"));
}

fn jackson(t: &mut Tally) {
    let mut eligible = 0;
    for id in CATALOG_IDS {
        let f = spec(id);
        for n in powers_of_two(2, 64) {
            match check_jackson(&f, n, &cfg()) {
                Ok(r) => {
                    eligible += 1;
                    t.report(&r);
                    if id == "t2" {
                        let want = 1.0 / (2.0 * (n * (n + 1)) as f64);
                        t.check((r.lhs - want).abs() <= 1e-10, || {
                            format!("t2 n={n}: lhs {} vs {want}", r.lhs)
                        });
                    }
                }
                Err(Error::Precondition(_)) => {}
                Err(e) => t.result::<()>(&format!("jackson {id} n={n}"), Err(e)).unwrap_or(()),
            }
        }
    }
    t.note(format!("{eligible} eligible (f, n)"));
}

fn voronovskaya(t: &mut Tally) {
    for id in ["t2", "t3", "exp"] {
        for n in powers_of_two(2, 32) {
            let Some(r) = t.result(
                &format!("voronovskaya {id} n={n}"),
                check_voronovskaya(&spec(id), n, &cfg()),
            ) else {
                continue;
            };
            t.report(&r);
            if id == "t2" && n == 2 {
                let lhs = (1.0 / 3.0 - 4.0 * LAMBDA2_20).abs() / 4.0;
                let rhs = 2.0 * THETA2_20;
                t.check((r.lhs - lhs).abs() <= 1e-9, || format!("t2 n=2 lhs {} vs {lhs}", r.lhs));
                t.check((r.rhs - rhs).abs() <= 1e-9, || format!("t2 n=2 rhs {} vs {rhs}", r.rhs));
                t.note(format!("t2 n=2: lhs {:.12} rhs {:.12}", r.lhs, r.rhs));
            }
        }
    }
}

fn bernstein(t: &mut Tally) {
    let ns: Vec<usize> = (2..=64).collect();
    let mut worst = 0.0f64;
    for id in CATALOG_IDS {
        let f = spec(id);
        for &n in &ns {
            if let Some(r) = t.result("bernstein", check_bernstein_inequality(&f, n, &cfg())) {
                if r.rhs > 0.0 {
                    worst = worst.max(r.lhs / r.rhs);
                }
                t.report(&r);
            }
        }
    }
    if let Some(p) = t.result("probe", bernstein_probe(&ns, 10_000, 0, DEFAULT_GRID)) {
        t.check(p.trials >= 10_000, || format!("only {} probe trials", p.trials));
        t.report(&p.report());
        t.note(format!(
            "catalog ratio {worst:.3}, probe {:.3}/n, majorant {:.3}/n ≤ {C_TILDE:.3}",
            p.random_ratio, p.majorant_ratio
        ));
    }
    for &n in &ns {
        if let Some(reports) = t.result("decomposition", check_bn_decomposition(n, DEFAULT_GRID)) {
            for r in &reports {
                t.report(r);
            }
        }
    }
}

fn tail_bounds(t: &mut Tally) {
    for n in 2..=10_000 {
        if let Some(reports) = t.result("tail bounds", check_tail_bounds(n)) {
            for r in reports {
                t.check(r.lhs < r.rhs, || {
                    format!("{} n={n}: {:e} not < {:e}", r.name, r.lhs, r.rhs)
                });
            }
        }
    }
    if let Some(ts) = t.result("tail sums", tail_sums(2)) {
        let rl = (ts.lambda - LAMBDA2_20).abs() / LAMBDA2_20;
        let rt = (ts.theta - THETA2_20).abs() / THETA2_20;
        t.check(rl <= 1e-14, || format!("λ(2) = {} rel err {rl:e}", ts.lambda));
        t.check(rt <= 1e-14, || format!("θ(2) = {} rel err {rt:e}", ts.theta));
        t.note(format!("λ(2) rel {rl:.1e}, θ(2) rel {rt:.1e}"));
    }
}

fn rate_separation(t: &mut Tally) {
    let start = Instant::now();
    let ns = [4, 8, 16, 32, 64];
    for id in ["t2", "exp", "sinpi"] {
        let f = spec(id);
        for (kind, lo, hi) in [(OperatorKind::Utilde, -2.1, -1.9), (OperatorKind::U, -1.1, -0.9)] {
            if let Some(fit) = t.result(&format!("rate {id}"), rate_fit(&f, &ns, kind, &cfg())) {
                t.note(format!("{id}/{kind:?} {:.4}", fit.slope));
                t.check((lo..=hi).contains(&fit.slope), || {
                    format!("{id}/{kind:?} slope {:.4} outside [{lo}, {hi}]", fit.slope)
                });
            }
        }
    }
    t.runtime(start, Duration::from_secs(60));
}

fn sandwich_and_converse(t: &mut Tally) {
    for id in CATALOG_IDS {
        let f = spec(id);
        for n in [2, 4, 8] {
            if let Some(s) = t.result(
                &format!("sandwich {id} n={n}"),
                kfunctional_sandwich(&f, n, &default_candidate_ms(n), &cfg()),
            ) {
                t.report(&s.consistency_report());
                t.report(&s.direct_report());
            }
            let ell = 16 * n;
            t.check(ell >= converse_threshold(n), || {
                format!("ℓ = {ell} below threshold for n={n}")
            });
            if let Some(c) = t.result(&format!("converse {id} n={n}"), check_converse(&f, n, ell, &cfg())) {
                t.report(&c.converse);
            }
            let below = converse_threshold(n) - 1;
            t.check(
                matches!(check_converse(&f, n, below, &cfg()), Err(Error::Precondition(_))),
                || format!("ℓ = {below} accepted for n={n}"),
            );
        }
    }
    t.note(format!(
        "C = {C_CONVERSE:.4} = 4+√3+(6.5+√6)², √3={SQRT3:.4}, √6={SQRT6:.4}"
    ));
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "exact identities (commutation, Ũ two ways, telescoping)",
            exact_identities,
        ),
        ("Φ(α) = α² + 2 − 2/n", phi_identity),
        ("eigen relation and central moments", eigen_and_moments),
        ("Lebesgue bound in [1, √(3−2/n)]", lebesgue),
        ("Jackson-type inequality", jackson),
        ("Voronovskaya-type inequality", voronovskaya),
        ("Bernstein-type inequality and decomposition", bernstein),
        ("tail-sum bounds and λ(2), θ(2)", tail_bounds),
        ("rate separation of U_n and Ũ_n", rate_separation),
        ("K-functional sandwich, direct and converse", sandwich_and_converse),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let mut t = Tally::default();
        run(&mut t);
        let status = if t.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:>2} {title}: {} checks; {}",
            i + 1,
            t.checked,
            t.notes.join("; ")
        );
        for f in &t.failures {
            println!("       {f}");
        }
        if !t.failures.is_empty() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
