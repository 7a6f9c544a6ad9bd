use crate::config::RunConfig;
use crate::output::{report_table, Cell, Table, REPORT_COLUMNS, VERIFY_COLUMNS};
use gsops::analysis::{
    bernstein_probe, check_bernstein_inequality, check_converse, check_eigen_relation, check_lebesgue, check_moments,
    check_phi_identity, check_tail_bounds, check_voronovskaya, default_candidate_ms, dtilde_norm, error_norm,
    kfunctional_sandwich, passes, rate_fit, seeded_points, sup_norm, AnalysisConfig, OperatorKind,
};
use gsops::basis::tail_sums;
use gsops::exactpoly::{apply_utilde_exact, commute_discrepancies, rational_to_f64, telescope_discrepancy};
use gsops::operators::{apply_utilde, apply_utilde_integrand, dtilde_form, BernsteinForm, FunctionSpec};
use gsops::quadrature::FnIntegrand;
use gsops::report::{sort_rows, ReportRow, Status};
use gsops::Result;
use rayon::prelude::*;

pub struct Outcome {
    pub table: Table,
    /// Rows that violate an estimate or could not be computed.
    pub failures: Vec<ReportRow>,
    /// Rows whose estimate does not apply, with the reason in `note`.
    pub skipped: Vec<ReportRow>,
}

impl Outcome {
    fn from_rows(mut rows: Vec<ReportRow>, columns: &[&'static str]) -> Self {
        sort_rows(&mut rows);
        let with = |st| rows.iter().filter(|r| r.status == st).cloned().collect();
        Self {
            table: report_table(&rows, columns),
            failures: with(Status::Fail),
            skipped: with(Status::Skip),
        }
    }
}

fn analysis_config(cfg: &RunConfig) -> AnalysisConfig {
    AnalysisConfig {
        grid_size: cfg.grid,
        tol: cfg.tol,
    }
}

fn pairs(cfg: &RunConfig) -> Vec<(FunctionSpec, usize)> {
    let fns = cfg.functions();
    fns.iter()
        .flat_map(|f| cfg.ns.iter().map(move |&n| (f.clone(), n)))
        .collect()
}

fn row_or_error(command: &str, name: &str, f: &str, n: usize, ell: Option<usize>, r: Result<ReportRow>) -> ReportRow {
    r.unwrap_or_else(|e| ReportRow::from_error(command, name, f, n, ell, &e))
}

fn exact_row(name: String, f: &str, n: usize, discrepancy: f64, zero: bool) -> ReportRow {
    ReportRow {
        command: "verify".into(),
        name,
        f: f.into(),
        n,
        ell: None,
        lhs: Some(discrepancy),
        rhs: Some(0.0),
        margin: Some(0.0 - discrepancy),
        status: if zero { Status::Pass } else { Status::Fail },
        note: "exact".into(),
    }
}

fn verify_basis(n: usize, seed: u64) -> Vec<ReportRow> {
    let xs = seeded_points(100, seed.wrapping_add(n as u64));
    let mut rows = Vec::new();
    let mut push = |name: &str, r: Result<Vec<gsops::analysis::InequalityReport>>| match r {
        Ok(reps) => rows.extend(reps.iter().map(|r| ReportRow::from_report("verify", r))),
        Err(e) => rows.push(ReportRow::from_error("verify", name, "-", n, None, &e)),
    };
    push("eigen_relation", check_eigen_relation(n, &xs).map(|r| vec![r]));
    push("moments", check_moments(n, &xs).map(|r| vec![r]));
    push("phi_identity", check_phi_identity(n, &xs).map(|r| vec![r]));
    push("tail_bounds", check_tail_bounds(n));
    rows
}

/// `‖D̃Ũ_n f - Ũ_nD̃f‖` in floating point.
fn float_commutation(f: &FunctionSpec, n: usize, acfg: &AnalysisConfig) -> Result<ReportRow> {
    if !f.smoothness().dtilde_w2 {
        // Ũ_n D̃f involves D̃²f.
        return Err(gsops::Error::Precondition(format!("{}: D̃f is not in W²(φ)", f.id)));
    }
    let left = dtilde_form(&apply_utilde(f, n, acfg.tol)?);
    let right = match f.dtilde_spec() {
        Some(df) => apply_utilde(&df, n, acfg.tol)?,
        None => {
            let d = f.dtilde_power(1);
            apply_utilde_integrand(&FnIntegrand { f: &d, degree: None }, n, acfg.tol)?
        }
    };
    let lhs = sup_norm(|x| left.eval(x) - right.eval(x), acfg.grid_size)?.value;
    let norm_f = sup_norm(|x| f.eval(x), acfg.grid_size)?.value;
    let rep = gsops::analysis::InequalityReport::new("DUt=UtD(float)", &f.id, n, lhs, 1e-8 * (n * n) as f64 * norm_f);
    Ok(ReportRow::from_report("verify", &rep))
}

fn verify_function(f: &FunctionSpec, n: usize, ns: &[usize], acfg: &AnalysisConfig) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    if let Some(p) = f.exact_poly() {
        let mut ms: Vec<usize> = ns.iter().copied().filter(|&m| m != n).collect();
        ms.push(n + 1);
        ms.sort_unstable();
        ms.dedup();
        match commute_discrepancies(p, n, ms[0]) {
            Ok(ds) => {
                for d in ds.iter().filter(|d| d.name != "UtmUtn=UtnUtm") {
                    rows.push(exact_row(
                        d.name.into(),
                        &f.id,
                        n,
                        rational_to_f64(&d.value),
                        d.is_zero(),
                    ));
                }
            }
            Err(e) => rows.push(ReportRow::from_error("verify", "commutation", &f.id, n, None, &e)),
        }
        for &m in &ms {
            let name = format!("UtmUtn=UtnUtm[m={m}]");
            match commute_discrepancies(p, n, m) {
                Ok(ds) => {
                    let d = ds.iter().find(|d| d.name == "UtmUtn=UtnUtm").expect("always reported");
                    rows.push(exact_row(name, &f.id, n, rational_to_f64(&d.value), d.is_zero()));
                }
                Err(e) => rows.push(ReportRow::from_error("verify", &name, &f.id, n, None, &e)),
            }
        }
        match telescope_discrepancy(p, n) {
            Ok(d) => {
                let v = d.max_abs_coeff();
                rows.push(exact_row(
                    "telescope".into(),
                    &f.id,
                    n,
                    rational_to_f64(&v),
                    d.is_zero(),
                ));
            }
            Err(e) => rows.push(ReportRow::from_error("verify", "telescope", &f.id, n, None, &e)),
        }
        let float_vs_exact = (|| {
            let exact = BernsteinForm::from_exact(&apply_utilde_exact(p, n)?);
            let float = apply_utilde(f, n, acfg.tol)?;
            let lhs = sup_norm(|x| float.eval(x) - exact.eval(x), acfg.grid_size)?.value;
            let rep = gsops::analysis::InequalityReport::new("Ut(float)=Ut(exact)", &f.id, n, lhs, 1e-10);
            Ok(ReportRow::from_report("verify", &rep))
        })();
        rows.push(row_or_error(
            "verify",
            "Ut(float)=Ut(exact)",
            &f.id,
            n,
            None,
            float_vs_exact,
        ));
    }
    rows.push(row_or_error(
        "verify",
        "DUt=UtD(float)",
        &f.id,
        n,
        None,
        float_commutation(f, n, acfg),
    ));
    rows
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let acfg = analysis_config(cfg);
    let mut rows: Vec<ReportRow> = cfg
        .ns
        .par_iter()
        .flat_map_iter(|&n| verify_basis(n, cfg.seed))
        .collect();
    rows.par_extend(
        pairs(cfg)
            .par_iter()
            .flat_map_iter(|(f, n)| verify_function(f, *n, &cfg.ns, &acfg)),
    );
    Outcome::from_rows(rows, &VERIFY_COLUMNS)
}

pub fn norms(cfg: &RunConfig) -> Outcome {
    let acfg = analysis_config(cfg);
    let mut rows: Vec<ReportRow> = cfg
        .ns
        .par_iter()
        .map(|&n| {
            row_or_error(
                "norms",
                "lebesgue",
                "-",
                n,
                None,
                check_lebesgue(n, cfg.grid).map(|r| ReportRow::from_report("norms", &r)),
            )
        })
        .collect();
    rows.par_extend(pairs(cfg).par_iter().map(|(f, n)| {
        let r = check_bernstein_inequality(f, *n, &acfg).map(|r| ReportRow::from_report("norms", &r));
        row_or_error("norms", "bernstein", &f.id, *n, None, r)
    }));
    if cfg.trials > 0 {
        let n0 = cfg.ns[0];
        let probe = bernstein_probe(&cfg.ns, cfg.trials, cfg.seed, cfg.grid).map(|p| {
            ReportRow::from_report("norms", &p.report()).with_note(format!(
                "random={:.6} (n={}) majorant={:.6} (n={}) trials={}",
                p.random_ratio, p.random_n, p.majorant_ratio, p.majorant_n, p.trials
            ))
        });
        rows.push(row_or_error("norms", "bernstein_probe", "probe", n0, None, probe));
    }
    Outcome::from_rows(rows, &REPORT_COLUMNS)
}

pub fn voronovskaya(cfg: &RunConfig) -> Outcome {
    let acfg = analysis_config(cfg);
    let rows = pairs(cfg)
        .par_iter()
        .map(|(f, n)| {
            let r = check_voronovskaya(f, *n, &acfg).map(|r| ReportRow::from_report("voronovskaya", &r));
            row_or_error("voronovskaya", "voronovskaya", &f.id, *n, None, r)
        })
        .collect();
    Outcome::from_rows(rows, &REPORT_COLUMNS)
}

pub fn converse(cfg: &RunConfig) -> Outcome {
    let acfg = analysis_config(cfg);
    let rows = pairs(cfg)
        .par_iter()
        .flat_map_iter(|(f, n)| {
            let ell = cfg.ell_mult * n;
            match check_converse(f, *n, ell, &acfg) {
                Ok(r) => vec![
                    ReportRow::from_report("converse", &r.converse)
                        .with_note(format!("candidate={}", r.sandwich.candidate_id)),
                    ReportRow::from_report("converse", &r.smoothing),
                    ReportRow::from_report("converse", &r.sandwich.direct_report().with_ell(ell)),
                ],
                Err(e) => vec![ReportRow::from_error("converse", "converse", &f.id, *n, Some(ell), &e)],
            }
        })
        .collect();
    Outcome::from_rows(rows, &REPORT_COLUMNS)
}

pub const KFUNC_COLUMNS: [&str; 9] = [
    "f",
    "n",
    "t",
    "lower",
    "upper",
    "candidate_id",
    "err_Utilde",
    "direct_rhs",
    "pass",
];

pub fn kfunc(cfg: &RunConfig) -> Outcome {
    let acfg = analysis_config(cfg);
    let mut results: Vec<(String, usize, Result<gsops::analysis::KfSandwich>)> = pairs(cfg)
        .par_iter()
        .map(|(f, n)| {
            (
                f.id.clone(),
                *n,
                kfunctional_sandwich(f, *n, &default_candidate_ms(*n), &acfg),
            )
        })
        .collect();
    results.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    let mut failures = Vec::new();
    let rows = results
        .into_iter()
        .map(|(f, n, r)| match r {
            Ok(s) => {
                let direct = s.direct_report();
                let ok = passes(s.lower, s.upper) && direct.pass();
                if !ok {
                    failures.push(ReportRow::from_report("kfunc", &direct));
                }
                vec![
                    Cell::Text(f),
                    Cell::Int(n),
                    Cell::Real(s.t),
                    Cell::Real(s.lower),
                    Cell::Real(s.upper),
                    Cell::Text(s.candidate_id.clone()),
                    Cell::Real(s.error_norm),
                    Cell::Real(direct.rhs),
                    Cell::Text(if ok { "pass" } else { "fail" }.into()),
                ]
            }
            Err(e) => {
                let row = ReportRow::from_error("kfunc", "sandwich", &f, n, None, &e);
                let status = row.status.as_str();
                if row.status == Status::Fail {
                    failures.push(row.clone());
                }
                let mut cells = vec![Cell::Text(f), Cell::Int(n)];
                cells.extend((0..6).map(|_| Cell::Empty));
                cells.push(Cell::Text(status.into()));
                cells
            }
        })
        .collect();
    Outcome {
        table: Table {
            columns: KFUNC_COLUMNS.to_vec(),
            rows,
        },
        failures,
        skipped: Vec::new(),
    }
}

pub const TABLE_COLUMNS: [&str; 7] = ["f", "n", "err_U", "err_Utilde", "lambda_n", "bound_jackson", "ratio"];

struct TableLine {
    n: usize,
    err_u: f64,
    err_ut: f64,
    lambda: f64,
    bound: Option<f64>,
}

fn table_line(f: &FunctionSpec, n: usize, acfg: &AnalysisConfig) -> Result<TableLine> {
    let s = f.smoothness();
    let bound = if s.w2_zero && s.dtilde_w2 {
        Some(dtilde_norm(f, 2, acfg.grid_size)? / (n * n) as f64)
    } else {
        None
    };
    Ok(TableLine {
        n,
        err_u: error_norm(f, n, OperatorKind::U, acfg)?,
        err_ut: error_norm(f, n, OperatorKind::Utilde, acfg)?,
        lambda: tail_sums(n)?.lambda,
        bound,
    })
}

/// Error table with one slope row per function. `ratio` is
/// `err_Utilde / bound_jackson`, the fraction of the Jackson bound used.
pub fn table(cfg: &RunConfig) -> std::result::Result<Outcome, String> {
    let acfg = analysis_config(cfg);
    let fns = cfg.functions();
    let per_f: Vec<Result<Vec<TableLine>>> = fns
        .par_iter()
        .map(|f| cfg.ns.iter().map(|&n| table_line(f, n, &acfg)).collect())
        .collect();
    let mut rows = Vec::new();
    let mut ordered: Vec<(&FunctionSpec, Result<Vec<TableLine>>)> = fns.iter().zip(per_f).collect();
    ordered.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    for (f, lines) in ordered {
        let lines = lines.map_err(|e| format!("{}: {e}", f.id))?;
        for l in &lines {
            rows.push(vec![
                Cell::Text(f.id.clone()),
                Cell::Int(l.n),
                Cell::Real(l.err_u),
                Cell::Real(l.err_ut),
                Cell::Real(l.lambda),
                l.bound.into(),
                l.bound.filter(|&b| b > 0.0).map(|b| l.err_ut / b).into(),
            ]);
        }
        let slope = |kind| rate_fit(f, &cfg.ns, kind, &acfg).ok().map(|r| r.slope);
        rows.push(vec![
            Cell::Text(f.id.clone()),
            Cell::Text("slope".into()),
            slope(OperatorKind::U).into(),
            slope(OperatorKind::Utilde).into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    Ok(Outcome {
        table: Table {
            columns: TABLE_COLUMNS.to_vec(),
            rows,
        },
        failures: Vec::new(),
        skipped: Vec::new(),
    })
}
