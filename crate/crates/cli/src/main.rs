//! `gsops`: verification suites and convergence experiments for the modified
//! Goodman–Sharma operator.
//!
//! Exit codes: 0 when every row passes, 1 when an estimate is violated or a
//! computation fails, 2 for invalid input.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{parse_fns, parse_n_spec, parse_poly, Format, RunConfig, UsageError};
use gsops::operators::{apply_u, apply_utilde, iterate_utilde, BernsteinForm, FunctionSpec};
use output::{Cell, Table};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gsops", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact identity suite plus floating-point identities.
    Verify(Common),
    /// Error table for U_n and Ũ_n with fitted slopes.
    Table(Common),
    /// Lebesgue bounds and the Bernstein-type inequality, with a random probe.
    Norms(Common),
    /// K-functional sandwich per (f, n).
    Kfunc(Common),
    /// Voronovskaya-type estimate per (f, n).
    Voronovskaya(Common),
    /// Converse estimate at ℓ = ell-mult · n.
    Converse(Common),
    /// Evaluate a Bernstein form read from JSON.
    Eval(EvalArgs),
    /// Apply U_n or Ũ_n to one function and print the resulting form as JSON.
    Apply(ApplyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Catalog function ids, comma separated (default: whole catalog).
    #[arg(long, value_delimiter = ',')]
    fns: Option<Vec<String>>,
    /// Extra polynomial as a JSON array of monomial coefficients ("p/q" strings or integers).
    #[arg(long)]
    poly: Option<String>,
    /// Degrees: start:factor:count, a comma list, or a single value.
    #[arg(long)]
    n: Option<String>,
    #[arg(long, default_value_t = 16)]
    ell_mult: usize,
    #[arg(long, default_value_t = gsops::analysis::DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = gsops::operators::DEFAULT_TOL)]
    tol: f64,
    /// Random sign patterns for the `norms` probe.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// JSON file holding {"degree": n, "coeffs": [...]}; lines starting with '#' are ignored.
    #[arg(long)]
    form: PathBuf,
    /// Points in [0, 1], comma separated (default: 0, 0.1, ..., 1).
    #[arg(long, value_delimiter = ',')]
    x: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Op {
    U,
    Utilde,
}

#[derive(Args)]
struct ApplyArgs {
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long)]
    poly: Option<String>,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Op::Utilde)]
    op: Op,
    /// Number of applications (Ũ_n only).
    #[arg(long, default_value_t = 1)]
    times: usize,
    #[arg(long, default_value_t = gsops::operators::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_ns(command: &str) -> &'static str {
    match command {
        "table" => "4:2:5",
        "norms" => "2:2:7",
        "kfunc" | "converse" => "2:2:3",
        _ => "2:2:5",
    }
}

fn run_config(command: &str, c: &Common) -> Result<RunConfig, UsageError> {
    let poly = c.poly.as_deref().map(parse_poly).transpose()?;
    let fns = parse_fns(c.fns.as_deref(), poly.is_some())?;
    let ns = parse_n_spec(c.n.as_deref().unwrap_or(default_ns(command)))?;
    if c.grid < gsops::analysis::MIN_GRID {
        return Err(UsageError(format!(
            "--grid must be at least {}",
            gsops::analysis::MIN_GRID
        )));
    }
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(UsageError("--tol must be positive".into()));
    }
    if c.ell_mult == 0 {
        return Err(UsageError("--ell-mult must be positive".into()));
    }
    Ok(RunConfig {
        command: command.into(),
        fns,
        poly,
        ns,
        ell_mult: c.ell_mult,
        grid: c.grid,
        tol: c.tol,
        trials: c.trials,
        format: c.format,
        seed: c.seed,
        input: None,
    })
}

fn write_out(path: Option<&PathBuf>, bytes: &[u8]) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| e.to_string())
        }
    }
}

fn emit(cfg: &RunConfig, out: Option<&PathBuf>, outcome: commands::Outcome) -> ExitCode {
    if let Err(e) = write_out(out, &output::render(&outcome.table, cfg)) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    for r in &outcome.failures {
        eprintln!(
            "FAIL {} f={} n={} ell={:?} lhs={:?} rhs={:?} {}",
            r.name, r.f, r.n, r.ell, r.lhs, r.rhs, r.note
        );
    }
    for r in &outcome.skipped {
        eprintln!("skip {} f={} n={}: {}", r.name, r.f, r.n, r.note);
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn read_form(path: &PathBuf) -> Result<BernsteinForm, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let form: BernsteinForm =
        serde_json::from_str(&body).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    form.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(form)
}

fn eval(a: &EvalArgs) -> ExitCode {
    let form = match read_form(&a.form) {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let xs =
        a.x.clone()
            .unwrap_or_else(|| (0..=10).map(|i| i as f64 / 10.0).collect());
    if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return usage(format!("x = {x} lies outside [0, 1]"));
    }
    let cfg = RunConfig {
        command: "eval".into(),
        fns: Vec::new(),
        poly: None,
        ns: vec![form.degree],
        ell_mult: 0,
        grid: 0,
        tol: 0.0,
        trials: 0,
        format: a.format,
        seed: 0,
        input: Some(serde_json::json!({ "form": form, "x": xs }).to_string()),
    };
    let table = Table {
        columns: vec!["x", "p"],
        rows: xs
            .iter()
            .map(|&x| vec![Cell::Real(x), Cell::Real(form.eval(x))])
            .collect(),
    };
    emit(
        &cfg,
        a.out.as_ref(),
        commands::Outcome {
            table,
            failures: Vec::new(),
            skipped: Vec::new(),
        },
    )
}

fn apply(a: &ApplyArgs) -> ExitCode {
    let f = match (&a.function, &a.poly) {
        (Some(id), None) => FunctionSpec::by_id(id).map_err(|e| UsageError(e.to_string())),
        (None, Some(json)) => parse_poly(json).map(|p| FunctionSpec::polynomial("poly", p)),
        _ => Err(UsageError("give exactly one of --fn and --poly".into())),
    };
    let f = match f {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    if a.n == 0 || a.times == 0 {
        return usage("--n and --times must be positive");
    }
    let result = match a.op {
        Op::U if a.times == 1 => apply_u(&f, a.n, a.tol),
        Op::U => return usage("--times applies to utilde only"),
        Op::Utilde if a.times == 1 => apply_utilde(&f, a.n, a.tol),
        Op::Utilde => iterate_utilde(&f, a.n, a.times, a.tol),
    };
    let form = match result {
        Ok(form) => form,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let op = match a.op {
        Op::U => "U",
        Op::Utilde => "Utilde",
    };
    let header = format!(
        "# gsops {} command=apply op={op} f={} n={} times={}\n",
        env!("CARGO_PKG_VERSION"),
        f.id,
        a.n,
        a.times
    );
    let body = serde_json::to_string(&form).expect("form serializes");
    match write_out(a.out.as_ref(), format!("{header}{body}\n").as_bytes()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Verify(c) => ("verify", c),
        Command::Table(c) => ("table", c),
        Command::Norms(c) => ("norms", c),
        Command::Kfunc(c) => ("kfunc", c),
        Command::Voronovskaya(c) => ("voronovskaya", c),
        Command::Converse(c) => ("converse", c),
        Command::Eval(a) => return eval(a),
        Command::Apply(a) => return apply(a),
    };
    let cfg = match run_config(name, common) {
        Ok(cfg) => cfg,
        Err(e) => return usage(e),
    };
    let outcome = match name {
        "verify" => commands::verify(&cfg),
        "table" => match commands::table(&cfg) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        "norms" => commands::norms(&cfg),
        "kfunc" => commands::kfunc(&cfg),
        "voronovskaya" => commands::voronovskaya(&cfg),
        "converse" => commands::converse(&cfg),
        _ => unreachable!(),
    };
    emit(&cfg, common.out.as_ref(), outcome)
}
