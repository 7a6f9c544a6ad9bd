use crate::config::{Format, RunConfig};
use gsops::report::ReportRow;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every f64.
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<Option<usize>> for Cell {
    fn from(v: Option<usize>) -> Self {
        v.map_or(Cell::Empty, Cell::Int)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub const VERIFY_COLUMNS: [&str; 7] = ["name", "f", "n", "lhs", "rhs", "margin", "pass"];
pub const REPORT_COLUMNS: [&str; 9] = ["name", "f", "n", "ell", "lhs", "rhs", "margin", "pass", "note"];

pub fn report_table(rows: &[ReportRow], columns: &[&'static str]) -> Table {
    let cell = |r: &ReportRow, c: &str| match c {
        "name" => Cell::Text(r.name.clone()),
        "f" => Cell::Text(r.f.clone()),
        "n" => Cell::Int(r.n),
        "ell" => r.ell.into(),
        "lhs" => r.lhs.into(),
        "rhs" => r.rhs.into(),
        "margin" => r.margin.into(),
        "pass" => Cell::Text(r.status.as_str().into()),
        "note" => Cell::Text(r.note.clone()),
        other => unreachable!("unknown report column {other}"),
    };
    Table {
        columns: columns.to_vec(),
        rows: rows
            .iter()
            .map(|r| columns.iter().map(|c| cell(r, c)).collect())
            .collect(),
    }
}

pub fn header_line(cfg: &RunConfig) -> String {
    format!(
        "# gsops {} command={} config_hash={} seed={}",
        env!("CARGO_PKG_VERSION"),
        cfg.command,
        cfg.hash(),
        cfg.seed
    )
}

/// CSV, or JSON Lines whose first object is the header.
pub fn render(table: &Table, cfg: &RunConfig) -> Vec<u8> {
    match cfg.format {
        Format::Csv => {
            let mut out = header_line(cfg).into_bytes();
            out.push(b'\n');
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
        Format::Json => {
            let header = json!({
                "gsops": env!("CARGO_PKG_VERSION"),
                "command": cfg.command,
                "config_hash": cfg.hash(),
                "seed": cfg.seed,
                "columns": table.columns,
            });
            let mut out = header.to_string();
            out.push('\n');
            for row in &table.rows {
                let obj: Map<String, Value> = table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                out.push_str(&Value::Object(obj).to_string());
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gsops::analysis::InequalityReport;

    fn cfg(format: Format) -> RunConfig {
        RunConfig {
            command: "norms".into(),
            fns: vec!["t2".into()],
            poly: None,
            ns: vec![2],
            ell_mult: 16,
            grid: 2001,
            tol: 1e-13,
            trials: 10,
            format,
            seed: 42,
            input: None,
        }
    }

    #[test]
    fn csv_layout() {
        let row = ReportRow::from_report("norms", &InequalityReport::new("lebesgue", "-", 2, 1.0, 0.1));
        let out = String::from_utf8(render(&report_table(&[row], &REPORT_COLUMNS), &cfg(Format::Csv))).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("# gsops ") && lines[0].ends_with("seed=42"));
        assert_eq!(lines[1], "name,f,n,ell,lhs,rhs,margin,pass,note");
        assert_eq!(
            lines[2],
            "lebesgue,-,2,,1.0000000000000000e0,1.0000000000000001e-1,-9.0000000000000002e-1,fail,"
        );
    }

    #[test]
    fn json_lines_layout() {
        let table = Table {
            columns: vec!["f", "x", "y"],
            rows: vec![vec![Cell::Text("t2".into()), Cell::Real(0.5), Cell::Empty]],
        };
        let out = String::from_utf8(render(&table, &cfg(Format::Json))).unwrap();
        let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines[0]["seed"], 42);
        assert_eq!(lines[1]["x"], 0.5);
        assert!(lines[1]["y"].is_null());
    }
}
