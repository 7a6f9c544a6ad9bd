//! Flat result records shared by the command-line driver and the test suites.

use crate::analysis::InequalityReport;
use crate::error::Error;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The estimate does not apply to this input.
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub command: String,
    pub name: String,
    pub f: String,
    pub n: usize,
    pub ell: Option<usize>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub status: Status,
    pub note: String,
}

impl ReportRow {
    pub fn from_report(command: &str, r: &InequalityReport) -> Self {
        Self {
            command: command.into(),
            name: r.name.clone(),
            f: r.f.clone(),
            n: r.n,
            ell: r.ell,
            lhs: Some(r.lhs),
            rhs: Some(r.rhs),
            margin: Some(r.margin()),
            status: if r.pass() { Status::Pass } else { Status::Fail },
            note: String::new(),
        }
    }

    /// Row for a computation that did not produce a report. Precondition
    /// rejections become skips; anything else is a failure.
    pub fn from_error(command: &str, name: &str, f: &str, n: usize, ell: Option<usize>, err: &Error) -> Self {
        let status = match err {
            Error::Precondition(_) => Status::Skip,
            _ => Status::Fail,
        };
        Self {
            command: command.into(),
            name: name.into(),
            f: f.into(),
            n,
            ell,
            lhs: None,
            rhs: None,
            margin: None,
            status,
            note: err.to_string(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn sort_key(&self) -> (&str, &str, usize, Option<usize>, &str) {
        (&self.command, &self.f, self.n, self.ell, &self.name)
    }
}

/// Orders rows by `(command, f, n, ℓ, name)` so output never depends on
/// evaluation order.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn any_failed(rows: &[ReportRow]) -> bool {
    rows.iter().any(|r| r.status == Status::Fail)
}
