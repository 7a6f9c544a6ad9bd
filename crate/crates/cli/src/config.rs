use gsops::exactpoly::RationalPoly;
use gsops::operators::FunctionSpec;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt;

/// Invalid command-line input; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything that determines a run's output. The output path is not part
/// of it, so the same run written to two places hashes identically.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub fns: Vec<String>,
    pub poly: Option<RationalPoly>,
    pub ns: Vec<usize>,
    pub ell_mult: usize,
    pub grid: usize,
    pub tol: f64,
    pub trials: usize,
    pub format: Format,
    pub seed: u64,
    /// Command-specific input (a form and evaluation points, say).
    pub input: Option<String>,
}

impl RunConfig {
    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }

    pub fn functions(&self) -> Vec<FunctionSpec> {
        let mut out: Vec<FunctionSpec> = self
            .fns
            .iter()
            .map(|id| FunctionSpec::by_id(id).expect("validated"))
            .collect();
        if let Some(p) = &self.poly {
            out.push(FunctionSpec::polynomial("poly", p.clone()));
        }
        out
    }
}

/// Parses `start:factor:count`, a comma list, or a single value. Every n must
/// be at least 2.
pub fn parse_n_spec(spec: &str) -> Result<Vec<usize>, UsageError> {
    let bad = |msg: String| UsageError(format!("--n {spec:?}: {msg}"));
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| bad(format!("{s:?} is not a non-negative integer")))
    };
    let ns = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("geometric ranges are start:factor:count".into()));
        }
        let (start, factor, count) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if factor < 2 {
            return Err(bad(format!("factor must be at least 2, got {factor}")));
        }
        if count == 0 {
            return Err(bad("count must be positive".into()));
        }
        let mut ns = Vec::with_capacity(count);
        let mut n = start;
        for _ in 0..count {
            ns.push(n);
            n = n.checked_mul(factor).ok_or_else(|| bad("range overflows".into()))?;
        }
        ns
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if ns.is_empty() {
        return Err(bad("no values".into()));
    }
    if let Some(n) = ns.iter().find(|&&n| n < 2) {
        return Err(bad(format!("every n must be at least 2, got {n}")));
    }
    Ok(ns)
}

/// Validates catalog ids; an explicitly empty list is an error.
pub fn parse_fns(fns: Option<&[String]>, has_poly: bool) -> Result<Vec<String>, UsageError> {
    let ids: Vec<String> = match fns {
        None if has_poly => Vec::new(),
        None => gsops::operators::CATALOG_IDS.iter().map(|s| s.to_string()).collect(),
        Some(list) => list
            .iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
    };
    if ids.is_empty() && !has_poly {
        return Err(UsageError("function list is empty".into()));
    }
    for id in &ids {
        FunctionSpec::by_id(id).map_err(|e| UsageError(e.to_string()))?;
    }
    Ok(ids)
}

pub fn parse_poly(json: &str) -> Result<RationalPoly, UsageError> {
    serde_json::from_str(json).map_err(|e| UsageError(format!("--poly: {e}")))
}
