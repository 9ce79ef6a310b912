//! CSV emission and parsing for experiment tables.
//!
//! Floats are written with the shortest representation that round-trips, so a
//! table read back reproduces the in-memory values exactly.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rates::RiskRow;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const VERDICTS_FILE: &str = "verdicts.csv";

pub(crate) fn render<R: AsRef<[String]>>(hash: &str, header: &[&str], rows: &[R]) -> String {
    let mut out = format!("# manifest {hash}\n{}\n", header.join(","));
    for row in rows {
        out.push_str(&row.as_ref().join(","));
        out.push('\n');
    }
    out
}

pub(crate) fn cells(values: &[&dyn Display]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

/// Parsed table: the manifest hash from the comment row and the data records.
pub(crate) struct CsvTable {
    pub hash: Option<String>,
    pub records: Vec<(usize, Vec<String>)>,
}

pub(crate) fn parse(text: &str, header: &[&str]) -> Result<CsvTable> {
    let mut hash = None;
    let mut header_seen = false;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(h) = comment.trim().strip_prefix("manifest ") {
                hash = Some(h.trim().to_string());
            }
            continue;
        }
        if !header_seen {
            if line != header.join(",") {
                return Err(Error::Parse {
                    line: n,
                    message: format!("expected header `{}`", header.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != header.len() {
            return Err(Error::Parse {
                line: n,
                message: format!("expected {} fields", header.len()),
            });
        }
        records.push((n, fields));
    }
    if !header_seen {
        return Err(Error::Parse {
            line: 0,
            message: "missing header".to_string(),
        });
    }
    Ok(CsvTable { hash, records })
}

pub(crate) fn field<T: std::str::FromStr>(line: usize, raw: &str, name: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad {name} `{raw}`"),
    })
}

pub(crate) const RISK_HEADER: [&str; 4] = ["n", "risk", "std_error", "replicates"];
pub(crate) const SLOPE_HEADER: [&str; 4] = ["normalization", "slope", "implied_alpha", "r_squared"];
pub(crate) const SCALING_HEADER: [&str; 4] = ["p", "estimate", "theory", "residual"];
pub(crate) const WITNESS_HEADER: [&str; 3] = ["t", "bound", "log2_bound"];
pub(crate) const VERDICT_HEADER: [&str; 7] = ["criterion", "check", "measured", "expected", "tolerance", "relation", "pass"];

/// Reads a risk table; returns the rows and the manifest hash recorded in it.
pub fn read_risk_csv(path: &Path) -> Result<(Vec<RiskRow>, Option<String>)> {
    let t = parse(&fs::read_to_string(path)?, &RISK_HEADER)?;
    let rows = t
        .records
        .iter()
        .map(|(n, f)| {
            Ok(RiskRow {
                n: field(*n, &f[0], "n")?,
                empirical_risk: field(*n, &f[1], "risk")?,
                std_error: field(*n, &f[2], "std_error")?,
                replicates: field(*n, &f[3], "replicates")?,
            })
        })
        .collect::<Result<_>>()?;
    Ok((rows, t.hash))
}
