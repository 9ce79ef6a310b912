//! Flat CSV record stream for [`CoefficientTree`] values.
//!
//! ```text
//! # optional comment lines
//! d,j_max,scaling_coefficient
//! 1,4,1
//! j,k,value            (d = 2: j,k1,k2,value)
//! 2,1,0.25
//! ```
//!
//! One record per nonzero coefficient, in `(j, k)` order. Floats use the shortest
//! representation that round-trips.

use std::io::{BufRead, Write};

use crate::dyadic::{CoefficientTree, Dimension, LevelIndex};
use crate::error::{Error, Result};

pub fn write_tree<W: Write>(tree: &CoefficientTree, mut out: W, comment: Option<&str>) -> Result<()> {
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    writeln!(out, "d,j_max,scaling_coefficient")?;
    writeln!(out, "{},{},{}", tree.dim().get(), tree.j_max(), tree.scaling())?;
    match tree.dim() {
        Dimension::One => writeln!(out, "j,k,value")?,
        Dimension::Two => writeln!(out, "j,k1,k2,value")?,
    }
    for (idx, v) in tree.iter_nonzero() {
        write!(out, "{}", idx.j())?;
        for c in idx.k() {
            write!(out, ",{c}")?;
        }
        writeln!(out, ",{v}")?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(raw: &str, line: usize, what: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{raw}`")))
}

pub fn read_tree<R: BufRead>(input: R) -> Result<CoefficientTree> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => !s.trim().is_empty() && !s.trim_start().starts_with('#'),
            Err(_) => true,
        });

    let mut next = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(s))) => Ok((n, s)),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(parse_err(0, format!("unexpected end of input, expected {expect}"))),
        }
    };

    let (n, header) = next("header")?;
    if header.trim() != "d,j_max,scaling_coefficient" {
        return Err(parse_err(n, "expected `d,j_max,scaling_coefficient`"));
    }
    let (n, meta) = next("header values")?;
    let parts: Vec<&str> = meta.split(',').collect();
    if parts.len() != 3 {
        return Err(parse_err(n, "header needs three fields"));
    }
    let dim = Dimension::try_from(field::<u32>(parts[0], n, "d")?)
        .map_err(|e| parse_err(n, e.to_string()))?;
    let j_max: u32 = field(parts[1], n, "j_max")?;
    let scaling: f64 = field(parts[2], n, "scaling_coefficient")?;
    let mut tree = CoefficientTree::new(dim, j_max)
        .map_err(|e| parse_err(n, e.to_string()))?
        .with_scaling(scaling);

    let (n, cols) = next("record header")?;
    let expected = match dim {
        Dimension::One => "j,k,value",
        Dimension::Two => "j,k1,k2,value",
    };
    if cols.trim() != expected {
        return Err(parse_err(n, format!("expected `{expected}`")));
    }
    let width = dim.get() as usize + 2;
    for (n, line) in lines {
        let line = line?;
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != width {
            return Err(parse_err(n, format!("record needs {width} fields")));
        }
        let j: u32 = field(parts[0], n, "j")?;
        let k: Vec<u64> = parts[1..width - 1]
            .iter()
            .map(|p| field(p, n, "k"))
            .collect::<Result<_>>()?;
        let v: f64 = field(parts[width - 1], n, "value")?;
        let idx = LevelIndex::new(j, &k).map_err(|e| parse_err(n, e.to_string()))?;
        tree.set(&idx, v).map_err(|e| parse_err(n, e.to_string()))?;
    }
    Ok(tree)
}
