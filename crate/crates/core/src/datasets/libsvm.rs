//! LIBSVM sparse text format: `<label> <idx>:<val> ...` with 1-based,
//! strictly ascending indices. Blank lines and lines starting with `#` are
//! skipped.

use std::io::{BufRead, Write};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::vector::FeatureVector;

/// Parses LIBSVM text. The dimension is the largest index seen.
pub fn parse_libsvm<R: BufRead>(input: R) -> Result<Dataset> {
    parse_libsvm_with_dim(input, None)
}

/// Parses LIBSVM text with an optional explicit dimension, which must be
/// at least the largest index seen.
pub fn parse_libsvm_with_dim<R: BufRead>(input: R, dim: Option<usize>) -> Result<Dataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_idx = 0;
    for (lineno, line) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("line is nonempty");
        labels.push(parse_label(label_tok).ok_or_else(|| {
            Error::parse(lineno, format!("bad label `{label_tok}`"))
        })?);
        let mut row = Vec::new();
        for tok in tokens {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected `idx:val`, found `{tok}`")))?;
            let i: usize = i
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad index `{i}`")))?;
            if i == 0 {
                return Err(Error::parse(lineno, "indices are 1-based"));
            }
            let v: f64 = v
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::parse(lineno, format!("bad value `{v}`")))?;
            if let Some(&(prev, _)) = row.last() {
                if i - 1 <= prev {
                    return Err(Error::parse(lineno, format!("index {i} not ascending")));
                }
            }
            max_idx = max_idx.max(i);
            row.push((i - 1, v));
        }
        rows.push(row);
    }
    let dim = match dim {
        Some(d) if d < max_idx => {
            return Err(Error::InvalidParameter(format!(
                "explicit dim {d} below largest index {max_idx}"
            )))
        }
        Some(d) => d,
        None => max_idx,
    };
    if rows.is_empty() {
        return Dataset::new("libsvm", Vec::new(), Some(Vec::new())).map(|mut ds| {
            ds.dim = dim;
            ds
        });
    }
    if dim == 0 {
        return Err(Error::parse(1, "no features in any row"));
    }
    let points = rows
        .into_iter()
        .map(|r| FeatureVector::sparse(dim, r))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new("libsvm", points, Some(labels))
}

fn parse_label(tok: &str) -> Option<i64> {
    let tok = tok.strip_prefix('+').unwrap_or(tok);
    if let Ok(v) = tok.parse::<i64>() {
        return Some(v);
    }
    let v: f64 = tok.parse().ok()?;
    (v.fract() == 0.0 && v.is_finite()).then_some(v as i64)
}

/// Writes `ds` in LIBSVM format, nonzero entries only. Unlabeled points
/// get label 0. Each `comments` entry becomes a leading `# ` line.
pub fn write_libsvm<W: Write>(ds: &Dataset, comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut line = String::new();
    for (i, p) in ds.points.iter().enumerate() {
        line.clear();
        let label = ds.labels.as_ref().map_or(0, |l| l[i]);
        line.push_str(&label.to_string());
        for (j, v) in p.iter_nonzero() {
            line.push_str(&format!(" {}:{}", j + 1, v));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
