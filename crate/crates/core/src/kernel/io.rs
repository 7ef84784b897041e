//! Text formats for models (`IKM1`) and codes (`IKC1`).
//!
//! ```text
//! IKM1 psi=<psi> t=<t> dim=<d> seed=<s>
//! <t blocks of psi lines, each line d comma-separated reals>
//!
//! IKC1 psi=<psi> t=<t> n=<n>
//! <n lines of t space-separated cell indices>
//! ```
//!
//! Reals are written with 17 significant digits, so a model survives a
//! write/read cycle bit for bit. Readers skip `#` lines before the header;
//! line numbers in errors count them.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::kernel::code::IkCode;
use crate::kernel::model::IkModel;
use crate::vector::FeatureVector;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_model<W: Write>(model: &IkModel, mut out: W) -> Result<()> {
    writeln!(
        out,
        "IKM1 psi={} t={} dim={} seed={}",
        model.psi(),
        model.t(),
        model.dim(),
        model.seed()
    )?;
    let mut line = String::new();
    for set in model.references() {
        for z in set {
            line.clear();
            for j in 0..z.dim() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&fmt_f64(z.get(j)));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

/// Parses `key=value` fields of a header line, in the given order.
fn header_fields(line: &str, magic: &str, keys: &[&str], lineno: usize) -> Result<Vec<u64>> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(magic) {
        return Err(Error::parse(lineno, format!("expected `{magic}` header")));
    }
    let mut out = Vec::with_capacity(keys.len());
    for key in keys {
        let field = parts
            .next()
            .ok_or_else(|| Error::parse(lineno, format!("missing header field `{key}`")))?;
        let value = field
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| Error::parse(lineno, format!("expected `{key}=`, found `{field}`")))?;
        out.push(
            value
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad value for `{key}`: `{value}`")))?,
        );
    }
    if let Some(extra) = parts.next() {
        return Err(Error::parse(lineno, format!("unexpected header field `{extra}`")));
    }
    Ok(out)
}

/// Next line after any `#` comment lines, with its 1-based number.
fn first_content_line<I: Iterator<Item = std::io::Result<String>>>(
    lines: &mut I,
    what: &str,
) -> Result<(usize, String)> {
    let mut lineno = 0;
    loop {
        lineno += 1;
        let line = lines
            .next()
            .ok_or_else(|| Error::parse(lineno, format!("empty {what} file")))??;
        if !line.starts_with('#') {
            return Ok((lineno, line));
        }
    }
}

pub fn read_model<R: BufRead>(input: R) -> Result<IkModel> {
    let mut lines = input.lines();
    let (mut lineno, header) = first_content_line(&mut lines, "model")?;
    let f = header_fields(&header, "IKM1", &["psi", "t", "dim", "seed"], lineno)?;
    let (psi, t, dim, seed) = (f[0] as usize, f[1] as usize, f[2] as usize, f[3]);
    let mut refs = Vec::with_capacity(t);
    for _ in 0..t {
        let mut set = Vec::with_capacity(psi);
        for _ in 0..psi {
            lineno += 1;
            let line = lines
                .next()
                .ok_or_else(|| Error::parse(lineno, "unexpected end of model file"))??;
            let values = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(lineno, format!("bad real `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != dim {
                return Err(Error::parse(
                    lineno,
                    format!("expected {dim} values, found {}", values.len()),
                ));
            }
            set.push(FeatureVector::dense(values).map_err(|e| Error::parse(lineno, e.to_string()))?);
        }
        refs.push(set);
    }
    if let Some(extra) = lines.next() {
        if !extra?.trim().is_empty() {
            return Err(Error::parse(lineno + 1, "trailing data after model"));
        }
    }
    IkModel::from_references(refs, seed)
}

pub fn write_codes<W: Write>(codes: &[IkCode], mut out: W) -> Result<()> {
    let (psi, t) = codes.first().map_or((0, 0), |c| (c.psi(), c.t()));
    writeln!(out, "IKC1 psi={psi} t={t} n={}", codes.len())?;
    let mut line = String::new();
    for c in codes {
        if c.psi() != psi || c.t() != t {
            return Err(Error::IncompatibleCodes {
                psi_a: psi,
                t_a: t,
                psi_b: c.psi(),
                t_b: c.t(),
            });
        }
        line.clear();
        for (i, cell) in c.cells().iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&cell.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_codes<R: BufRead>(input: R) -> Result<Vec<IkCode>> {
    let mut lines = input.lines();
    let (first, header) = first_content_line(&mut lines, "code")?;
    let f = header_fields(&header, "IKC1", &["psi", "t", "n"], first)?;
    let (psi, t, n) = (f[0] as usize, f[1] as usize, f[2] as usize);
    let mut codes = Vec::with_capacity(n);
    for row in 0..n {
        let lineno = first + row + 1;
        let line = lines
            .next()
            .ok_or_else(|| Error::parse(lineno, "unexpected end of code file"))??;
        let cells = line
            .split_whitespace()
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|_| Error::parse(lineno, format!("bad cell index `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if cells.len() != t {
            return Err(Error::parse(lineno, format!("expected {t} cells, found {}", cells.len())));
        }
        codes.push(IkCode::new(psi, cells).map_err(|e| Error::parse(lineno, e.to_string()))?);
    }
    Ok(codes)
}
