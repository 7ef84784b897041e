//! Adjusted mutual information with the arithmetic-mean normalizer and the
//! expected mutual information of the permutation model.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// `(MI - E[MI]) / (mean(H(a), H(b)) - E[MI])`.
///
/// Returns exactly 1 when the partitions agree up to relabeling, and 0
/// when the denominator vanishes otherwise.
pub fn ami(a: &[i64], b: &[i64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::Empty("labelings"));
    }
    let ia = dense_ids(a);
    let ib = dense_ids(b);
    let r = ia.iter().max().expect("nonempty") + 1;
    let c = ib.iter().max().expect("nonempty") + 1;
    let mut table = vec![vec![0usize; c]; r];
    for (&x, &y) in ia.iter().zip(&ib) {
        table[x][y] += 1;
    }
    if same_partition(&table) {
        return Ok(1.0);
    }
    let n = a.len();
    let rows: Vec<usize> = table.iter().map(|row| row.iter().sum()).collect();
    let cols: Vec<usize> = (0..c).map(|j| table.iter().map(|row| row[j]).sum()).collect();
    let nf = n as f64;
    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&k| k > 0)
            .map(|&k| {
                let p = k as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let (ha, hb) = (entropy(&rows), entropy(&cols));
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let v = nij as f64;
                mi += v / nf * (nf * v / (rows[i] as f64 * cols[j] as f64)).ln();
            }
        }
    }
    let emi = expected_mi(&rows, &cols, n);
    let denom = (ha + hb) / 2.0 - emi;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((mi - emi) / denom)
}

fn dense_ids(labels: &[i64]) -> Vec<usize> {
    let mut ids = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect()
}

/// Each row and each column of the contingency table has exactly one
/// nonzero cell.
fn same_partition(table: &[Vec<usize>]) -> bool {
    let rows_ok = table.iter().all(|row| row.iter().filter(|&&v| v > 0).count() == 1);
    let cols = table[0].len();
    let cols_ok = (0..cols).all(|j| table.iter().filter(|row| row[j] > 0).count() == 1);
    rows_ok && cols_ok
}

/// Expected mutual information between random labelings with the given
/// marginals (hypergeometric model).
fn expected_mi(rows: &[usize], cols: &[usize], n: usize) -> f64 {
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &ai in rows {
        for &bj in cols {
            let lo = (ai + bj).saturating_sub(n).max(1);
            let hi = ai.min(bj);
            for nij in lo..=hi {
                let v = nij as f64;
                let term = v / nf * (nf * v / (ai as f64 * bj as f64)).ln();
                let log_p = lf[ai] + lf[bj] + lf[n - ai] + lf[n - bj]
                    - lf[n]
                    - lf[nij]
                    - lf[ai - nij]
                    - lf[bj - nij]
                    - lf[n + nij - ai - bj];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// `ln(k!)` for `k = 0..=n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}
