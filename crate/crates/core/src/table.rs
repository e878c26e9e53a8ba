//! Comparison records and their CSV layout.
//!
//! Header: `n,z,nu_exact,<method>,<method>_relerr,...` with the methods in
//! [`Method::ALL`] order. Values carry 15 significant digits; relative
//! errors `|estimate / nu_exact - 1|` are written in scientific notation.
//! A cell is empty when the method is undefined for that `n` (or when no
//! exact value was computed). Lines end in LF.

use std::io::Write;

use crate::error::{Error, Result};
use crate::estimators::Method;

/// One row of a zeros/comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub n: u32,
    pub z: f64,
    pub nu_exact: Option<f64>,
    /// Estimates in the order of the table's method list; `None` where the
    /// formula is undefined.
    pub estimates: Vec<(Method, Option<f64>)>,
}

impl ZeroRecord {
    /// Evaluates `methods` at `(n, z)`. Domain errors become empty cells;
    /// any other failure is returned.
    pub fn compute(n: u32, z: f64, nu_exact: Option<f64>, methods: &[Method]) -> Result<Self> {
        let estimates = methods
            .iter()
            .map(|&m| match m.estimate(n, z) {
                Ok(e) => Ok((m, Some(e.value))),
                Err(Error::Domain { .. }) => Ok((m, None)),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ZeroRecord {
            n,
            z,
            nu_exact,
            estimates,
        })
    }

    pub fn estimate(&self, method: Method) -> Option<f64> {
        self.estimates
            .iter()
            .find(|(m, _)| *m == method)
            .and_then(|(_, v)| *v)
    }

    /// `|estimate / nu_exact - 1|`.
    pub fn rel_err(&self, method: Method) -> Option<f64> {
        let exact = self.nu_exact?;
        let est = self.estimate(method)?;
        Some((est / exact - 1.0).abs())
    }
}

/// Sorts and deduplicates a method list into table column order.
pub fn normalize_methods(methods: &[Method]) -> Vec<Method> {
    let mut v = methods.to_vec();
    v.sort();
    v.dedup();
    v
}

/// 15 significant digits, positional notation.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.14}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (14 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

/// 15 significant digits, scientific notation.
pub fn format_rel_err(v: f64) -> String {
    format!("{v:.14e}")
}

pub fn header(methods: &[Method]) -> Vec<String> {
    let mut h = vec!["n".to_string(), "z".to_string(), "nu_exact".to_string()];
    for m in methods {
        h.push(m.name().to_string());
        h.push(format!("{}_relerr", m.name()));
    }
    h
}

fn row(r: &ZeroRecord, methods: &[Method]) -> Vec<String> {
    let mut out = vec![
        r.n.to_string(),
        format_value(r.z),
        r.nu_exact.map(format_value).unwrap_or_default(),
    ];
    for &m in methods {
        out.push(r.estimate(m).map(format_value).unwrap_or_default());
        out.push(r.rel_err(m).map(format_rel_err).unwrap_or_default());
    }
    out
}

/// Writes `records` as CSV with columns for `methods` (normalised to table
/// order).
pub fn write_csv<W: Write>(out: W, records: &[ZeroRecord], methods: &[Method]) -> Result<()> {
    let methods = normalize_methods(methods);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Output(e.to_string());
    w.write_record(header(&methods)).map_err(io)?;
    for r in records {
        w.write_record(row(r, &methods)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(())
}

/// `1..=20` densely, then 25 log-spaced points per decade, ending at
/// `n_max`.
pub fn compare_grid(n_max: u32) -> Vec<u32> {
    let mut grid: Vec<u32> = (1..=n_max.min(20)).collect();
    let mut k = 33; // 10^(33/25) ~ 21
    loop {
        let n = 10f64.powf(f64::from(k) / 25.0).round();
        if n > f64::from(n_max) {
            break;
        }
        let n = n as u32;
        if grid.last().is_none_or(|&last| n > last) {
            grid.push(n);
        }
        k += 1;
    }
    if grid.last() != Some(&n_max) {
        grid.push(n_max);
    }
    grid
}
