//! CSV and text emission.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! that a trace re-read from disk reproduces the computed values bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use polynotope_core::{IntervalVec, Polynotope, Weighting};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header of a reach trace for `n` states.
pub fn reach_header(n: usize) -> String {
    let mut cols = vec!["k".to_string()];
    for i in 1..=n {
        cols.push(format!("lo{i}"));
        cols.push(format!("hi{i}"));
    }
    cols.push("monomial_count".into());
    cols.push("max_degree".into());
    cols.join(",")
}

/// One reach row: `k`, per-state bounds, monomial count and degree.
pub fn reach_row(k: usize, hull: &IntervalVec, x: &Polynotope) -> String {
    let mut row = k.to_string();
    for (lo, hi) in hull.lo().iter().zip(hull.hi()) {
        let _ = write!(row, ",{},{}", float(*lo), float(*hi));
    }
    let _ = write!(row, ",{},{}", x.monomial_count(), x.max_degree());
    row
}

/// CSV of hulls along a trace; one header line and one line per state.
pub fn reach_csv(hulls: &[IntervalVec], states: &[Polynotope], dim: usize) -> String {
    let mut out = reach_header(dim);
    out.push('\n');
    for (k, (h, x)) in hulls.iter().zip(states).enumerate() {
        out.push_str(&reach_row(k, h, x));
        out.push('\n');
    }
    out
}

pub fn filter_header(n: usize) -> String {
    let mut cols = vec!["k".to_string()];
    cols.extend((1..=n).map(|i| format!("c{i}")));
    for i in 1..=n {
        cols.push(format!("lo{i}"));
        cols.push(format!("hi{i}"));
    }
    for c in ["trace_cov", "monomial_count", "max_degree"] {
        cols.push(c.into());
    }
    cols.extend((1..=n).map(|i| format!("true{i}")));
    cols.push("y".into());
    cols.join(",")
}

/// One filter row. `y` is empty on the last row, which has no measurement.
pub fn filter_row(k: usize, x: &Polynotope, truth: &[f64], y: Option<f64>) -> String {
    let hull = x.box_hull();
    let mut row = k.to_string();
    for c in x.center().iter() {
        let _ = write!(row, ",{}", float(*c));
    }
    for (lo, hi) in hull.lo().iter().zip(hull.hi()) {
        let _ = write!(row, ",{},{}", float(*lo), float(*hi));
    }
    let trace = x
        .covariation(&Weighting::Identity)
        .map(|c| c.trace())
        .unwrap_or(f64::NAN);
    let _ = write!(row, ",{},{},{}", float(trace), x.monomial_count(), x.max_degree());
    for t in truth {
        let _ = write!(row, ",{}", float(*t));
    }
    row.push(',');
    if let Some(y) = y {
        row.push_str(&float(y));
    }
    row
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Human-readable `c + Σ g·m` rendering of a one-row polynotope.
pub fn render_scalar(p: &Polynotope) -> String {
    let mut s = format!("{}", p.center()[0]);
    for (j, m) in p.monomials().iter().enumerate() {
        let g = p.generators()[(0, j)];
        let sign = if g < 0.0 { '-' } else { '+' };
        let _ = write!(s, " {sign} {}*{m:?}", g.abs());
    }
    s
}
