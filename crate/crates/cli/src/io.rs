//! File formats: pattern CSV, chain CSV, PCF/GOF CSV, and atomic writes.
//!
//! Floats are serialized with 17 significant digits so a write-read round
//! trip reproduces every f64 exactly.

use crate::error::{CliError, Result};
use argibbs::{ArParams, Point, PointPattern, Window};
use serde::Deserialize;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

/// Full-precision decimal form of an f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Write via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
    let tag = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let tmp = dir.join(format!(
        ".{}.tmp-{}-{tag}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::data(format!("cannot rename to {}: {e}", path.display())))?;
    Ok(())
}

pub fn write_pattern_csv(path: &Path, pattern: &PointPattern) -> Result<()> {
    let mut out = String::from("x,y\n");
    for p in pattern.points() {
        out.push_str(&fmt_f64(p.x));
        out.push(',');
        out.push_str(&fmt_f64(p.y));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

#[derive(Deserialize)]
struct PointRow {
    x: f64,
    y: f64,
}

/// Read a pattern CSV (`x,y` header) and validate every point against the
/// window; offenders are listed in the error.
pub fn read_pattern_csv(path: &Path, window: &Window) -> Result<PointPattern> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut points = Vec::new();
    let mut offenders = Vec::new();
    for (i, row) in reader.deserialize::<PointRow>().enumerate() {
        let row =
            row.map_err(|e| CliError::data(format!("{} row {}: {e}", path.display(), i + 2)))?;
        let p = Point::new(row.x, row.y);
        if !p.is_finite() {
            return Err(CliError::data(format!(
                "{} row {}: non-finite coordinates",
                path.display(),
                i + 2
            )));
        }
        if !window.contains(p) {
            offenders.push((i + 2, p));
        }
        points.push(p);
    }
    if !offenders.is_empty() {
        let listed: Vec<String> = offenders
            .iter()
            .take(5)
            .map(|(line, p)| format!("line {line}: ({}, {})", p.x, p.y))
            .collect();
        return Err(CliError::data(format!(
            "{}: {} point(s) outside the declared window ({}{})",
            path.display(),
            offenders.len(),
            listed.join("; "),
            if offenders.len() > 5 { "; ..." } else { "" }
        )));
    }
    PointPattern::new(*window, points).map_err(|e| CliError::data(e.to_string()))
}

pub const CHAIN_HEADER: &str = "lambda,theta1,theta2,theta3,k,accepted";

pub fn write_chain_csv(path: &Path, samples: &[ArParams], accepted: &[bool]) -> Result<()> {
    let mut out = String::from(CHAIN_HEADER);
    out.push('\n');
    for (s, acc) in samples.iter().zip(accepted) {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(s.lambda),
            fmt_f64(s.theta1),
            fmt_f64(s.theta2),
            fmt_f64(s.theta3),
            fmt_f64(s.k),
            if *acc { 1 } else { 0 }
        ));
    }
    write_atomic(path, out.as_bytes())
}

#[derive(Deserialize)]
struct ChainRow {
    lambda: f64,
    theta1: f64,
    theta2: f64,
    theta3: f64,
    k: f64,
    #[serde(default)]
    #[allow(dead_code)]
    accepted: u8,
}

pub fn read_chain_csv(path: &Path) -> Result<Vec<ArParams>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<ChainRow>().enumerate() {
        let row =
            row.map_err(|e| CliError::data(format!("{} row {}: {e}", path.display(), i + 2)))?;
        out.push(ArParams {
            lambda: row.lambda,
            theta1: row.theta1,
            theta2: row.theta2,
            theta3: row.theta3,
            k: row.k,
        });
    }
    Ok(out)
}

pub fn write_pcf_csv(path: &Path, r: &[f64], g_hat: &[f64], lo: &[f64], hi: &[f64]) -> Result<()> {
    let mut out = String::from("r,g_hat,lo95,hi95\n");
    for i in 0..r.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(r[i]),
            fmt_f64(g_hat[i]),
            fmt_f64(lo[i]),
            fmt_f64(hi[i])
        ));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_gof_csv(
    path: &Path,
    r: &[f64],
    g_hat: &[f64],
    lo: &[f64],
    hi: &[f64],
    g_emp: &[f64],
) -> Result<()> {
    let mut out = String::from("r,g_hat,lo95,hi95,g_emp\n");
    for i in 0..r.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r[i]),
            fmt_f64(g_hat[i]),
            fmt_f64(lo[i]),
            fmt_f64(hi[i]),
            fmt_f64(g_emp[i])
        ));
    }
    write_atomic(path, out.as_bytes())
}
