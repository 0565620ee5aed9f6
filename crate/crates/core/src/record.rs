//! Run traces, aggregates and their CSV form.
//!
//! Per-run CSV: `k,gap,z_energy,restart`. Aggregate CSV:
//! `k,median,q25,q75,mean,var`. Floats are written in shortest round-trip
//! form, so parsing a written file gives back the same bits.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 4] = ["k", "gap", "z_energy", "restart"];
pub const AGGREGATE_HEADER: [&str; 6] = ["k", "median", "q25", "q75", "mean", "var"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    /// `f(y_k) - f*`
    pub gap: f64,
    pub z_energy: f64,
    pub restart: bool,
}

/// Everything about a run except the trace; written as a JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub f_star: f64,
    pub queries: u64,
    /// Iterations at which a restart fired.
    pub restarts: Vec<usize>,
    /// Monte-Carlo mean of `||eta||` over the queries.
    pub noise_mean_norm: f64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<TraceRow>,
    pub meta: RunMetadata,
}

impl RunRecord {
    pub fn final_gap(&self) -> Option<f64> {
        self.rows.last().map(|r| r.gap)
    }

    pub fn gap_at(&self, k: usize) -> Option<f64> {
        self.rows
            .binary_search_by_key(&k, |r| r.k)
            .ok()
            .map(|i| self.rows[i].gap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub k: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub mean: f64,
    pub var: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateRecord {
    pub rows: Vec<AggregateRow>,
}

/// Quantile of sorted data by linear interpolation between order statistics.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Summaries over runs at each recorded iteration. Values are sorted before
/// any arithmetic, so the result does not depend on run order.
pub fn aggregate(runs: &[RunRecord]) -> Result<AggregateRecord> {
    let Some(first) = runs.first() else {
        return Ok(AggregateRecord::default());
    };
    for (i, r) in runs.iter().enumerate() {
        if r.rows.len() != first.rows.len() || r.rows.iter().zip(&first.rows).any(|(a, b)| a.k != b.k) {
            return Err(Error::InvalidState(format!(
                "run {i} is recorded on a different iteration grid"
            )));
        }
    }
    let n = runs.len() as f64;
    let mut values = vec![0.0; runs.len()];
    let rows = (0..first.rows.len())
        .map(|j| {
            for (v, r) in values.iter_mut().zip(runs) {
                *v = r.rows[j].gap;
            }
            values.sort_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / n;
            let var = if runs.len() > 1 {
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            AggregateRow {
                k: first.rows[j].k,
                median: quantile_sorted(&values, 0.5),
                q25: quantile_sorted(&values, 0.25),
                q75: quantile_sorted(&values, 0.75),
                mean,
                var,
            }
        })
        .collect();
    Ok(AggregateRecord { rows })
}

/// Shortest round-trip decimal; scientific notation for very small or
/// large magnitudes.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Iterations kept when thinning `total` rows down to about `points`
/// log-spaced ones; always includes 1 and `total`.
pub fn thin_indices(total: usize, points: usize) -> Vec<usize> {
    if total == 0 {
        return Vec::new();
    }
    if points >= total {
        return (1..=total).collect();
    }
    let mut keep: Vec<usize> = (0..points.max(2))
        .map(|i| {
            let t = i as f64 / (points.max(2) - 1) as f64;
            ((total as f64).powf(t).round() as usize).clamp(1, total)
        })
        .collect();
    keep.dedup();
    keep
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

pub fn write_trace_csv(path: impl AsRef<Path>, rows: &[TraceRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(TRACE_HEADER).map_err(|e| Error::csv(path, e))?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            format_f64(r.gap),
            format_f64(r.z_energy),
            (r.restart as u8).to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_aggregate_csv(path: impl AsRef<Path>, record: &AggregateRecord) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(AGGREGATE_HEADER).map_err(|e| Error::csv(path, e))?;
    for r in &record.rows {
        w.write_record([
            r.k.to_string(),
            format_f64(r.median),
            format_f64(r.q25),
            format_f64(r.q75),
            format_f64(r.mean),
            format_f64(r.var),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_metadata(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidState(e.to_string()))?;
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    f.write_all(b"\n").map_err(|e| Error::io(path, e))
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(usize, usize, Vec<f64>)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let found = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Data {
            row: 1,
            column: 0,
            message: format!("expected header {}", header.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |column: usize, field: &str| Error::Data {
            row: line,
            column,
            message: format!("cannot parse '{field}'"),
        };
        if rec.len() != header.len() {
            return Err(Error::Data {
                row: line,
                column: rec.len(),
                message: format!("expected {} fields", header.len()),
            });
        }
        let k: usize = rec[0].parse().map_err(|_| bad(0, &rec[0]))?;
        let vals = (1..rec.len())
            .map(|j| rec[j].parse::<f64>().map_err(|_| bad(j, &rec[j])))
            .collect::<Result<Vec<_>>>()?;
        out.push((line, k, vals));
    }
    Ok(out)
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let path = path.as_ref();
    read_rows(path, &TRACE_HEADER)?
        .into_iter()
        .map(|(line, k, v)| {
            let restart = match v[2] {
                0.0 => false,
                1.0 => true,
                _ => {
                    return Err(Error::Data {
                        row: line,
                        column: 3,
                        message: "restart flag must be 0 or 1".into(),
                    })
                }
            };
            Ok(TraceRow {
                k,
                gap: v[0],
                z_energy: v[1],
                restart,
            })
        })
        .collect()
}

pub fn read_aggregate_csv(path: impl AsRef<Path>) -> Result<AggregateRecord> {
    let path = path.as_ref();
    let rows = read_rows(path, &AGGREGATE_HEADER)?
        .into_iter()
        .map(|(_, k, v)| AggregateRow {
            k,
            median: v[0],
            q25: v[1],
            q75: v[2],
            mean: v[3],
            var: v[4],
        })
        .collect();
    Ok(AggregateRecord { rows })
}
