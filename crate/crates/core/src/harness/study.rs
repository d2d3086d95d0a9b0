//! Convergence, benchmark and reproducibility studies, with CSV output.

use std::io::Write;
use std::path::Path;

use crate::error::{HydroError, Result};
use crate::mesh::{SkinnyState, NVAR, RHO};

use super::config::{Problem, RunConfig};
use super::norms::{error_norms, order_estimate};
use super::run::{run_config, RunSummary};

/// One CSV row as ordered `(column, value)` pairs.
pub type Row = Vec<(&'static str, String)>;

/// Columns shared by every study: config echo, errors, throughput, stage
/// times, predictor fraction and ledger totals.
pub fn summary_row(run_id: usize, config: &RunConfig, s: &RunSummary, order: Option<f64>) -> Row {
    let mut row: Row = vec![("run_id", run_id.to_string())];
    row.extend(config.echo());
    row.push(("steps_taken", s.steps.to_string()));
    row.push(("t", s.t.to_string()));
    const L1: [&str; NVAR] = ["l1_rho", "l1_mx", "l1_my", "l1_mz", "l1_energy"];
    const LINF: [&str; NVAR] = ["linf_rho", "linf_mx", "linf_my", "linf_mz", "linf_energy"];
    for v in 0..NVAR {
        row.push((L1[v], s.error.map(|e| format!("{:e}", e.l1[v])).unwrap_or_default()));
    }
    for v in 0..NVAR {
        row.push((LINF[v], s.error.map(|e| format!("{:e}", e.linf[v])).unwrap_or_default()));
    }
    row.push(("order_estimate", order.map(|o| format!("{o:.4}")).unwrap_or_default()));
    row.push(("zones_per_sec", format!("{:.1}", s.zones_per_sec)));
    for (name, secs) in s.profile.seconds() {
        let col = match name {
            "reconstruct" => "sec_reconstruct",
            "predict" => "sec_predict",
            "flux" => "sec_flux",
            "rate" => "sec_rate",
            "update" => "sec_update",
            _ => "sec_transfer",
        };
        row.push((col, format!("{secs:.6}")));
    }
    row.push(("predictor_fraction", format!("{:.4}", s.profile.predictor_fraction())));
    row.push(("ledger_uploads", s.ledger.uploads.to_string()));
    row.push(("ledger_downloads", s.ledger.downloads.to_string()));
    row.push(("ledger_scalar_uploads", s.ledger.scalar_uploads.to_string()));
    row.push(("ledger_active_uploads", s.ledger.active_uploads.to_string()));
    row.push(("riemann_calls", s.faces.calls.to_string()));
    row.push(("degenerate_fans", s.faces.degenerate_fans.to_string()));
    row
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| *k))?;
    }
    for row in rows {
        w.write_record(row.iter().map(|(_, v)| v.as_str()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows_to(path: &Path, rows: &[Row]) -> Result<()> {
    write_rows(std::fs::File::create(path)?, rows)
}

#[derive(Debug, Clone)]
pub struct ConvergenceEntry {
    pub n: usize,
    pub summary: RunSummary,
    /// Density L1 order against the previous mesh.
    pub order: Option<f64>,
}

/// Runs the vortex on each mesh (cubed) to the same final time.
pub fn run_convergence_study(config: &RunConfig, meshes: &[usize]) -> Result<Vec<ConvergenceEntry>> {
    if config.problem != Problem::Vortex {
        return Err(HydroError::config("convergence studies need the vortex problem"));
    }
    if meshes.len() < 2 {
        return Err(HydroError::config("convergence studies need at least two meshes"));
    }
    let mut out: Vec<ConvergenceEntry> = Vec::new();
    for &n in meshes {
        let cfg = RunConfig {
            n: [n; 3],
            ..config.clone()
        };
        let (summary, _) = run_config(&cfg)?;
        let l1 = summary.error.expect("vortex has an exact solution").l1[RHO];
        let order = out.last().map(|prev| {
            order_estimate(prev.summary.error.unwrap().l1[RHO], l1, prev.n, n)
        });
        log::info!("n = {n}: density L1 = {l1:e}, order = {order:?}");
        out.push(ConvergenceEntry { n, summary, order });
    }
    Ok(out)
}

pub fn convergence_rows(config: &RunConfig, entries: &[ConvergenceEntry]) -> Vec<Row> {
    entries
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let cfg = RunConfig {
                n: [e.n; 3],
                ..config.clone()
            };
            summary_row(id, &cfg, &e.summary, e.order)
        })
        .collect()
}

pub fn run_benchmark(config: &RunConfig) -> Result<RunSummary> {
    Ok(run_config(config)?.0)
}

#[derive(Debug, Clone)]
pub struct ReproReport {
    /// Largest difference between two single-worker runs.
    pub serial_max_diff: f64,
    /// Density L1 difference between the single- and multi-worker runs.
    pub parallel_l1_diff: f64,
    pub parallel_max_diff: f64,
    /// Zone of the largest single/multi-worker difference.
    pub worst_zone: [isize; 3],
    pub workers: usize,
}

/// Largest pointwise difference and where it occurs.
fn compare(a: &SkinnyState, b: &SkinnyState) -> (f64, [isize; 3]) {
    let mut worst = (0.0f64, [0; 3]);
    for ((idx, x), (_, y)) in a.active().zip(b.active()) {
        for v in 0..NVAR {
            let d = (x[v] - y[v]).abs();
            if d > worst.0 || d.is_nan() {
                worst = (d, idx);
            }
        }
    }
    worst
}

/// Runs `config` twice on one worker and once on `workers` workers.
pub fn run_reproducibility_check(config: &RunConfig, workers: usize) -> Result<ReproReport> {
    let serial = RunConfig {
        workers: 1,
        ..config.clone()
    };
    let parallel = RunConfig {
        workers,
        ..config.clone()
    };
    let (_, a) = run_config(&serial)?;
    let (_, b) = run_config(&serial)?;
    let (_, c) = run_config(&parallel)?;
    let (serial_max_diff, _) = compare(&a, &b);
    let (parallel_max_diff, worst_zone) = compare(&a, &c);
    let parallel_l1_diff = error_norms(&a, &c)?.l1[RHO];
    let report = ReproReport {
        serial_max_diff,
        parallel_l1_diff,
        parallel_max_diff,
        worst_zone,
        workers,
    };
    if serial_max_diff != 0.0 {
        return Err(HydroError::Reproducibility(format!(
            "two single-worker runs differ by {serial_max_diff:e}"
        )));
    }
    if !(parallel_l1_diff < 1e-10) {
        return Err(HydroError::Reproducibility(format!(
            "1 vs {workers} workers: density L1 difference {parallel_l1_diff:e}, max {parallel_max_diff:e} at zone {worst_zone:?}"
        )));
    }
    Ok(report)
}
