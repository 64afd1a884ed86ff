//! CSV and JSON artifacts written by the command-line front end.
//!
//! | file              | columns |
//! |-------------------|---------|
//! | `trace.csv`       | iteration, objective, res1, res2, res3, res4, min_rate, mean_rate |
//! | `beampattern.csv` | subcarrier_index, f_k_Hz, angle_deg, power_linear, power_dB_normalized |
//! | `rates.csv`       | subcarrier_index, user_index, rate, chi, satisfied |
//! | `sweep.csv`       | chi, final_objective, min_rate, termination |
//! | `baseline.csv`    | method, objective, min_rate, mean_rate |
//!
//! `summary.json` holds the termination reason, final objective and rates,
//! the seed and the full configuration. No file carries timing data, so
//! identical invocations produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::cadmm::{rate_summary, RunOutput, RunTrace, Termination};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::metrics::BeampatternGrid;

pub fn write_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "objective", "res1", "res2", "res3", "res4", "min_rate", "mean_rate"])?;
    for r in &trace.records {
        let [a, b, c, d] = r.residuals;
        w.serialize((r.iteration, r.objective, a, b, c, d, r.min_rate, r.mean_rate))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_beampattern(path: &Path, grid: &BeampatternGrid) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["subcarrier_index", "f_k_Hz", "angle_deg", "power_linear", "power_dB_normalized"])?;
    let db = grid.normalized_db();
    for (k, (row, row_db)) in grid.values.iter().zip(&db).enumerate() {
        for ((angle, p), p_db) in grid.angles.iter().zip(row).zip(row_db) {
            w.serialize((k, grid.frequencies[k], angle, p, p_db))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_rates(path: &Path, rates: &[Vec<f64>], chi: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["subcarrier_index", "user_index", "rate", "chi", "satisfied"])?;
    for (k, (rk, ck)) in rates.iter().zip(chi).enumerate() {
        for (u, (&r, &c)) in rk.iter().zip(ck).enumerate() {
            w.serialize((k, u, r, c, r >= c))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub termination: Termination,
    pub iterations: usize,
    pub metric: &'static str,
    pub final_objective: f64,
    pub final_residuals: Option<[f64; 4]>,
    pub min_rate: f64,
    pub mean_rate: f64,
    pub rates: &'a [Vec<f64>],
    pub power_error: f64,
    pub modulus_error: f64,
    pub seed: u64,
    pub config: &'a ScenarioConfig,
}

impl<'a> Summary<'a> {
    pub fn new(cfg: &'a ScenarioConfig, out: &'a RunOutput) -> Result<Self> {
        let power = cfg.power()?;
        let power_error =
            (0..cfg.K).map(|k| (out.hbf.effective(k).norm_squared() - power[k]).abs() / power[k]).fold(0.0, f64::max);
        let (min_rate, mean_rate) = rate_summary(&out.rates);
        Ok(Self {
            termination: out.trace.termination,
            iterations: out.trace.records.len(),
            metric: cfg.task.metric_name(),
            final_objective: out.trace.final_objective,
            final_residuals: out.trace.records.last().map(|r| r.residuals),
            min_rate,
            mean_rate,
            rates: &out.rates,
            power_error,
            modulus_error: out.hbf.modulus_error(),
            seed: cfg.seed,
            config: cfg,
        })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

/// Writes the four per-run artifacts into `dir`.
pub fn write_run(dir: &Path, cfg: &ScenarioConfig, out: &RunOutput, grid: &BeampatternGrid) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_trace(&dir.join("trace.csv"), &out.trace)?;
    write_beampattern(&dir.join("beampattern.csv"), grid)?;
    write_rates(&dir.join("rates.csv"), &out.rates, &cfg.rate_thresholds()?)?;
    write_json(&dir.join("summary.json"), &Summary::new(cfg, out)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub chi: f64,
    pub final_objective: f64,
    pub min_rate: f64,
    /// `converged`, `max_iter`, or the error that stopped the run.
    pub termination: String,
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRow {
    pub method: &'static str,
    pub objective: f64,
    pub min_rate: f64,
    pub mean_rate: f64,
}

pub fn write_baseline(path: &Path, rows: &[BaselineRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
