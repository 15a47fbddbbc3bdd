//! CSV and JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::scaled_time;
use crate::trace::RegretTrace;

use super::experiment::{ReplicationResult, RunSummary};

/// Columns of every per-run trace file.
pub const TRACE_HEADER: [&str; 10] = [
    "t",
    "iter",
    "x",
    "f_x",
    "regret",
    "cum_regret",
    "delta",
    "beta",
    "region_radius",
    "n_new",
];

/// Coordinates joined by `;`, each with 17 significant digits.
pub fn format_point(x: &[f64]) -> String {
    x.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(";")
}

pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(';')
        .map(|v| v.trim().parse::<f64>().map_err(|e| Error::invalid(format!("bad coordinate `{v}`: {e}"))))
        .collect()
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trace_csv(trace: &RegretTrace, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRACE_HEADER)?;
    for s in &trace.samples {
        w.write_record([
            s.t.to_string(),
            s.iteration.to_string(),
            format_point(&s.point),
            s.value.to_string(),
            s.regret.to_string(),
            s.cumulative_regret.to_string(),
            s.delta.to_string(),
            s.beta.to_string(),
            s.region_radius.to_string(),
            s.n_new.to_string(),
        ])?;
    }
    finish(w, path)
}

/// One row of a trace file read back.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub iteration: usize,
    pub point: Vec<f64>,
    pub value: f64,
    pub regret: f64,
    pub cumulative_regret: f64,
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(f);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != TRACE_HEADER {
        return Err(Error::invalid(format!(
            "{}: expected columns {:?}, found {:?}",
            path.display(),
            TRACE_HEADER,
            header
        )));
    }
    let num = |s: &str, col: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|e| Error::invalid(format!("column {col}: bad number `{s}`: {e}")))
    };
    let int = |s: &str, col: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|e| Error::invalid(format!("column {col}: bad integer `{s}`: {e}")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(TraceRow {
            t: int(&rec[0], "t")?,
            iteration: int(&rec[1], "iter")?,
            point: parse_point(&rec[2])?,
            value: num(&rec[3], "f_x")?,
            regret: num(&rec[4], "regret")?,
            cumulative_regret: num(&rec[5], "cum_regret")?,
        });
    }
    Ok(rows)
}

pub const ITERATION_HEADER: [&str; 12] = [
    "iter",
    "delta",
    "depth",
    "n_total",
    "n_new",
    "region_radius",
    "sigma_max",
    "beta",
    "lcb_sup",
    "relevant_count",
    "next_radius",
    "argmax_retained",
];

pub fn write_iterations_csv(trace: &RegretTrace, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(ITERATION_HEADER)?;
    for it in &trace.iterations {
        w.write_record([
            it.iteration.to_string(),
            it.delta.to_string(),
            it.depth.to_string(),
            it.n_total.to_string(),
            it.n_new.to_string(),
            it.region_radius.to_string(),
            it.sigma_max.to_string(),
            it.beta.to_string(),
            it.lcb_sup.to_string(),
            it.relevant_count.to_string(),
            it.next_radius.to_string(),
            it.argmax_retained.to_string(),
        ])?;
    }
    finish(w, path)
}

pub const SUMMARY_HEADER: [&str; 13] = [
    "optimizer",
    "replication",
    "seed",
    "stop",
    "samples",
    "iterations",
    "final_regret",
    "best_regret",
    "cum_regret",
    "envelope_violated",
    "argmax_exited",
    "top_two_gap",
    "error",
];

fn opt_bool(b: Option<bool>) -> String {
    b.map_or_else(String::new, |b| b.to_string())
}

fn opt_f64(x: Option<f64>) -> String {
    x.map_or_else(String::new, |x| x.to_string())
}

pub fn write_summary_csv(summaries: &[RunSummary], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        w.write_record([
            s.optimizer.clone(),
            s.replication.to_string(),
            s.seed.to_string(),
            s.stop.clone(),
            s.samples.to_string(),
            s.iterations.len().to_string(),
            opt_f64(s.final_regret),
            opt_f64(s.best_regret),
            s.cumulative_regret.to_string(),
            opt_bool(s.envelope_violated),
            s.argmax_exited.to_string(),
            s.top_two_gap.to_string(),
            s.error.clone().unwrap_or_default(),
        ])?;
    }
    finish(w, path)
}

pub const AGGREGATE_HEADER: [&str; 9] = [
    "optimizer",
    "replications",
    "median_final_regret",
    "q25_final_regret",
    "q75_final_regret",
    "median_cum_regret",
    "median_samples",
    "envelope_violation_rate",
    "argmax_exit_rate",
];

pub fn write_aggregate_csv(rows: &[super::experiment::Aggregate], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(AGGREGATE_HEADER)?;
    for a in rows {
        w.write_record([
            a.optimizer.clone(),
            a.replications.to_string(),
            a.median_final_regret.to_string(),
            a.q25_final_regret.to_string(),
            a.q75_final_regret.to_string(),
            a.median_cumulative_regret.to_string(),
            a.median_samples.to_string(),
            opt_f64(a.envelope_violation_rate),
            a.argmax_exit_rate.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_json(value: &impl serde::Serialize, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// File names written by [`emit_plot_data`].
pub const PLOT_FILES: [&str; 4] = [
    "regret_vs_t.csv",
    "cumulative_vs_t.csv",
    "log_regret_vs_scaled_t.csv",
    "radius_vs_iteration.csv",
];

/// Writes the four plot-ready series for `results` into `dir`.
///
/// * `regret_vs_t.csv`: `optimizer, replication, t, regret`
/// * `cumulative_vs_t.csv`: `optimizer, replication, t, cum_regret`
/// * `log_regret_vs_scaled_t.csv`: `optimizer, replication, t, scaled_t, ln_regret`,
///   where `scaled_t = t / (ln t)^{d/4}`; steps with zero regret or `ln t ≤ d/4` are left out
/// * `radius_vs_iteration.csv`: `optimizer, replication, iter, delta, region_radius, next_radius, n_total, n_new, sigma_max`
pub fn emit_plot_data(results: &[ReplicationResult], d: usize, dir: &Path) -> Result<()> {
    let paths: Vec<_> = PLOT_FILES.iter().map(|f| dir.join(f)).collect();
    let mut regret = writer(&paths[0])?;
    let mut cumulative = writer(&paths[1])?;
    let mut log = writer(&paths[2])?;
    let mut radius = writer(&paths[3])?;
    regret.write_record(["optimizer", "replication", "t", "regret"])?;
    cumulative.write_record(["optimizer", "replication", "t", "cum_regret"])?;
    log.write_record(["optimizer", "replication", "t", "scaled_t", "ln_regret"])?;
    radius.write_record([
        "optimizer",
        "replication",
        "iter",
        "delta",
        "region_radius",
        "next_radius",
        "n_total",
        "n_new",
        "sigma_max",
    ])?;
    for r in results {
        let key = [r.summary.optimizer.clone(), r.summary.replication.to_string()];
        for s in &r.trace.samples {
            let t = s.t.to_string();
            regret.write_record([&key[0], &key[1], &t, &s.regret.to_string()])?;
            cumulative.write_record([&key[0], &key[1], &t, &s.cumulative_regret.to_string()])?;
            if s.regret > 0.0 && !crate::metrics::in_burn_in(s.t, d) {
                log.write_record([
                    &key[0],
                    &key[1],
                    &t,
                    &scaled_time(s.t as f64, d).to_string(),
                    &s.regret.ln().to_string(),
                ])?;
            }
        }
        for it in &r.trace.iterations {
            radius.write_record([
                key[0].clone(),
                key[1].clone(),
                it.iteration.to_string(),
                it.delta.to_string(),
                it.region_radius.to_string(),
                it.next_radius.to_string(),
                it.n_total.to_string(),
                it.n_new.to_string(),
                it.sigma_max.to_string(),
            ])?;
        }
    }
    for (w, p) in [regret, cumulative, log, radius].into_iter().zip(&paths) {
        finish(w, p)?;
    }
    Ok(())
}

/// Joins paired runs into one file keyed by `(optimizer, seed, t)`.
pub fn emit_comparison(results: &[ReplicationResult], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["optimizer", "seed", "t", "regret", "cum_regret"])?;
    for r in results {
        for s in &r.trace.samples {
            w.write_record([
                r.summary.optimizer.clone(),
                r.summary.seed.to_string(),
                s.t.to_string(),
                s.regret.to_string(),
                s.cumulative_regret.to_string(),
            ])?;
        }
    }
    finish(w, path)
}
