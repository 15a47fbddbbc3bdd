//! Seeded batch execution.

use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{lipschitz_run, plain_ucb_run, UcbBaselineConfig};
use crate::bnb::{self, BnbConfig};
use crate::error::Result;
use crate::gp::GpPosterior;
use crate::kernels::KernelSpec;
use crate::lattice::DyadicLattice;
use crate::metrics::{check_envelope, median};
use crate::sampler::{derive_seeds, sample_gp_prior, synthetic_peak, TabulatedObjective, RNG_ALGORITHM};
use crate::trace::{IterationRecord, RegretTrace, StopReason};

use super::config::{ExperimentConfig, ObjectiveConfig, OptimizerConfig};
use super::output;

/// Per-run figures written to `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub optimizer: String,
    pub replication: usize,
    pub seed: u64,
    pub stop: String,
    pub samples: usize,
    /// Regret of the last sample.
    pub final_regret: Option<f64>,
    /// Smallest regret over the run.
    pub best_regret: Option<f64>,
    pub cumulative_regret: f64,
    /// Whether the confidence envelope failed anywhere; only for GP draws.
    pub envelope_violated: Option<bool>,
    pub argmax_exited: bool,
    /// Gap between the two largest objective values; NaN if the objective failed.
    pub top_two_gap: f64,
    pub iterations: Vec<IterationRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ReplicationResult {
    pub summary: RunSummary,
    pub trace: RegretTrace,
}

/// Cross-replication statistics per optimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub optimizer: String,
    pub replications: usize,
    pub median_final_regret: f64,
    pub q25_final_regret: f64,
    pub q75_final_regret: f64,
    pub median_cumulative_regret: f64,
    pub median_samples: f64,
    pub envelope_violation_rate: Option<f64>,
    pub argmax_exit_rate: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub results: Vec<ReplicationResult>,
    pub aggregates: Vec<Aggregate>,
    pub seeds: Vec<u64>,
}

impl ExperimentOutcome {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.summary.error.is_some()).count()
    }

    pub fn summaries(&self) -> Vec<RunSummary> {
        self.results.iter().map(|r| r.summary.clone()).collect()
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    rng: &'a str,
    master_seed: u64,
    seeds: &'a [u64],
    /// Per replication; near-ties make the maximizer ill-defined.
    top_two_gaps: Vec<f64>,
    optimizers: Vec<&'a str>,
    failures: usize,
    config: &'a ExperimentConfig,
}

/// The objective of one replication.
pub fn build_objective(
    cfg: &ExperimentConfig,
    lattice: &DyadicLattice,
    kernel: &KernelSpec,
    seed: u64,
) -> Result<TabulatedObjective> {
    match &cfg.objective {
        ObjectiveConfig::GpDraw {} => sample_gp_prior(kernel, lattice, seed),
        ObjectiveConfig::SyntheticPeak {
            peak,
            peak_value,
            c1,
            c2,
            rho0,
        } => {
            let peak = match peak {
                Some(p) => p.clone(),
                None => {
                    let mut rng = ChaCha20Rng::seed_from_u64(seed);
                    let dom = lattice.domain();
                    dom.lower()
                        .iter()
                        .zip(dom.upper())
                        .map(|(l, u)| rng.random_range(l + rho0..u - rho0))
                        .collect()
                }
            };
            synthetic_peak(lattice, &peak, *peak_value, *c1, *c2, *rho0)
        }
    }
}

/// Runs one optimizer on one objective.
pub fn run_optimizer(
    optimizer: &OptimizerConfig,
    cfg: &ExperimentConfig,
    kernel: &KernelSpec,
    objective: &TabulatedObjective,
) -> Result<RegretTrace> {
    let lattice = objective.lattice().clone();
    let jitter = cfg.jitter.unwrap_or_else(|| GpPosterior::default_jitter(kernel));
    match optimizer {
        OptimizerConfig::Bnb {} => {
            let mut c = BnbConfig::new(lattice, kernel.clone(), cfg.alpha, cfg.budget)?;
            c.jitter = jitter;
            bnb::run(&c, objective)
        }
        OptimizerConfig::PlainUcb { mode } => {
            let mut c = UcbBaselineConfig::new(lattice, kernel.clone(), cfg.alpha, cfg.budget, *mode)?;
            c.jitter = jitter;
            plain_ucb_run(&c, objective)
        }
        OptimizerConfig::Lipschitz { lipschitz } => lipschitz_run(objective, *lipschitz, cfg.budget),
    }
}

fn summarize(
    optimizer: &OptimizerConfig,
    replication: usize,
    seed: u64,
    outcome: Result<(RegretTrace, Option<bool>)>,
    objective: Option<&TabulatedObjective>,
) -> ReplicationResult {
    let max_value = objective.map_or(f64::NAN, |o| o.max_value());
    let (trace, envelope_violated, error) = match outcome {
        Ok((t, env)) => {
            let err = match &t.stop {
                Some(StopReason::Failed(m)) => Some(m.clone()),
                _ => None,
            };
            (t, env, err)
        }
        Err(e) => {
            let mut t = RegretTrace::new(max_value);
            t.stop = Some(StopReason::Failed(e.to_string()));
            (t, None, Some(e.to_string()))
        }
    };
    let summary = RunSummary {
        optimizer: optimizer.label().to_string(),
        replication,
        seed,
        stop: trace.stop.as_ref().map_or("none", |s| s.label()).to_string(),
        samples: trace.len(),
        final_regret: trace.final_regret(),
        best_regret: trace.best_regret(),
        cumulative_regret: trace.total_cumulative_regret(),
        envelope_violated,
        argmax_exited: trace.argmax_ever_exited(),
        top_two_gap: objective.map_or(f64::NAN, |o| o.top_two_gap()),
        iterations: trace.iterations.clone(),
        error,
    };
    ReplicationResult { summary, trace }
}

/// Runs every replication for each optimizer, in memory. Results are
/// ordered by replication, then by optimizer.
pub fn run_replications(cfg: &ExperimentConfig, optimizers: &[OptimizerConfig]) -> Result<(Vec<u64>, Vec<ReplicationResult>)> {
    cfg.validate()?;
    let lattice = cfg.lattice()?;
    let kernel = cfg.kernel_spec()?;
    let seeds = derive_seeds(cfg.master_seed, cfg.replications);
    let jitter = cfg.jitter.unwrap_or_else(|| GpPosterior::default_jitter(&kernel));
    let results: Vec<Vec<ReplicationResult>> = seeds
        .par_iter()
        .enumerate()
        .map(|(rep, &seed)| {
            let objective = build_objective(cfg, &lattice, &kernel, seed);
            optimizers
                .iter()
                .map(|opt| {
                    let outcome = objective.as_ref().map_err(clone_err).and_then(|obj| {
                        let trace = run_optimizer(opt, cfg, &kernel, obj)?;
                        let env = if cfg.check_envelope && matches!(cfg.objective, ObjectiveConfig::GpDraw {}) {
                            Some(check_envelope(&trace, obj, &kernel, cfg.alpha, jitter)?.violated)
                        } else {
                            None
                        };
                        Ok((trace, env))
                    });
                    summarize(opt, rep, seed, outcome, objective.as_ref().ok())
                })
                .collect()
        })
        .collect();
    Ok((seeds, results.into_iter().flatten().collect()))
}

fn clone_err(e: &crate::error::Error) -> crate::error::Error {
    crate::error::Error::invalid(format!("objective construction failed: {e}"))
}

fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Per-optimizer medians and quantiles, in first-appearance order.
pub fn aggregate(summaries: &[RunSummary]) -> Vec<Aggregate> {
    let mut names: Vec<&str> = Vec::new();
    for s in summaries {
        if !names.contains(&s.optimizer.as_str()) {
            names.push(&s.optimizer);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let rows: Vec<&RunSummary> = summaries.iter().filter(|s| s.optimizer == name).collect();
            let finals: Vec<f64> = rows.iter().map(|s| s.final_regret.unwrap_or(f64::NAN)).collect();
            let cum: Vec<f64> = rows.iter().map(|s| s.cumulative_regret).collect();
            let samples: Vec<f64> = rows.iter().map(|s| s.samples as f64).collect();
            let env: Vec<bool> = rows.iter().filter_map(|s| s.envelope_violated).collect();
            let n = rows.len() as f64;
            Aggregate {
                optimizer: name.to_string(),
                replications: rows.len(),
                median_final_regret: median(&finals),
                q25_final_regret: quantile(&finals, 0.25),
                q75_final_regret: quantile(&finals, 0.75),
                median_cumulative_regret: median(&cum),
                median_samples: median(&samples),
                envelope_violation_rate: (!env.is_empty())
                    .then(|| env.iter().filter(|v| **v).count() as f64 / env.len() as f64),
                argmax_exit_rate: rows.iter().filter(|s| s.argmax_exited).count() as f64 / n,
            }
        })
        .collect()
}

fn write_artifacts(cfg: &ExperimentConfig, command: &str, optimizers: &[OptimizerConfig], outcome: &ExperimentOutcome) -> Result<()> {
    let dir = &cfg.output;
    for r in &outcome.results {
        let stem = format!("{}_{:04}", r.summary.optimizer, r.summary.replication);
        output::write_trace_csv(&r.trace, &dir.join("traces").join(format!("{stem}.csv")))?;
        if !r.trace.iterations.is_empty() {
            output::write_iterations_csv(&r.trace, &dir.join("iterations").join(format!("{stem}.csv")))?;
        }
    }
    let summaries = outcome.summaries();
    output::write_summary_csv(&summaries, &dir.join("summary.csv"))?;
    output::write_aggregate_csv(&outcome.aggregates, &dir.join("aggregate.csv"))?;
    output::emit_plot_data(&outcome.results, cfg.dim(), &dir.join("plots"))?;
    if command == "compare" {
        output::emit_comparison(&outcome.results, &dir.join("comparison.csv"))?;
    }
    let meta = Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        rng: RNG_ALGORITHM,
        master_seed: cfg.master_seed,
        seeds: &outcome.seeds,
        top_two_gaps: (0..outcome.seeds.len())
            .map(|rep| {
                outcome
                    .results
                    .iter()
                    .find(|r| r.summary.replication == rep)
                    .map_or(f64::NAN, |r| r.summary.top_two_gap)
            })
            .collect(),
        optimizers: optimizers.iter().map(|o| o.label()).collect(),
        failures: outcome.failures(),
        config: cfg,
    };
    output::write_json(&meta, &dir.join("metadata.json"))
}

fn execute(cfg: &ExperimentConfig, command: &str, optimizers: &[OptimizerConfig]) -> Result<ExperimentOutcome> {
    let (seeds, results) = run_replications(cfg, optimizers)?;
    let aggregates = aggregate(&results.iter().map(|r| r.summary.clone()).collect::<Vec<_>>());
    let outcome = ExperimentOutcome {
        results,
        aggregates,
        seeds,
    };
    write_artifacts(cfg, command, optimizers, &outcome)?;
    Ok(outcome)
}

/// Runs the configured optimizer and writes every artifact under `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    execute(cfg, "run", &[cfg.optimizer])
}

/// Runs the configured optimizer and every baseline on the same objectives.
pub fn compare(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let mut optimizers = vec![cfg.optimizer];
    for b in &cfg.baselines {
        if !optimizers.contains(b) {
            optimizers.push(*b);
        }
    }
    execute(cfg, "compare", &optimizers)
}

/// Loads a config file and runs it with output redirected to `out`.
pub fn run_config_file(path: &Path, out: Option<&Path>) -> Result<ExperimentOutcome> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(o) = out {
        cfg.output = o.to_path_buf();
    }
    run_experiment(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.25), 1.25);
        assert!(quantile(&[], 0.5).is_nan());
    }
}
