use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gp_bnb::error::{Error, Result};
use gp_bnb::harness::bounds::{envelope_coverage, verify_variance_bound, CoverageConfig};
use gp_bnb::harness::experiment::{compare, run_experiment, ExperimentOutcome};
use gp_bnb::harness::output::read_trace_csv;
use gp_bnb::harness::ExperimentConfig;
use gp_bnb::kernels::{KernelFamily, KernelSpec, MaternOrder};
use gp_bnb::lattice::{BoxDomain, DyadicLattice};
use gp_bnb::metrics::{fit_rate_series, RateFit};
use gp_bnb::sampler::derive_seeds;

#[derive(Parser)]
#[command(name = "gp-bnb", version, about = "Branch and bound for GP bandits on dyadic lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured optimizer over all replications.
    Run {
        config: PathBuf,
        /// Override the output directory from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the optimizer and its baselines on the same seeds.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure sup σ on uniform covers against Q δ² / 4.
    VerifyVarianceBound {
        #[arg(long, value_enum, default_value_t = Family::Se)]
        kernel: Family,
        #[arg(long, default_value_t = 0.5)]
        lengthscale: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.1, 0.05])]
        deltas: Vec<f64>,
    },
    /// Empirical violation rate of the confidence envelope on GP draws.
    Coverage {
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        replications: usize,
        #[arg(long, default_value_t = 7)]
        depth: u32,
        #[arg(long, default_value_t = 0.2)]
        lengthscale: f64,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit r_t ≈ A exp(−τ t / (ln t)^{d/4}) to a trace file.
    FitRate {
        trace: PathBuf,
        /// Domain dimension; defaults to the number of coordinates in `x`.
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Se,
    Matern52,
    Matern72,
}

impl Family {
    fn kernel(self, lengthscale: f64, dim: usize) -> Result<KernelSpec> {
        let family = match self {
            Family::Se => KernelFamily::SquaredExponential,
            Family::Matern52 => KernelFamily::Matern(MaternOrder::FiveHalves),
            Family::Matern72 => KernelFamily::Matern(MaternOrder::SevenHalves),
        };
        KernelSpec::new(family, vec![lengthscale; dim], 1.0)
    }
}

fn report_outcome(outcome: &ExperimentOutcome, out: &std::path::Path) -> u8 {
    for a in &outcome.aggregates {
        println!(
            "{:<20} runs={:<4} median_final_regret={:.6e} median_cum_regret={:.6e} median_samples={}",
            a.optimizer, a.replications, a.median_final_regret, a.median_cumulative_regret, a.median_samples
        );
    }
    println!("artifacts written to {}", out.display());
    let failures = outcome.failures();
    if failures > 0 {
        eprintln!("{failures} run(s) failed; see summary.csv");
        2
    } else {
        0
    }
}

fn experiment(config: &std::path::Path, out: Option<PathBuf>, paired: bool) -> Result<u8> {
    let mut cfg = ExperimentConfig::from_path(config)?;
    if let Some(o) = out {
        cfg.output = o;
    }
    let outcome = if paired { compare(&cfg)? } else { run_experiment(&cfg)? };
    Ok(report_outcome(&outcome, &cfg.output))
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Run { config, out } => experiment(&config, out, false),
        Command::Compare { config, out } => experiment(&config, out, true),
        Command::VerifyVarianceBound {
            kernel,
            lengthscale,
            dim,
            deltas,
        } => {
            let k = kernel.kernel(lengthscale, dim).map_err(|e| Error::config("--lengthscale", e.to_string()))?;
            let rep = verify_variance_bound(&k, &BoxDomain::unit(dim), &deltas)?;
            println!("Q = {:.6}", rep.q);
            println!("{:>8} {:>8} {:>8} {:>14} {:>14} {:>10}  verdict", "delta", "samples", "probes", "measured", "bound", "ratio");
            for r in &rep.rows {
                let verdict = if r.coarse {
                    "coarse (not judged)"
                } else if r.within {
                    "within"
                } else {
                    "EXCEEDS"
                };
                println!(
                    "{:>8} {:>8} {:>8} {:>14.6e} {:>14.6e} {:>10.3e}  {verdict}",
                    r.delta, r.samples, r.probes, r.measured, r.bound, r.ratio
                );
            }
            for (i, q) in rep.decay_ratios.iter().enumerate() {
                println!("decay ratio {} -> {}: {q:.3}", rep.rows[i].delta, rep.rows[i + 1].delta);
            }
            Ok(0)
        }
        Command::Coverage {
            alpha,
            replications,
            depth,
            lengthscale,
            budget,
            seed,
        } => {
            let kernel = KernelSpec::squared_exponential(vec![lengthscale])
                .map_err(|e| Error::config("--lengthscale", e.to_string()))?;
            let lattice =
                DyadicLattice::new(BoxDomain::unit(1), depth).map_err(|e| Error::config("--depth", e.to_string()))?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::config("--alpha", format!("must lie in (0, 1), got {alpha}")));
            }
            let rep = envelope_coverage(&CoverageConfig {
                kernel,
                lattice,
                alpha,
                budget,
                seeds: derive_seeds(seed, replications),
            })?;
            println!(
                "violations {}/{} = {:.4} (limit {:.4}, interval [{:.4}, {:.4}])",
                rep.violations, rep.replications, rep.violation_rate, rep.rate_limit, rep.rate_interval.0, rep.rate_interval.1
            );
            println!("maximizer left the region in {}/{} runs = {:.4}", rep.exits, rep.replications, rep.exit_rate);
            println!("largest |f - mu| / (sqrt(beta) sigma) = {:.4}", rep.worst_ratio);
            Ok(0)
        }
        Command::FitRate { trace, dim } => {
            let rows = read_trace_csv(&trace).map_err(|e| Error::config(trace.display().to_string(), e.to_string()))?;
            let d = dim.or_else(|| rows.first().map(|r| r.point.len())).unwrap_or(1);
            let ts: Vec<usize> = rows.iter().map(|r| r.t).collect();
            let rs: Vec<f64> = rows.iter().map(|r| r.regret).collect();
            let fit = fit_rate_series(&ts, &rs, d).map_err(|e| Error::config(trace.display().to_string(), e.to_string()))?;
            match fit {
                RateFit::Fitted(e) => {
                    println!("A_hat = {:.6e}", e.a_hat);
                    println!("tau_hat = {:.6e}", e.tau_hat);
                    println!("r_squared = {:.6}", e.r_squared);
                    println!("points = {} (burn-in dropped {}, zero regrets floored {})", e.n_points, e.burn_in, e.floored);
                }
                RateFit::Undefined { burn_in, zeros } => {
                    println!("fit undefined: all {zeros} regrets after burn-in ({burn_in} dropped) are zero");
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
