//! Branch and bound over a dyadic lattice.
//!
//! Each round halves the resolution `δ`, samples every lattice point needed
//! to cover the current region at that resolution, and then shrinks the
//! region to a ball around the points whose upper confidence bound still
//! beats the best lower confidence bound:
//!
//! ```text
//! R̃ = { x ∈ R ∩ L : μ_T(x) + √β_T σ_T(x) > sup_R (μ_T − √β_T σ_T) }
//! R ← B((x₁* + x₂*)/2, ‖x₁* − x₂*‖)   for the farthest pair (x₁*, x₂*) of R̃
//! ```
//!
//! with `β_T = 2 ln(|L| T² / α)`. The supremum of the lower bound is taken
//! over the lattice points of `R` at the current resolution; membership in
//! `R̃` is tested on every point of the full lattice inside `R`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::gp::GpPosterior;
use crate::kernels::KernelSpec;
use crate::lattice::{enclosing_ball, farthest_pair, DyadicLattice, LatticeIndex, Region};
use crate::sampler::TabulatedObjective;
use crate::trace::{IterationRecord, RegretTrace, StopReason};

/// `β_T = 2 ln(|L| T² / α)`.
pub fn beta_schedule(t: usize, lattice_size: u64, alpha: f64) -> f64 {
    debug_assert!(t >= 1 && lattice_size >= 1 && alpha > 0.0 && alpha < 1.0);
    let t = t as f64;
    2.0 * (lattice_size as f64 * t * t / alpha).ln()
}

/// The same schedule written as `4 ln T + 2 ln(|L| / α)`.
pub fn beta_schedule_split(t: usize, lattice_size: u64, alpha: f64) -> f64 {
    4.0 * (t as f64).ln() + 2.0 * (lattice_size as f64 / alpha).ln()
}

/// `sup (μ − √β σ)` over the given `(mean, std)` pairs.
pub fn lcb_supremum(bounds: &[(f64, f64)], sqrt_beta: f64) -> f64 {
    bounds
        .iter()
        .map(|(m, s)| m - sqrt_beta * s)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Positions whose upper confidence bound strictly exceeds `lcb_sup`.
pub fn relevant_indices(bounds: &[(f64, f64)], sqrt_beta: f64, lcb_sup: f64) -> Vec<usize> {
    bounds
        .iter()
        .enumerate()
        .filter(|(_, (m, s))| m + sqrt_beta * s > lcb_sup)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone)]
pub struct BnbConfig {
    pub alpha: f64,
    pub lattice: DyadicLattice,
    pub kernel: KernelSpec,
    pub budget: usize,
    /// Initial diagonal jitter for the posterior.
    pub jitter: f64,
}

impl BnbConfig {
    pub fn new(lattice: DyadicLattice, kernel: KernelSpec, alpha: f64, budget: usize) -> Result<Self> {
        let jitter = GpPosterior::default_jitter(&kernel);
        let cfg = BnbConfig {
            alpha,
            lattice,
            kernel,
            budget,
            jitter,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.budget < 1 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        if self.kernel.dim() != self.lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.lattice.dim(),
                got: self.kernel.dim(),
            });
        }
        if !(self.jitter > 0.0) {
            return Err(Error::invalid(format!("jitter must be positive, got {}", self.jitter)));
        }
        Ok(())
    }

    /// `|L|`, fixed to the finest reachable grid.
    pub fn lattice_size(&self) -> u64 {
        self.lattice.size()
    }

    pub fn beta(&self, t: usize) -> f64 {
        beta_schedule(t, self.lattice_size(), self.alpha)
    }
}

/// Lattice indices of a region with their posterior `(mean, std)`.
type RegionBounds = (Vec<LatticeIndex>, Vec<(f64, f64)>);

/// Result of one densify or shrink step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Progress {
    Continue,
    Stopped,
}

/// Densify step bookkeeping carried into the following shrink.
#[derive(Debug, Clone, Copy)]
struct PendingRound {
    n_new: usize,
    region_radius: f64,
}

/// Loop state of a branch-and-bound run.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    config: BnbConfig,
    region: Region,
    delta: f64,
    depth: Option<u32>,
    posterior: GpPosterior,
    sampled: HashSet<LatticeIndex>,
    iteration: usize,
    trace: RegretTrace,
    stop: Option<StopReason>,
    argmax: Vec<f64>,
    pending: Option<PendingRound>,
}

impl OptimizerState {
    pub fn new(config: BnbConfig, objective: &TabulatedObjective) -> Result<Self> {
        config.validate()?;
        if objective.lattice() != &config.lattice {
            return Err(Error::invalid("objective support differs from the optimizer lattice"));
        }
        let domain = config.lattice.domain();
        Ok(OptimizerState {
            region: Region::whole(domain),
            delta: domain.diameter(),
            depth: None,
            posterior: GpPosterior::prior(config.kernel.clone(), config.jitter),
            sampled: HashSet::new(),
            iteration: 0,
            trace: RegretTrace::new(objective.max_value()),
            stop: None,
            argmax: objective.argmax_point(),
            pending: None,
            config,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn samples(&self) -> usize {
        self.posterior.len()
    }

    pub fn beta(&self) -> f64 {
        self.config.beta(self.samples().max(1))
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn posterior(&self) -> &GpPosterior {
        &self.posterior
    }

    pub fn trace(&self) -> &RegretTrace {
        &self.trace
    }

    pub fn stop_reason(&self) -> Option<&StopReason> {
        self.stop.as_ref()
    }

    pub fn into_trace(mut self) -> RegretTrace {
        self.trace.stop = self.stop.take();
        self.trace
    }

    fn halt(&mut self, reason: StopReason) -> Progress {
        self.stop = Some(reason);
        Progress::Stopped
    }

    /// Halves `δ` and samples every unsampled cover point of the region.
    pub fn densify(&mut self, objective: &TabulatedObjective) -> Progress {
        if self.stop.is_some() {
            return Progress::Stopped;
        }
        let lattice = &self.config.lattice;
        let delta = self.delta / 2.0;
        let depth = match lattice.depth_for_delta(delta) {
            Ok(d) => d,
            Err(Error::ResolutionExhausted { .. }) => return self.halt(StopReason::ResolutionExhausted),
            Err(e) => return self.halt(StopReason::Failed(e.to_string())),
        };
        let cover = match lattice.cover_points(&self.region, delta) {
            Ok(c) => c,
            Err(e) => return self.halt(StopReason::Failed(e.to_string())),
        };
        self.delta = delta;
        self.depth = Some(depth);
        self.iteration += 1;

        let fresh: Vec<LatticeIndex> = cover.into_iter().filter(|i| !self.sampled.contains(i)).collect();
        let remaining = self.config.budget.saturating_sub(self.samples());
        let over_budget = fresh.len() > remaining;
        let take = fresh.len().min(remaining);
        let batch = &fresh[..take];

        let points: Vec<Vec<f64>> = batch.iter().map(|i| lattice.point(i)).collect();
        let values: Vec<f64> = batch.iter().map(|i| objective.value_at(i)).collect();
        let start = self.samples();
        if let Err(e) = self.posterior.extend(points.clone(), values.clone()) {
            return self.halt(StopReason::Failed(e.to_string()));
        }
        for (k, (p, v)) in points.into_iter().zip(values).enumerate() {
            let beta = self.config.beta(start + k + 1);
            self.trace
                .push(self.iteration, p, v, delta, beta, self.region.radius, take);
        }
        self.sampled.extend(batch.iter().cloned());
        self.pending = Some(PendingRound {
            n_new: take,
            region_radius: self.region.radius,
        });
        if over_budget {
            return self.halt(StopReason::BudgetExhausted);
        }
        Progress::Continue
    }

    /// Lattice points of `region` at `depth` with their posterior mean and deviation.
    fn bounds_in(&self, region: &Region, depth: u32) -> Result<RegionBounds> {
        let lattice = &self.config.lattice;
        let idx = lattice.indices_in_ball(&region.center, region.radius, depth)?;
        let pts: Vec<Vec<f64>> = idx.iter().map(|i| lattice.point(i)).collect();
        let bounds = self.posterior.predict_many(&pts)?;
        Ok((idx, bounds))
    }

    /// Replaces the region by the enclosing ball of the relevant set.
    pub fn shrink(&mut self) -> Progress {
        if self.stop.is_some() {
            return Progress::Stopped;
        }
        let Some(depth) = self.depth else {
            return self.halt(StopReason::Failed("shrink called before the first densify".into()));
        };
        if self.samples() == 0 {
            return self.halt(StopReason::Failed("shrink needs at least one sample".into()));
        }
        let lattice = &self.config.lattice;
        let beta = self.config.beta(self.samples());
        let sqrt_beta = beta.sqrt();

        let (_, coarse) = match self.bounds_in(&self.region, depth) {
            Ok(v) => v,
            Err(e) => return self.halt(StopReason::Failed(e.to_string())),
        };
        let (fine_idx, fine) = match self.bounds_in(&self.region, lattice.max_depth()) {
            Ok(v) => v,
            Err(e) => return self.halt(StopReason::Failed(e.to_string())),
        };
        let lcb_sup = lcb_supremum(&coarse, sqrt_beta);
        let sigma_max = fine.iter().map(|b| b.1).fold(0.0, f64::max);
        let relevant: Vec<Vec<f64>> = relevant_indices(&fine, sqrt_beta, lcb_sup)
            .into_iter()
            .map(|i| lattice.point(&fine_idx[i]))
            .collect();

        let pending = self.pending.take().unwrap_or(PendingRound {
            n_new: 0,
            region_radius: self.region.radius,
        });
        let mut record = IterationRecord {
            iteration: self.iteration,
            delta: self.delta,
            depth,
            n_total: self.samples(),
            n_new: pending.n_new,
            region_center: self.region.center.clone(),
            region_radius: pending.region_radius,
            sigma_max,
            beta,
            lcb_sup,
            relevant_count: relevant.len(),
            next_radius: self.region.radius,
            next_sigma_max: sigma_max,
            argmax_retained: self.region.contains(&self.argmax, lattice.domain()),
        };
        let Some((a, b, _)) = farthest_pair(&relevant) else {
            self.trace.iterations.push(record);
            return self.halt(StopReason::RelevantSetEmpty);
        };
        self.region = enclosing_ball(&relevant[a], &relevant[b]);
        record.next_radius = self.region.radius;
        record.next_sigma_max = match self.bounds_in(&self.region, lattice.max_depth()) {
            Ok((_, b)) => b.iter().map(|b| b.1).fold(0.0, f64::max),
            Err(e) => return self.halt(StopReason::Failed(e.to_string())),
        };
        record.argmax_retained = self.region.contains(&self.argmax, lattice.domain());
        self.trace.iterations.push(record);
        match lattice.indices_in_ball(&self.region.center, self.region.radius, lattice.max_depth()) {
            Ok(left) if left.iter().all(|i| self.sampled.contains(i)) => {
                self.halt(StopReason::CandidatesExhausted)
            }
            Ok(_) => Progress::Continue,
            Err(e) => self.halt(StopReason::Failed(e.to_string())),
        }
    }
}

/// Runs densify/shrink rounds until a stop condition is met.
///
/// Precondition failures (mismatched lattice, invalid config) are errors;
/// anything that goes wrong mid-run is recorded as the stop reason of the
/// partial trace.
pub fn run(config: &BnbConfig, objective: &TabulatedObjective) -> Result<RegretTrace> {
    let mut state = OptimizerState::new(config.clone(), objective)?;
    while state.densify(objective) == Progress::Continue && state.shrink() == Progress::Continue {}
    Ok(state.into_trace())
}
