//! Reference optimizers: lattice GP-UCB without region shrinking, and
//! Lipschitz-cone elimination.

use serde::{Deserialize, Serialize};

use crate::bnb::beta_schedule;
use crate::error::{Error, Result};
use crate::gp::{distance, GpPosterior, ProbeCache};
use crate::kernels::KernelSpec;
use crate::lattice::DyadicLattice;
use crate::sampler::TabulatedObjective;
use crate::trace::{RegretTrace, StopReason};

/// Whether plain UCB may pick a point it has already sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UcbMode {
    /// Already-sampled points are excluded from the argmax.
    #[default]
    UnsampledOnly,
    /// Every lattice point competes; a repeat pick adds nothing to the posterior.
    AllowResample,
}

#[derive(Debug, Clone)]
pub struct UcbBaselineConfig {
    pub alpha: f64,
    pub lattice: DyadicLattice,
    pub kernel: KernelSpec,
    pub budget: usize,
    pub jitter: f64,
    pub mode: UcbMode,
}

impl UcbBaselineConfig {
    pub fn new(lattice: DyadicLattice, kernel: KernelSpec, alpha: f64, budget: usize, mode: UcbMode) -> Result<Self> {
        let jitter = GpPosterior::default_jitter(&kernel);
        let cfg = UcbBaselineConfig {
            alpha,
            lattice,
            kernel,
            budget,
            jitter,
            mode,
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
}

/// GP-UCB over the full lattice, one sample per step, no shrinking.
pub fn plain_ucb_run(config: &UcbBaselineConfig, objective: &TabulatedObjective) -> Result<RegretTrace> {
    config.validate()?;
    let lattice = &config.lattice;
    if objective.lattice() != lattice {
        return Err(Error::invalid("objective support differs from the baseline lattice"));
    }
    let indices = lattice.indices_at_depth(lattice.max_depth())?;
    let points: Vec<Vec<f64>> = indices.iter().map(|i| lattice.point(i)).collect();
    let size = lattice.size();
    let prior_var = config.kernel.prior_variance();
    let delta = lattice.cell_diameter(lattice.max_depth());
    let radius = lattice.domain().diameter();

    let mut gp = GpPosterior::prior(config.kernel.clone(), config.jitter);
    let mut cache = ProbeCache::new(points.clone());
    let mut sampled = vec![false; points.len()];
    let mut trace = RegretTrace::new(objective.max_value());

    for t in 1..=config.budget {
        let sqrt_beta = beta_schedule(t, size, config.alpha).sqrt();
        cache.sync(&gp);
        let mut best: Option<(usize, f64)> = None;
        for (p, &done) in sampled.iter().enumerate() {
            if done && config.mode == UcbMode::UnsampledOnly {
                continue;
            }
            let ucb = cache.mean(p) + sqrt_beta * cache.std(p, prior_var);
            if best.is_none_or(|(_, b)| ucb > b) {
                best = Some((p, ucb));
            }
        }
        let Some((p, _)) = best else {
            trace.stop = Some(StopReason::CandidatesExhausted);
            return Ok(trace);
        };
        let value = objective.value_at(&indices[p]);
        if !sampled[p] {
            if let Err(e) = gp.extend(vec![points[p].clone()], vec![value]) {
                trace.stop = Some(StopReason::Failed(e.to_string()));
                return Ok(trace);
            }
            sampled[p] = true;
        }
        trace.push(t, points[p].clone(), value, delta, beta_schedule(t, size, config.alpha), radius, 1);
    }
    trace.stop = Some(StopReason::BudgetExhausted);
    Ok(trace)
}

/// Outcome of a cone-elimination pass, as positions into the candidate list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
}

/// `min_i f(x_i) + L ‖x − x_i‖`.
pub fn lipschitz_upper_bound(samples: &[(Vec<f64>, f64)], lipschitz: f64, x: &[f64]) -> f64 {
    samples
        .iter()
        .map(|(xi, fi)| fi + lipschitz * distance(x, xi))
        .fold(f64::INFINITY, f64::min)
}

/// Discards candidates whose cone upper bound falls strictly below the best
/// sampled value.
pub fn lipschitz_eliminate(
    samples: &[(Vec<f64>, f64)],
    lipschitz: f64,
    candidates: &[Vec<f64>],
) -> Result<Elimination> {
    if !(lipschitz > 0.0) {
        return Err(Error::invalid(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    let Some(first) = samples.first() else {
        return Err(Error::invalid("elimination needs at least one sample"));
    };
    let d = first.0.len();
    for (x, _) in samples {
        crate::error::check_dim(d, x.len())?;
    }
    for c in candidates {
        crate::error::check_dim(d, c.len())?;
    }
    let best = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let (mut kept, mut discarded) = (Vec::new(), Vec::new());
    for (i, c) in candidates.iter().enumerate() {
        if lipschitz_upper_bound(samples, lipschitz, c) < best {
            discarded.push(i);
        } else {
            kept.push(i);
        }
    }
    Ok(Elimination { kept, discarded })
}

/// Piyavskii-style optimizer on the finest lattice: sample the surviving
/// point with the largest cone bound, then eliminate.
pub fn lipschitz_run(objective: &TabulatedObjective, lipschitz: f64, budget: usize) -> Result<RegretTrace> {
    if !(lipschitz > 0.0) {
        return Err(Error::invalid(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    if budget < 1 {
        return Err(Error::invalid("budget must be at least 1"));
    }
    let lattice = objective.lattice();
    let indices = lattice.indices_at_depth(lattice.max_depth())?;
    let points: Vec<Vec<f64>> = indices.iter().map(|i| lattice.point(i)).collect();
    let delta = lattice.cell_diameter(lattice.max_depth());
    let mut upper = vec![f64::INFINITY; points.len()];
    let mut alive = vec![true; points.len()];
    let mut best = f64::NEG_INFINITY;
    let mut trace = RegretTrace::new(objective.max_value());

    for t in 1..=budget {
        let mut pick: Option<usize> = None;
        for p in 0..points.len() {
            if alive[p] && pick.is_none_or(|q| upper[p] > upper[q]) {
                pick = Some(p);
            }
        }
        let Some(p) = pick else {
            trace.stop = Some(StopReason::CandidatesExhausted);
            return Ok(trace);
        };
        let value = objective.value_at(&indices[p]);
        alive[p] = false;
        best = best.max(value);
        for (q, x) in points.iter().enumerate() {
            upper[q] = upper[q].min(value + lipschitz * distance(x, &points[p]));
            if upper[q] < best {
                alive[q] = false;
            }
        }
        let remaining = alive.iter().filter(|&&a| a).count();
        trace.push(t, points[p].clone(), value, delta, f64::NAN, f64::NAN, remaining);
    }
    trace.stop = Some(StopReason::BudgetExhausted);
    Ok(trace)
}
