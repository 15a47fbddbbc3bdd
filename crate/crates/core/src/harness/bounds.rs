//! Bound-verification suites: the variance bound on uniform covers and the
//! empirical coverage of the confidence envelope.

use rayon::prelude::*;
use serde::Serialize;

use crate::bnb::{self, BnbConfig};
use crate::error::{Error, Result};
use crate::gp::{interpolation_error_bound, GpPosterior};
use crate::kernels::KernelSpec;
use crate::lattice::{BoxDomain, DyadicLattice};
use crate::metrics::{binomial_upper_limit, check_envelope};
use crate::sampler::sample_gp_prior;

/// Relative slack allowed on the variance bound.
pub const VARIANCE_BOUND_SLACK: f64 = 1e-4;

/// Accepted range of `sup σ(δ) / sup σ(δ/2)`.
pub const DECAY_RATIO_RANGE: (f64, f64) = (3.0, 5.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceBoundRow {
    pub delta: f64,
    /// Samples in the cover grid.
    pub samples: usize,
    pub probes: usize,
    pub measured: f64,
    /// `Q δ² / 4`.
    pub bound: f64,
    pub ratio: f64,
    pub within: bool,
    /// `δ ≥ diam`: a single sample at the center, reported but not judged.
    pub coarse: bool,
    /// Jitter the posterior ended up using.
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceBoundReport {
    pub q: f64,
    pub rows: Vec<VarianceBoundRow>,
    /// `measured(δ_i) / measured(δ_{i+1})` for consecutive rows.
    pub decay_ratios: Vec<f64>,
}

impl VarianceBoundReport {
    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.coarse || r.within)
    }

    /// Consecutive ratios inside [`DECAY_RATIO_RANGE`]; only meaningful
    /// when the deltas halve.
    pub fn decay_is_quadratic(&self) -> bool {
        let (lo, hi) = DECAY_RATIO_RANGE;
        self.decay_ratios.iter().all(|r| (lo..=hi).contains(r))
    }
}

/// Tensor grid with `cells` equal intervals per axis.
fn tensor_grid(domain: &BoxDomain, cells: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(l, u)| (0..=cells).map(|i| l + (u - l) * i as f64 / cells as f64).collect())
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Intervals per axis so that each grid cell has diameter at most `delta`.
pub fn cover_cells(domain: &BoxDomain, delta: f64) -> usize {
    let widest = domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(l, u)| u - l)
        .fold(0.0, f64::max);
    ((domain.dim() as f64).sqrt() * widest / delta).ceil().max(1.0) as usize
}

/// Per-axis refinement giving at least ten probes per sample; even, so the
/// cell centers are probed.
pub fn probe_refinement(d: usize) -> usize {
    let r = 10f64.powf(1.0 / d as f64).ceil() as usize;
    r + r % 2
}

/// Samples the uniform grid whose cells have diameter `δ`, then measures
/// `sup σ` on a grid at least ten times denser and compares with `Q δ² / 4`.
pub fn verify_variance_bound(kernel: &KernelSpec, domain: &BoxDomain, deltas: &[f64]) -> Result<VarianceBoundReport> {
    crate::error::check_dim(domain.dim(), kernel.dim())?;
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::invalid("deltas must be positive"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("deltas must be strictly descending"));
    }
    let q = kernel.derivative_bound_q()?;
    let jitter = GpPosterior::default_jitter(kernel);
    let refine = probe_refinement(domain.dim());
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let coarse = delta >= domain.diameter();
        let (points, cells) = if coarse {
            (vec![domain.center()], 1)
        } else {
            let c = cover_cells(domain, delta);
            (tensor_grid(domain, c), c)
        };
        let probes = tensor_grid(domain, cells * refine);
        let values = vec![0.0; points.len()];
        let gp = GpPosterior::fit(kernel.clone(), points, values, jitter)?;
        let measured = probes
            .par_chunks(512)
            .map(|chunk| gp.predict_many(chunk).map(|b| b.iter().map(|p| p.1).fold(0.0, f64::max)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let bound = interpolation_error_bound(delta, q);
        rows.push(VarianceBoundRow {
            delta,
            samples: gp.len(),
            probes: probes.len(),
            measured,
            bound,
            ratio: measured / bound,
            within: measured <= bound * (1.0 + VARIANCE_BOUND_SLACK),
            coarse,
            jitter: gp.jitter(),
        });
    }
    let decay_ratios = rows
        .windows(2)
        .filter(|w| !w[0].coarse)
        .map(|w| w[0].measured / w[1].measured)
        .collect();
    Ok(VarianceBoundReport { q, rows, decay_ratios })
}

/// Inputs to [`envelope_coverage`].
#[derive(Debug, Clone)]
pub struct CoverageConfig {
    pub kernel: KernelSpec,
    pub lattice: DyadicLattice,
    pub alpha: f64,
    pub budget: usize,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub replications: usize,
    pub violations: usize,
    pub violation_rate: f64,
    /// `α + 3 √(α (1 − α) / M)`.
    pub rate_limit: f64,
    /// Normal-approximation interval for the violation rate.
    pub rate_interval: (f64, f64),
    /// Runs where the maximizer left the region at some shrink.
    pub exits: usize,
    pub exit_rate: f64,
    pub worst_ratio: f64,
}

impl CoverageReport {
    pub fn coverage_holds(&self) -> bool {
        self.violation_rate <= self.rate_limit
    }

    pub fn retention_holds(&self) -> bool {
        self.exit_rate <= self.rate_limit
    }
}

/// Runs branch and bound on one GP draw per seed and replays every trace
/// against the confidence envelope.
pub fn envelope_coverage(cfg: &CoverageConfig) -> Result<CoverageReport> {
    if cfg.seeds.is_empty() {
        return Err(Error::invalid("coverage needs at least one seed"));
    }
    let bnb_cfg = BnbConfig::new(cfg.lattice.clone(), cfg.kernel.clone(), cfg.alpha, cfg.budget)?;
    let per_run: Vec<(bool, bool, f64)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let obj = sample_gp_prior(&cfg.kernel, &cfg.lattice, seed)?;
            let trace = bnb::run(&bnb_cfg, &obj)?;
            let env = check_envelope(&trace, &obj, &cfg.kernel, cfg.alpha, bnb_cfg.jitter)?;
            Ok((env.violated, trace.argmax_ever_exited(), env.worst_ratio))
        })
        .collect::<Result<_>>()?;
    let m = per_run.len();
    let violations = per_run.iter().filter(|r| r.0).count();
    let exits = per_run.iter().filter(|r| r.1).count();
    let rate = violations as f64 / m as f64;
    let half = 3.0 * (rate * (1.0 - rate) / m as f64).sqrt();
    Ok(CoverageReport {
        replications: m,
        violations,
        violation_rate: rate,
        rate_limit: binomial_upper_limit(cfg.alpha, m),
        rate_interval: ((rate - half).max(0.0), (rate + half).min(1.0)),
        exits,
        exit_rate: exits as f64 / m as f64,
        worst_ratio: per_run.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}
