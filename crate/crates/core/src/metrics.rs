//! Measurements taken on finished traces: rate fits, confidence-envelope
//! checks, regret envelopes and growth of the sample count.

use serde::Serialize;

use crate::bnb::beta_schedule;
use crate::error::{Error, Result};
use crate::gp::{GpPosterior, ProbeCache};
use crate::kernels::KernelSpec;
use crate::sampler::TabulatedObjective;
use crate::trace::RegretTrace;

/// Minimum number of usable points for a rate fit.
pub const MIN_FIT_POINTS: usize = 10;

/// `t / (ln t)^{d/4}`, the time scale of the exponential rate.
pub fn scaled_time(t: f64, d: usize) -> f64 {
    t / t.ln().powf(d as f64 / 4.0)
}

/// True for the first steps, where `ln t ≤ d/4` and the time scale is not
/// yet increasing.
pub fn in_burn_in(t: usize, d: usize) -> bool {
    (t as f64).ln() <= d as f64 / 4.0
}

/// Fitted `r_t ≈ A exp(−τ t / (ln t)^{d/4})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimate {
    pub a_hat: f64,
    pub tau_hat: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    /// Points used in the regression.
    pub n_points: usize,
    /// Points whose zero regret was raised to the smallest positive one.
    pub floored: usize,
    /// Points dropped as burn-in.
    pub burn_in: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RateFit {
    Fitted(RateEstimate),
    /// Every regret after burn-in was zero, so the log is meaningless.
    Undefined { burn_in: usize, zeros: usize },
}

impl RateFit {
    pub fn estimate(&self) -> Option<&RateEstimate> {
        match self {
            RateFit::Fitted(e) => Some(e),
            RateFit::Undefined { .. } => None,
        }
    }
}

/// Least-squares fit of `ln r_t` against `t / (ln t)^{d/4}` over `(t, r_t)`
/// pairs with 1-based `t`.
pub fn fit_rate_series(ts: &[usize], regrets: &[f64], d: usize) -> Result<RateFit> {
    if ts.len() != regrets.len() {
        return Err(Error::DimensionMismatch {
            expected: ts.len(),
            got: regrets.len(),
        });
    }
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if let Some(r) = regrets.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::invalid(format!("regrets must be finite and non-negative, got {r}")));
    }
    let mut burn_in = 0;
    let mut kept = Vec::new();
    for (&t, &r) in ts.iter().zip(regrets) {
        if t == 0 || in_burn_in(t, d) {
            burn_in += 1;
        } else {
            kept.push((t, r));
        }
    }
    let smallest = kept.iter().map(|p| p.1).filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
    if !smallest.is_finite() {
        return Ok(RateFit::Undefined {
            burn_in,
            zeros: kept.len(),
        });
    }
    let positive = kept.iter().filter(|p| p.1 > 0.0).count();
    if positive < MIN_FIT_POINTS {
        return Err(Error::invalid(format!(
            "rate fit needs at least {MIN_FIT_POINTS} positive regrets after burn-in, got {positive}"
        )));
    }
    let floored = kept.len() - positive;
    let xs: Vec<f64> = kept.iter().map(|p| scaled_time(p.0 as f64, d)).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.1.max(smallest).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit::Fitted(RateEstimate {
        a_hat: intercept.exp(),
        tau_hat: -slope,
        r_squared,
        n_points: kept.len(),
        floored,
        burn_in,
    }))
}

pub fn fit_rate(trace: &RegretTrace, d: usize) -> Result<RateFit> {
    let ts: Vec<usize> = trace.samples.iter().map(|s| s.t).collect();
    fit_rate_series(&ts, &trace.regrets(), d)
}

/// Running minimum of the positive regrets, `NaN` before the first one.
pub fn positive_regret_envelope(regrets: &[f64]) -> Vec<f64> {
    let mut best = f64::NAN;
    regrets
        .iter()
        .map(|&r| {
            if r > 0.0 && !(r >= best) {
                best = r;
            }
            best
        })
        .collect()
}

/// Median over values, ignoring `NaN`; `NaN` when nothing is left.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Per-step median over runs of `series`, each padded to `horizon` by
/// repeating its last entry.
pub fn median_series(series: &[Vec<f64>], horizon: usize) -> Vec<f64> {
    (0..horizon)
        .map(|t| {
            let col: Vec<f64> = series
                .iter()
                .filter_map(|s| s.get(t).or(s.last()).copied())
                .collect();
            median(&col)
        })
        .collect()
}

/// Median across runs of the positive-regret envelope.
pub fn median_positive_envelope(traces: &[RegretTrace], horizon: usize) -> Vec<f64> {
    let envs: Vec<Vec<f64>> = traces.iter().map(|t| positive_regret_envelope(&t.regrets())).collect();
    median_series(&envs, horizon)
}

/// Increase of the cumulative regret over the last quarter of the steps,
/// relative to its final value (0 when the total is 0).
pub fn last_quartile_share(cumulative: &[f64]) -> f64 {
    let n = cumulative.len();
    let Some(&total) = cumulative.last() else {
        return 0.0;
    };
    if total <= 0.0 {
        return 0.0;
    }
    let start = n - n.div_ceil(4);
    let before = if start == 0 { 0.0 } else { cumulative[start - 1] };
    (total - before) / total
}

/// Cumulative regret padded to `horizon` by repeating the last value, which
/// is how a run that stopped early keeps accruing nothing.
pub fn padded_cumulative(trace: &RegretTrace, horizon: usize) -> Vec<f64> {
    let mut c: Vec<f64> = trace.samples.iter().map(|s| s.cumulative_regret).collect();
    let last = c.last().copied().unwrap_or(0.0);
    c.resize(horizon.max(c.len()), last);
    c
}

/// Outcome of replaying a trace against the confidence envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub violated: bool,
    /// First step `t` and lattice position where `|f − μ_{t−1}| > √β_t σ_{t−1}`.
    pub first_violation: Option<(usize, usize)>,
    /// Largest `|f − μ| / (√β σ)` seen over all steps and points.
    pub worst_ratio: f64,
}

/// Replays `trace` and checks `|f(x) − μ_{t−1}(x)| ≤ √β_t σ_{t−1}(x)` at every
/// point of the objective's lattice before every sample.
pub fn check_envelope(
    trace: &RegretTrace,
    objective: &TabulatedObjective,
    kernel: &KernelSpec,
    alpha: f64,
    jitter: f64,
) -> Result<EnvelopeCheck> {
    let lattice = objective.lattice();
    let points = lattice.lattice_points(lattice.max_depth())?;
    let values = objective.values();
    let size = lattice.size();
    let prior_var = kernel.prior_variance();
    let mut gp = GpPosterior::prior(kernel.clone(), jitter);
    let mut cache = ProbeCache::new(points);
    let mut seen = std::collections::HashSet::new();
    let mut out = EnvelopeCheck {
        violated: false,
        first_violation: None,
        worst_ratio: 0.0,
    };
    for s in &trace.samples {
        cache.sync(&gp);
        let width = beta_schedule(s.t, size, alpha).sqrt();
        for (p, &f) in values.iter().enumerate() {
            let gap = (f - cache.mean(p)).abs();
            let allowed = width * cache.std(p, prior_var);
            if gap > allowed {
                out.violated = true;
                out.first_violation.get_or_insert((s.t, p));
            }
            let ratio = if allowed > 0.0 {
                gap / allowed
            } else if gap > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            out.worst_ratio = out.worst_ratio.max(ratio);
        }
        let key: Vec<u64> = s.point.iter().map(|x| x.to_bits()).collect();
        if seen.insert(key) {
            gp.extend(vec![s.point.clone()], vec![s.value])?;
        }
    }
    Ok(out)
}

/// Per-iteration regret bound `r(x_t) ≤ 2√β max σ` for the samples of the
/// next round, using the posterior and region of each shrink.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepBoundCheck {
    pub checked: usize,
    pub violations: usize,
    /// Largest `r(x_t) − 2√β max σ` over the checked samples.
    pub worst_excess: f64,
}

pub fn check_step_regret_bound(trace: &RegretTrace, slack: f64) -> StepBoundCheck {
    let mut out = StepBoundCheck {
        checked: 0,
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
    };
    for it in &trace.iterations {
        let bound = 2.0 * it.beta.sqrt() * it.next_sigma_max;
        for s in trace.samples.iter().filter(|s| s.iteration == it.iteration + 1) {
            let excess = s.regret - bound;
            out.checked += 1;
            out.worst_excess = out.worst_excess.max(excess);
            if excess > slack {
                out.violations += 1;
            }
        }
    }
    out
}

/// Largest `ΔN_ℓ / (ln N_ℓ)^{d/4}` over the second half of the iterations.
pub fn growth_constant(trace: &RegretTrace, d: usize) -> Option<f64> {
    let its = &trace.iterations;
    let tail = &its[its.len() / 2..];
    tail.iter()
        .filter(|it| it.n_total > 1)
        .map(|it| it.n_new as f64 / (it.n_total as f64).ln().powf(d as f64 / 4.0))
        .reduce(f64::max)
}

/// Three-sigma binomial upper limit `p + 3 √(p (1 − p) / m)`.
pub fn binomial_upper_limit(p: f64, m: usize) -> f64 {
    p + 3.0 * (p * (1.0 - p) / m as f64).sqrt()
}
