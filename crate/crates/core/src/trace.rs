//! Per-sample and per-iteration records shared by every optimizer.

use serde::{Deserialize, Serialize};

/// Why an optimizer run stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The relevant set came back empty.
    RelevantSetEmpty,
    /// The next iteration needed a lattice finer than the maximum depth.
    ResolutionExhausted,
    /// The sample budget ran out.
    BudgetExhausted,
    /// Every candidate lattice point has been sampled or discarded.
    CandidatesExhausted,
    /// A component failed; the trace holds everything up to the failure.
    Failed(String),
}

impl StopReason {
    pub fn label(&self) -> &str {
        match self {
            StopReason::RelevantSetEmpty => "relevant_set_empty",
            StopReason::ResolutionExhausted => "resolution_exhausted",
            StopReason::BudgetExhausted => "budget_exhausted",
            StopReason::CandidatesExhausted => "candidates_exhausted",
            StopReason::Failed(_) => "failed",
        }
    }
}

/// One queried point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// 1-based sample counter.
    pub t: usize,
    /// Iteration (branch-and-bound round) that produced the sample.
    pub iteration: usize,
    pub point: Vec<f64>,
    pub value: f64,
    /// `max f − f(x_t)`.
    pub regret: f64,
    pub cumulative_regret: f64,
    pub delta: f64,
    /// Confidence width parameter after this sample.
    pub beta: f64,
    /// Radius of the region the sample was drawn from.
    pub region_radius: f64,
    /// Number of samples taken in the same iteration.
    pub n_new: usize,
}

/// Bookkeeping for one densify + shrink round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub delta: f64,
    pub depth: u32,
    /// Samples so far at the end of the densify step.
    pub n_total: usize,
    /// Samples added by the densify step.
    pub n_new: usize,
    /// Center of the region that was densified.
    pub region_center: Vec<f64>,
    /// Radius of the region that was densified.
    pub region_radius: f64,
    /// Largest posterior deviation over the region's candidates.
    pub sigma_max: f64,
    pub beta: f64,
    /// Supremum of the lower confidence bound over the candidates.
    pub lcb_sup: f64,
    /// Size of the relevant set.
    pub relevant_count: usize,
    /// Radius of the region after shrinking.
    pub next_radius: f64,
    /// Largest posterior deviation over the shrunk region, same posterior.
    pub next_sigma_max: f64,
    /// Whether the objective's maximizer lies in the shrunk region.
    pub argmax_retained: bool,
}

/// Everything an optimizer run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub samples: Vec<SampleRecord>,
    pub iterations: Vec<IterationRecord>,
    pub stop: Option<StopReason>,
    pub max_value: f64,
}

impl RegretTrace {
    pub fn new(max_value: f64) -> Self {
        RegretTrace {
            samples: Vec::new(),
            iterations: Vec::new(),
            stop: None,
            max_value,
        }
    }

    /// Appends a sample, filling in `t`, regret and the running sum.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push(
        &mut self,
        iteration: usize,
        point: Vec<f64>,
        value: f64,
        delta: f64,
        beta: f64,
        region_radius: f64,
        n_new: usize,
    ) {
        let regret = self.max_value - value;
        let cumulative = self.samples.last().map_or(0.0, |s| s.cumulative_regret) + regret;
        self.samples.push(SampleRecord {
            t: self.samples.len() + 1,
            iteration,
            point,
            value,
            regret,
            cumulative_regret: cumulative,
            delta,
            beta,
            region_radius,
            n_new,
        });
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn regrets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.regret).collect()
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.samples.last().map(|s| s.regret)
    }

    /// Smallest regret seen so far.
    pub fn best_regret(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.regret).reduce(f64::min)
    }

    pub fn total_cumulative_regret(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.cumulative_regret)
    }

    /// True when the maximizer dropped out of the region at some shrink.
    pub fn argmax_ever_exited(&self) -> bool {
        self.iterations.iter().any(|it| !it.argmax_retained)
    }
}

/// Prefix sums of simple regret.
pub fn cumulative_regret(regrets: &[f64]) -> Vec<f64> {
    regrets
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums() {
        assert_eq!(cumulative_regret(&[1.0, 0.5, 0.25]), vec![1.0, 1.5, 1.75]);
        assert_eq!(cumulative_regret(&[0.0; 4]), vec![0.0; 4]);
        assert!(cumulative_regret(&[]).is_empty());
    }

    #[test]
    fn push_tracks_regret() {
        let mut tr = RegretTrace::new(2.0);
        tr.push(1, vec![0.0], 1.0, 0.5, 3.0, 1.0, 2);
        tr.push(1, vec![1.0], 2.0, 0.5, 3.5, 1.0, 2);
        assert_eq!(tr.samples[1].t, 2);
        assert_eq!(tr.regrets(), vec![1.0, 0.0]);
        assert_eq!(tr.total_cumulative_regret(), 1.0);
        assert_eq!(
            tr.samples.iter().map(|s| s.cumulative_regret).collect::<Vec<_>>(),
            cumulative_regret(&tr.regrets())
        );
    }
}
