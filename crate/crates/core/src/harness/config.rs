//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::UcbMode;
use crate::error::{ConfigIssue, Error, Result};
use crate::kernels::{KernelConfig, KernelSpec};
use crate::lattice::{BoxDomain, DyadicLattice};

/// Largest lattice on which a GP draw is tabulated (dense Cholesky).
pub const MAX_GP_DRAW_POINTS: u64 = 4097;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: BoxDomain,
    pub max_depth: u32,
    pub kernel: KernelConfig,
    pub objective: ObjectiveConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Optimizers run against the same seeds by `compare`.
    #[serde(default = "default_baselines")]
    pub baselines: Vec<OptimizerConfig>,
    pub alpha: f64,
    pub budget: usize,
    #[serde(default = "one")]
    pub replications: usize,
    pub master_seed: u64,
    pub output: PathBuf,
    /// Initial posterior jitter; defaults to `1e-10` times the signal variance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    /// Replay GP-draw runs against the confidence envelope.
    #[serde(default = "yes")]
    pub check_envelope: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_baselines() -> Vec<OptimizerConfig> {
    vec![OptimizerConfig::PlainUcb { mode: UcbMode::UnsampledOnly }]
}

fn zero() -> f64 {
    0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    /// A fresh draw from the GP prior per replication.
    GpDraw {},
    /// Quadratic peak; a missing `peak` is drawn per replication, uniformly
    /// from the points at least `rho0` away from the boundary.
    SyntheticPeak {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        peak: Option<Vec<f64>>,
        #[serde(default = "zero")]
        peak_value: f64,
        c1: f64,
        c2: f64,
        rho0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerConfig {
    Bnb {},
    PlainUcb {
        #[serde(default)]
        mode: UcbMode,
    },
    Lipschitz {
        lipschitz: f64,
    },
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::Bnb {}
    }
}

impl OptimizerConfig {
    pub fn label(&self) -> &'static str {
        match self {
            OptimizerConfig::Bnb {} => "bnb",
            OptimizerConfig::PlainUcb {
                mode: UcbMode::UnsampledOnly,
            } => "plain_ucb",
            OptimizerConfig::PlainUcb {
                mode: UcbMode::AllowResample,
            } => "plain_ucb_resample",
            OptimizerConfig::Lipschitz { .. } => "lipschitz",
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates. Parse errors carry the offending field path;
    /// validation reports every problem at once.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigIssues(issues))
        }
    }

    /// Every validation problem, in field order.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut push = |path: &str, message: String| {
            out.push(ConfigIssue {
                path: path.to_string(),
                message,
            })
        };
        let dom = &self.domain;
        let d = dom.dim();
        if !(1..=30).contains(&self.max_depth) {
            push("max_depth", format!("must lie in 1..=30, got {}", self.max_depth));
        }
        match self.kernel.build() {
            Ok(k) if k.dim() != d => push(
                "kernel.lengthscales",
                format!("has {} entries but the domain has dimension {d}", k.dim()),
            ),
            Ok(_) => {}
            Err(e) => push("kernel", e.to_string()),
        }
        if let Ok(lat) = DyadicLattice::new(dom.clone(), self.max_depth) {
            if matches!(self.objective, ObjectiveConfig::GpDraw {}) && lat.size() > MAX_GP_DRAW_POINTS {
                push(
                    "max_depth",
                    format!(
                        "gp_draw objectives are limited to {MAX_GP_DRAW_POINTS} lattice points, this lattice has {}",
                        lat.size()
                    ),
                );
            }
        }
        if let ObjectiveConfig::SyntheticPeak {
            peak, c1, c2, rho0, ..
        } = &self.objective
        {
            if !(0.0 < *c2 && c2 < c1) {
                push("objective.c1", format!("need 0 < c2 < c1, got c1 = {c1}, c2 = {c2}"));
            }
            if !(*rho0 > 0.0) {
                push("objective.rho0", format!("must be positive, got {rho0}"));
            }
            match peak {
                Some(p) if p.len() != d => push("objective.peak", format!("has {} coordinates, domain has {d}", p.len())),
                Some(p) if *rho0 > 0.0 && dom.distance_to_boundary(p) < *rho0 => {
                    push("objective.peak", format!("must lie at least rho0 = {rho0} inside the domain"))
                }
                None if dom.lower().iter().zip(dom.upper()).any(|(l, u)| u - l <= 2.0 * rho0) => push(
                    "objective.rho0",
                    "domain is too narrow to place a random peak rho0 away from the boundary".into(),
                ),
                _ => {}
            }
        }
        for (i, opt) in std::iter::once(&self.optimizer).chain(&self.baselines).enumerate() {
            if let OptimizerConfig::Lipschitz { lipschitz } = opt {
                if !(*lipschitz > 0.0 && lipschitz.is_finite()) {
                    let path = if i == 0 {
                        "optimizer.lipschitz".to_string()
                    } else {
                        format!("baselines[{}].lipschitz", i - 1)
                    };
                    push(&path, format!("must be positive and finite, got {lipschitz}"));
                }
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            push("alpha", format!("must lie in (0, 1), got {}", self.alpha));
        }
        if self.budget < 1 {
            push("budget", "must be at least 1".into());
        }
        if self.replications < 1 {
            push("replications", "must be at least 1".into());
        }
        if let Some(j) = self.jitter {
            if !(j > 0.0 && j.is_finite()) {
                push("jitter", format!("must be positive and finite, got {j}"));
            }
        }
        out
    }

    /// The lattice; only meaningful on a validated config.
    pub fn lattice(&self) -> Result<DyadicLattice> {
        DyadicLattice::new(self.domain.clone(), self.max_depth)
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        self.kernel.build()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}
