//! Ground-truth objectives tabulated on the finest lattice.
//!
//! Optimizers only ever query lattice points, so an objective is a table of
//! values over every point of a [`DyadicLattice`]. Two constructions are
//! provided: exact draws from the GP prior, and synthetic quadratic peaks
//! that satisfy a known two-sided quadratic envelope around the maximizer.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gp::{distance, factorize_with_jitter, GpPosterior};
use crate::kernels::KernelSpec;
use crate::lattice::{BoxDomain, DyadicLattice, LatticeIndex};

/// Identifier of the random generator behind every seeded draw.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.10, seed_from_u64)";

/// Where an objective came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    GpDraw {
        seed: u64,
        jitter: f64,
    },
    SyntheticPeak {
        peak: Vec<f64>,
        peak_value: f64,
        c1: f64,
        c2: f64,
        rho0: f64,
    },
    Constant {
        value: f64,
    },
}

/// Function values over every point of a lattice.
#[derive(Debug, Clone)]
pub struct TabulatedObjective {
    lattice: DyadicLattice,
    values: Vec<f64>,
    argmax: usize,
    provenance: Provenance,
}

impl TabulatedObjective {
    /// Wraps precomputed values; one per lattice point in row-major order.
    pub fn new(lattice: DyadicLattice, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.len() as u64 != lattice.size() {
            return Err(Error::invalid(format!(
                "{} values for a lattice of {} points",
                values.len(),
                lattice.size()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite objective value {v}")));
        }
        // first maximal entry, i.e. lexicographically smallest argmax
        let mut argmax = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[argmax] {
                argmax = i;
            }
        }
        Ok(TabulatedObjective {
            lattice,
            values,
            argmax,
            provenance,
        })
    }

    pub fn constant(lattice: DyadicLattice, value: f64) -> Result<Self> {
        let n = lattice.size() as usize;
        Self::new(lattice, vec![value; n], Provenance::Constant { value })
    }

    pub fn lattice(&self) -> &DyadicLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.argmax]
    }

    pub fn argmax_index(&self) -> LatticeIndex {
        self.lattice.from_linear(self.argmax)
    }

    pub fn argmax_point(&self) -> Vec<f64> {
        self.lattice.point(&self.argmax_index())
    }

    pub fn value_at(&self, index: &LatticeIndex) -> f64 {
        self.values[self.lattice.linear(index)]
    }

    /// Value at a lattice point; anything off the lattice is rejected.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.lattice.dim(), x.len())?;
        self.lattice
            .index_of(x)
            .map(|i| self.value_at(&i))
            .ok_or_else(|| Error::OffSupport(x.to_vec()))
    }

    /// Simple regret `max f − f(x)` at a lattice point.
    pub fn regret_at(&self, index: &LatticeIndex) -> f64 {
        self.max_value() - self.value_at(index)
    }

    /// Gap between the largest and second-largest tabulated values.
    pub fn top_two_gap(&self) -> f64 {
        let second = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.argmax)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        self.max_value() - second
    }
}

/// Draws `f ~ GP(0, κ)` on every lattice point: `f = L z` with `z` standard
/// normal from a seeded ChaCha20 stream.
pub fn sample_gp_prior(kernel: &KernelSpec, lattice: &DyadicLattice, seed: u64) -> Result<TabulatedObjective> {
    check_dim(kernel.dim(), lattice.dim())?;
    let points = lattice.lattice_points(lattice.max_depth())?;
    let gram = kernel.gram_unchecked(&points);
    let (chol, jitter) = factorize_with_jitter(&gram, GpPosterior::default_jitter(kernel), kernel.signal_variance())?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..points.len()).map(|_| rng.sample(StandardNormal)).collect();
    let values: Vec<f64> = (0..points.len())
        .map(|i| (0..=i).map(|j| chol[(i, j)] * z[j]).sum())
        .collect();
    TabulatedObjective::new(lattice.clone(), values, Provenance::GpDraw { seed, jitter })
}

/// Quadratic peak `f(x) = f_M − c̄ ‖x − x_M‖²` with `c̄ = (c1 + c2)/2`.
///
/// On `B(x_M, ρ₀)` this satisfies `f_M − c1 r² < f(x) ≤ f_M − c2 r²` for
/// every `x ≠ x_M`, and the same formula continues outside the ball.
pub fn synthetic_peak(
    lattice: &DyadicLattice,
    peak: &[f64],
    peak_value: f64,
    c1: f64,
    c2: f64,
    rho0: f64,
) -> Result<TabulatedObjective> {
    let domain = lattice.domain();
    check_dim(domain.dim(), peak.len())?;
    if !(0.0 < c2 && c2 < c1) {
        return Err(Error::invalid(format!("need 0 < c2 < c1, got c1 = {c1}, c2 = {c2}")));
    }
    if !(rho0 > 0.0) {
        return Err(Error::invalid(format!("rho0 must be positive, got {rho0}")));
    }
    if domain.distance_to_boundary(peak) < rho0 {
        return Err(Error::invalid(format!(
            "peak {peak:?} is closer than rho0 = {rho0} to the domain boundary"
        )));
    }
    let curvature = 0.5 * (c1 + c2);
    let values = lattice
        .lattice_points(lattice.max_depth())?
        .iter()
        .map(|x| {
            let r = distance(x, peak);
            peak_value - curvature * r * r
        })
        .collect();
    TabulatedObjective::new(
        lattice.clone(),
        values,
        Provenance::SyntheticPeak {
            peak: peak.to_vec(),
            peak_value,
            c1,
            c2,
            rho0,
        },
    )
}

/// Inward finite-difference slope required at a boundary maximizer.
pub const BOUNDARY_SLOPE_THRESHOLD: f64 = 1e-6;

/// Checks the local shape of `obj` around its maximizer `peak`.
///
/// When `peak` lies inside the domain, every support point `x ≠ peak` in
/// `B(peak, ρ₀)` must satisfy `f(peak) − c1 r² < f(x) ≤ f(peak) − c2 r²`,
/// where `f(peak)` is the tabulated maximum. When `peak` is a support point
/// on a face of the box, the one-sided slope into the domain along every
/// active face normal must be at least [`BOUNDARY_SLOPE_THRESHOLD`].
pub fn verify_peak_condition(obj: &TabulatedObjective, peak: &[f64], c1: f64, c2: f64, rho0: f64) -> bool {
    let lattice = obj.lattice();
    let domain = lattice.domain();
    if peak.len() != domain.dim() {
        return false;
    }
    let top = match &obj.provenance {
        Provenance::SyntheticPeak { peak_value, .. } => *peak_value,
        _ => obj.max_value(),
    };
    let tol = domain.tolerance();
    if domain.distance_to_boundary(peak) <= tol {
        return boundary_slope_ok(obj, peak, domain);
    }
    let n = lattice.size() as usize;
    (0..n).all(|i| {
        let x = lattice.point(&lattice.from_linear(i));
        let r = distance(&x, peak);
        if r == 0.0 || r > rho0 {
            return true;
        }
        let f = obj.values[i];
        top - c1 * r * r < f && f <= top - c2 * r * r
    })
}

fn boundary_slope_ok(obj: &TabulatedObjective, peak: &[f64], domain: &BoxDomain) -> bool {
    let lattice = obj.lattice();
    let Some(index) = lattice.index_of(peak) else {
        return false;
    };
    let tol = domain.tolerance();
    let top = obj.value_at(&index);
    let mut checked = false;
    for axis in 0..domain.dim() {
        let inward: Option<u64> = if (peak[axis] - domain.lower()[axis]).abs() <= tol {
            Some(index.0[axis] + 1)
        } else if (domain.upper()[axis] - peak[axis]).abs() <= tol {
            index.0[axis].checked_sub(1)
        } else {
            None
        };
        if let Some(k) = inward {
            let mut neighbour = index.clone();
            neighbour.0[axis] = k;
            let h = distance(&lattice.point(&neighbour), peak);
            let slope = (top - obj.value_at(&neighbour)) / h;
            if slope < BOUNDARY_SLOPE_THRESHOLD {
                return false;
            }
            checked = true;
        }
    }
    checked
}

/// Tightest quadratic envelope `(c1, c2)` of `obj` on `B(argmax, ρ₀)`,
/// widened by `margin` (relative) so that the strict inequality holds.
///
/// Returns `None` when the ball holds no other support point or the lower
/// curvature is not positive (the maximum is not quadratic-like there).
pub fn estimate_peak_constants(obj: &TabulatedObjective, rho0: f64, margin: f64) -> Option<(f64, f64)> {
    let lattice = obj.lattice();
    let peak = obj.argmax_point();
    let top = obj.max_value();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, f) in obj.values.iter().enumerate() {
        let x = lattice.point(&lattice.from_linear(i));
        let r = distance(&x, &peak);
        if r == 0.0 || r > rho0 {
            continue;
        }
        let c = (top - f) / (r * r);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (lo.is_finite() && lo > 0.0).then_some((hi * (1.0 + margin), lo * (1.0 - margin)))
}

/// Replication seeds derived from a master seed.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    (0..count).map(|_| rng.random::<u64>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(depth: u32) -> DyadicLattice {
        DyadicLattice::new(BoxDomain::unit(1), depth).unwrap()
    }

    #[test]
    fn gp_draws_are_deterministic() {
        let k = KernelSpec::squared_exponential(vec![0.2]).unwrap();
        let a = sample_gp_prior(&k, &line(5), 42).unwrap();
        let b = sample_gp_prior(&k, &line(5), 42).unwrap();
        let c = sample_gp_prior(&k, &line(5), 43).unwrap();
        let bits = |o: &TabulatedObjective| o.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn gp_draw_moments_match_the_kernel() {
        // Monte-Carlo oracle over 2000 seeds at two fixed lattice points
        let k = KernelSpec::squared_exponential(vec![0.3]).unwrap();
        let lat = line(3);
        let (i, j) = (2usize, 4usize);
        let xi = lat.point(&lat.from_linear(i));
        let xj = lat.point(&lat.from_linear(j));
        let m = 2000;
        let draws: Vec<(f64, f64)> = (0..m)
            .map(|s| {
                let o = sample_gp_prior(&k, &lat, s as u64).unwrap();
                (o.values()[i], o.values()[j])
            })
            .collect();
        let mean_i = draws.iter().map(|d| d.0).sum::<f64>() / m as f64;
        let mean_j = draws.iter().map(|d| d.1).sum::<f64>() / m as f64;
        let cov = draws.iter().map(|d| (d.0 - mean_i) * (d.1 - mean_j)).sum::<f64>() / (m - 1) as f64;
        assert!(mean_i.abs() <= 4.0 / (m as f64).sqrt());
        assert!(mean_j.abs() <= 4.0 / (m as f64).sqrt());
        assert!((cov - k.eval(&xi, &xj).unwrap()).abs() <= 0.1);
    }

    #[test]
    fn synthetic_peak_values() {
        let lat = line(6);
        let obj = synthetic_peak(&lat, &[0.5], 1.0, 2.0, 1.0, 0.3).unwrap();
        assert_eq!(obj.evaluate(&[0.5]).unwrap(), 1.0);
        assert_eq!(obj.regret_at(&obj.argmax_index()), 0.0);
        assert_eq!(obj.argmax_point(), vec![0.5]);
        // ‖x − x_M‖ = 0.125 at a lattice point: f_M − 1.5·0.125²
        assert_eq!(obj.evaluate(&[0.625]).unwrap(), 1.0 - 1.5 * 0.125 * 0.125);
        assert!(verify_peak_condition(&obj, &[0.5], 2.0, 1.0, 0.3));
    }

    #[test]
    fn synthetic_peak_formula_at_distance_one_tenth() {
        let lat = DyadicLattice::new(BoxDomain::new(vec![0.0], vec![1.6]).unwrap(), 4).unwrap();
        // lattice spacing 0.1 on [0, 1.6]
        let obj = synthetic_peak(&lat, &[0.8], 0.0, 2.0, 1.0, 0.5).unwrap();
        let f = obj.evaluate(&lat.point(&LatticeIndex(vec![9]))).unwrap();
        assert!((f + 0.015).abs() < 1e-12);
    }

    #[test]
    fn synthetic_peak_rejects_bad_parameters() {
        let lat = line(4);
        assert!(synthetic_peak(&lat, &[0.5], 0.0, 1.0, 2.0, 0.1).is_err());
        assert!(synthetic_peak(&lat, &[0.05], 0.0, 2.0, 1.0, 0.1).is_err());
        assert!(synthetic_peak(&lat, &[0.5, 0.5], 0.0, 2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn off_support_queries_are_rejected() {
        let obj = TabulatedObjective::constant(line(3), 0.0).unwrap();
        assert!(obj.evaluate(&[0.125]).is_ok());
        assert!(matches!(obj.evaluate(&[0.1]), Err(Error::OffSupport(_))));
    }

    #[test]
    fn flat_function_fails_the_peak_condition() {
        let obj = TabulatedObjective::constant(line(4), 0.0).unwrap();
        assert!(!verify_peak_condition(&obj, &[0.5], 2.0, 1.0, 0.3));
    }

    #[test]
    fn boundary_maximizer_with_slope() {
        let lat = line(4);
        let values: Vec<f64> = lat.lattice_points(4).unwrap().iter().map(|x| 1.0 - x[0]).collect();
        let obj = TabulatedObjective::new(lat.clone(), values, Provenance::Constant { value: 0.0 }).unwrap();
        assert_eq!(obj.argmax_point(), vec![0.0]);
        assert!(verify_peak_condition(&obj, &[0.0], 2.0, 1.0, 0.3));
        let flat = TabulatedObjective::constant(lat, 1.0).unwrap();
        assert!(!verify_peak_condition(&flat, &[0.0], 2.0, 1.0, 0.3));
    }

    #[test]
    fn gp_draw_peak_check_agrees_with_exhaustive_scan() {
        let k = KernelSpec::squared_exponential(vec![0.2]).unwrap();
        let lat = line(7);
        let rho0 = 0.05;
        for seed in 0..20 {
            let obj = sample_gp_prior(&k, &lat, seed).unwrap();
            let peak = obj.argmax_point();
            if lat.domain().distance_to_boundary(&peak) <= 1e-12 {
                continue;
            }
            let Some((c1, c2)) = estimate_peak_constants(&obj, rho0, 1e-6) else {
                continue;
            };
            let brute = (0..lat.size() as usize).all(|i| {
                let x = lat.point(&lat.from_linear(i));
                let r = distance(&x, &peak);
                r == 0.0 || r > rho0 || {
                    let f = obj.values()[i];
                    obj.max_value() - c1 * r * r < f && f <= obj.max_value() - c2 * r * r
                }
            });
            assert_eq!(verify_peak_condition(&obj, &peak, c1, c2, rho0), brute);
            assert!(brute);
        }
    }

    #[test]
    fn top_two_gap_and_argmax_ties() {
        let lat = line(2);
        let obj = TabulatedObjective::new(lat, vec![0.0, 3.0, 1.0, 3.0, 2.0], Provenance::Constant { value: 0.0 }).unwrap();
        assert_eq!(obj.argmax_index(), LatticeIndex(vec![1]));
        assert_eq!(obj.top_two_gap(), 0.0);
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(derive_seeds(9, 4), derive_seeds(9, 4));
        assert_ne!(derive_seeds(9, 4), derive_seeds(10, 4));
        assert_eq!(derive_seeds(9, 6)[..4], derive_seeds(9, 4)[..]);
    }
}
