//! Box domains, nested dyadic lattices and the small amount of geometry
//! the branch-and-bound loop needs (covers, farthest pairs, balls).
//!
//! Every lattice point is addressed by its integer multi-index at the
//! finest depth. Coarser depths use multi-indices that are multiples of
//! `2^(max_depth − depth)`, so a point has the same coordinates (bit for
//! bit) at every depth it belongs to.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gp::distance;

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawBox> for BoxDomain {
    type Error = Error;

    fn try_from(raw: RawBox) -> Result<Self> {
        BoxDomain::new(raw.lower, raw.upper)
    }
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::invalid("domain must have at least one dimension"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::invalid(format!("domain bounds must satisfy lower < upper, got [{l}, {u}]")));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    /// `[0, 1]^d`.
    pub fn unit(d: usize) -> Self {
        BoxDomain {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn diameter(&self) -> f64 {
        distance(&self.lower, &self.upper)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = self.tolerance();
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }

    /// Distance from `x` to the nearest face, negative outside.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| (v - l).min(u - v))
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn tolerance(&self) -> f64 {
        1e-9 * self.diameter()
    }
}

/// Multi-index of a lattice point at the finest depth.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeIndex(pub Vec<u64>);

/// The dyadic grids of a box, from depth 0 (the corners) to `max_depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicLattice {
    domain: BoxDomain,
    max_depth: u32,
}

impl DyadicLattice {
    pub fn new(domain: BoxDomain, max_depth: u32) -> Result<Self> {
        if max_depth > 30 {
            return Err(Error::invalid(format!("max_depth {max_depth} is unreasonably large")));
        }
        let lat = DyadicLattice { domain, max_depth };
        if lat.size_checked().is_none() {
            return Err(Error::invalid("lattice has too many points to address"));
        }
        Ok(lat)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// Number of intervals per axis at the finest depth.
    pub fn resolution(&self) -> u64 {
        1u64 << self.max_depth
    }

    fn size_checked(&self) -> Option<u64> {
        (self.resolution() + 1).checked_pow(self.dim() as u32)
    }

    /// `|L| = (2^max_depth + 1)^d`.
    pub fn size(&self) -> u64 {
        self.size_checked().expect("checked at construction")
    }

    /// Diameter of one grid cell at `depth`.
    pub fn cell_diameter(&self, depth: u32) -> f64 {
        self.domain.diameter() / (1u64 << depth) as f64
    }

    /// Smallest depth whose cells have diameter at most `delta`.
    pub fn depth_for_delta(&self, delta: f64) -> Result<u32> {
        if !(delta > 0.0) {
            return Err(Error::invalid(format!("delta must be positive, got {delta}")));
        }
        let target = delta * (1.0 + 1e-12);
        let mut depth = 0u32;
        while self.cell_diameter(depth) > target {
            depth += 1;
            if depth > self.max_depth {
                // report the depth that would have been needed
                let mut needed = depth;
                while needed < 64 && self.domain.diameter() / 2f64.powi(needed as i32) > target {
                    needed += 1;
                }
                return Err(Error::ResolutionExhausted {
                    requested: needed,
                    max: self.max_depth,
                });
            }
        }
        Ok(depth)
    }

    fn step(&self, depth: u32) -> Result<u64> {
        if depth > self.max_depth {
            return Err(Error::ResolutionExhausted {
                requested: depth,
                max: self.max_depth,
            });
        }
        Ok(1u64 << (self.max_depth - depth))
    }

    pub fn point(&self, index: &LatticeIndex) -> Vec<f64> {
        let n = self.resolution() as f64;
        index
            .0
            .iter()
            .zip(self.domain.lower.iter().zip(&self.domain.upper))
            .map(|(k, (l, u))| {
                if *k == 0 {
                    *l
                } else if *k as f64 == n {
                    *u
                } else {
                    l + (u - l) * (*k as f64 / n)
                }
            })
            .collect()
    }

    /// Row-major position of an index (first coordinate varies slowest).
    pub fn linear(&self, index: &LatticeIndex) -> usize {
        let side = self.resolution() + 1;
        index.0.iter().fold(0u64, |acc, k| acc * side + k) as usize
    }

    pub fn from_linear(&self, mut linear: usize) -> LatticeIndex {
        let side = (self.resolution() + 1) as usize;
        let mut idx = vec![0u64; self.dim()];
        for slot in idx.iter_mut().rev() {
            *slot = (linear % side) as u64;
            linear /= side;
        }
        LatticeIndex(idx)
    }

    /// Finest-depth index of `x` if `x` is a lattice point.
    pub fn index_of(&self, x: &[f64]) -> Option<LatticeIndex> {
        if x.len() != self.dim() || !self.domain.contains(x) {
            return None;
        }
        let n = self.resolution() as f64;
        let idx: Vec<u64> = x
            .iter()
            .zip(self.domain.lower.iter().zip(&self.domain.upper))
            .map(|(v, (l, u))| ((v - l) / (u - l) * n).round().clamp(0.0, n) as u64)
            .collect();
        let idx = LatticeIndex(idx);
        let snapped = self.point(&idx);
        let tol = 1e-9 * self.domain.diameter() / n;
        (distance(&snapped, x) <= tol.max(1e-15)).then_some(idx)
    }

    /// All indices at `depth`, lexicographically ordered.
    pub fn indices_at_depth(&self, depth: u32) -> Result<Vec<LatticeIndex>> {
        let step = self.step(depth)?;
        let ranges = vec![(0u64, self.resolution()); self.dim()];
        Ok(grid_product(&ranges, step))
    }

    /// The `(2^depth + 1)^d` grid points at `depth`, lexicographically ordered.
    pub fn lattice_points(&self, depth: u32) -> Result<Vec<Vec<f64>>> {
        Ok(self.indices_at_depth(depth)?.iter().map(|i| self.point(i)).collect())
    }

    /// Indices at `depth` within distance `radius` of `center`, inside the box.
    pub fn indices_in_ball(&self, center: &[f64], radius: f64, depth: u32) -> Result<Vec<LatticeIndex>> {
        check_dim(self.dim(), center.len())?;
        let step = self.step(depth)?;
        let n = self.resolution() as f64;
        let tol = self.domain.tolerance();
        let reach = radius + tol;
        let ranges: Vec<(u64, u64)> = center
            .iter()
            .zip(self.domain.lower.iter().zip(&self.domain.upper))
            .map(|(c, (l, u))| {
                let lo = (((c - reach - l) / (u - l) * n).floor().max(0.0) as u64) / step * step;
                let hi = ((c + reach - l) / (u - l) * n).ceil().clamp(0.0, n) as u64;
                (lo, hi)
            })
            .collect();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return Ok(Vec::new());
        }
        Ok(grid_product(&ranges, step)
            .into_iter()
            .filter(|idx| distance(&self.point(idx), center) <= reach)
            .collect())
    }

    /// Lattice points of the smallest depth whose cells have diameter ≤ `delta`,
    /// restricted to the region dilated by one cell.
    ///
    /// Every point of the region lies in a grid cell whose vertices are all
    /// returned: such vertices are within one cell diameter of the point.
    pub fn cover_points(&self, region: &Region, delta: f64) -> Result<Vec<LatticeIndex>> {
        let depth = self.depth_for_delta(delta)?;
        self.indices_in_ball(&region.center, region.radius + self.cell_diameter(depth), depth)
    }
}

/// Cartesian product of `lo..=hi` (stepping by `step`) per axis, lexicographic.
fn grid_product(ranges: &[(u64, u64)], step: u64) -> Vec<LatticeIndex> {
    let mut out = Vec::new();
    let mut cur: Vec<u64> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(LatticeIndex(cur.clone()));
        let mut axis = ranges.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if cur[axis] + step <= ranges[axis].1 {
                cur[axis] += step;
                for (c, r) in cur[axis + 1..].iter_mut().zip(&ranges[axis + 1..]) {
                    *c = r.0;
                }
                break;
            }
        }
    }
}

/// A ball intersected with the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Region {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("region radius must be non-negative, got {radius}")));
        }
        Ok(Region { center, radius })
    }

    /// The smallest ball around the box; its intersection with the box is the box.
    pub fn whole(domain: &BoxDomain) -> Self {
        Region {
            center: domain.center(),
            radius: 0.5 * domain.diameter(),
        }
    }

    pub fn contains(&self, x: &[f64], domain: &BoxDomain) -> bool {
        domain.contains(x) && distance(x, &self.center) <= self.radius + domain.tolerance()
    }
}

/// Upper bound `⌈ρ√d/δ⌉^d` on the number of δ-balls covering a ρ-ball,
/// from the axis grid of spacing `δ/√d`. Saturates at `u64::MAX`.
pub fn covering_number(rho: f64, delta: f64, d: u32) -> u64 {
    assert!(rho > 0.0 && delta > 0.0, "covering_number needs positive rho and delta");
    let per_axis = (rho * (d as f64).sqrt() / delta).ceil().max(1.0);
    if per_axis >= u64::MAX as f64 {
        return u64::MAX;
    }
    (per_axis as u64).checked_pow(d).unwrap_or(u64::MAX)
}

/// The two points at maximal distance, by exhaustive scan.
///
/// Pairs are visited as `(i, j)` with `i ≤ j` and only a strictly larger
/// distance replaces the incumbent, so for lexicographically sorted input
/// ties resolve to the lexicographically smallest pair. Returns `None` for
/// an empty set.
pub fn farthest_pair(points: &[Vec<f64>]) -> Option<(usize, usize, f64)> {
    if points.is_empty() {
        return None;
    }
    let mut best = (0, 0, 0.0f64);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 > best.2 {
                best = (i, j, d2);
            }
        }
    }
    Some((best.0, best.1, best.2.sqrt()))
}

/// Ball centred at the midpoint of `p1`, `p2` whose radius is the full
/// distance `‖p1 − p2‖`.
pub fn enclosing_ball(p1: &[f64], p2: &[f64]) -> Region {
    Region {
        center: p1.iter().zip(p2).map(|(a, b)| 0.5 * (a + b)).collect(),
        radius: distance(p1, p2),
    }
}

/// Outcome of checking a lattice against the fineness and nesting requirements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeConditions {
    /// Depth-k points are a subset of depth-(k+1) points.
    pub nested: bool,
    /// `⌈−log₂(ρ₀ / diam D)⌉ + 1`.
    pub required_depth: u32,
    pub max_depth: u32,
    /// The lattice reaches spacing ≤ ρ₀/2 inside the domain.
    pub fine_enough: bool,
    pub rule: &'static str,
}

impl LatticeConditions {
    pub fn passed(&self) -> bool {
        self.nested && self.fine_enough
    }
}

pub fn check_lattice_conditions(lattice: &DyadicLattice, rho0: f64) -> Result<LatticeConditions> {
    if !(rho0 > 0.0) {
        return Err(Error::invalid(format!("rho0 must be positive, got {rho0}")));
    }
    let mut nested = true;
    for depth in 0..lattice.max_depth.min(3) {
        let fine: HashSet<Vec<u64>> = lattice
            .lattice_points(depth + 1)?
            .iter()
            .map(|p| p.iter().map(|v| v.to_bits()).collect())
            .collect();
        nested &= lattice
            .lattice_points(depth)?
            .iter()
            .all(|p| fine.contains(&p.iter().map(|v| v.to_bits()).collect::<Vec<_>>()));
    }
    let ratio = rho0 / lattice.domain.diameter();
    let required = ((-ratio.log2()).ceil() + 1.0).max(0.0) as u32;
    Ok(LatticeConditions {
        nested,
        required_depth: required,
        max_depth: lattice.max_depth,
        fine_enough: lattice.max_depth >= required,
        rule: "max_depth >= ceil(-log2(rho0 / diam D)) + 1, i.e. 2^{ceil(-log2(rho0/diam D))+1} L ∩ L non-empty",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn unit(d: usize, depth: u32) -> DyadicLattice {
        DyadicLattice::new(BoxDomain::unit(d), depth).unwrap()
    }

    #[test]
    fn domain_validation() {
        assert!(BoxDomain::new(vec![0.0], vec![0.0]).is_err());
        assert!(BoxDomain::new(vec![0.0, 1.0], vec![1.0]).is_err());
        let b = BoxDomain::new(vec![-1.0, 0.0], vec![2.0, 4.0]).unwrap();
        assert_eq!(b.diameter(), 5.0);
    }

    #[test]
    fn small_grids() {
        let lat = unit(1, 4);
        assert_eq!(lat.lattice_points(1).unwrap(), vec![vec![0.0], vec![0.5], vec![1.0]]);
        assert_eq!(unit(2, 3).lattice_points(1).unwrap().len(), 9);
        assert_eq!(unit(2, 3).size(), 81);
        assert!(matches!(
            lat.lattice_points(5),
            Err(Error::ResolutionExhausted { requested: 5, max: 4 })
        ));
    }

    #[test]
    fn lexicographic_order_and_linear_index() {
        let lat = DyadicLattice::new(BoxDomain::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap(), 2).unwrap();
        let idx = lat.indices_at_depth(2).unwrap();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        for (i, ix) in idx.iter().enumerate() {
            assert_eq!(lat.linear(ix), i);
            assert_eq!(&lat.from_linear(i), ix);
            assert_eq!(lat.index_of(&lat.point(ix)).as_ref(), Some(ix));
        }
        assert_eq!(lat.index_of(&[0.25, 0.0]), None);
        assert_eq!(lat.index_of(&[3.0, 0.0]), None);
    }

    #[test]
    fn dyadic_nesting_is_exact() {
        for d in 1..=3 {
            let lat = DyadicLattice::new(BoxDomain::new(vec![-0.3; d], vec![1.7; d]).unwrap(), 4).unwrap();
            for depth in 0..4 {
                let fine: HashSet<Vec<u64>> = lat
                    .lattice_points(depth + 1)
                    .unwrap()
                    .iter()
                    .map(|p| p.iter().map(|v| v.to_bits()).collect())
                    .collect();
                for p in lat.lattice_points(depth).unwrap() {
                    assert!(fine.contains(&p.iter().map(|v| v.to_bits()).collect::<Vec<_>>()));
                }
            }
        }
    }

    #[test]
    fn cover_examples() {
        let lat = unit(1, 6);
        let whole = Region::whole(lat.domain());
        let pts: Vec<_> = lat.cover_points(&whole, 0.5).unwrap().iter().map(|i| lat.point(i)).collect();
        assert_eq!(pts, vec![vec![0.0], vec![0.5], vec![1.0]]);

        let lat2 = unit(2, 5);
        let cover = lat2.cover_points(&Region::whole(lat2.domain()), 2f64.sqrt() / 2.0).unwrap();
        assert_eq!(cover, lat2.indices_at_depth(1).unwrap());
    }

    #[test]
    fn cover_of_small_ball_is_local() {
        let lat = unit(2, 6);
        let full = lat.cover_points(&Region::whole(lat.domain()), 0.25).unwrap();
        let ball = Region::new(vec![0.5, 0.5], 0.1).unwrap();
        let local = lat.cover_points(&ball, 0.25).unwrap();
        assert!(!local.is_empty());
        let depth = lat.depth_for_delta(0.25).unwrap();
        // brute-force membership over the whole depth grid
        let expected: Vec<_> = lat
            .indices_at_depth(depth)
            .unwrap()
            .into_iter()
            .filter(|i| distance(&lat.point(i), &ball.center) <= 0.1 + lat.cell_diameter(depth) + 1e-9)
            .collect();
        assert_eq!(local, expected);
        for i in &local {
            assert!(full.contains(i));
        }
    }

    #[test]
    fn cover_guarantee_on_random_probes() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for d in 1..=3usize {
            let lat = DyadicLattice::new(BoxDomain::new(vec![0.0; d], vec![2.0; d]).unwrap(), 7).unwrap();
            let region = Region::new(vec![0.7; d], 0.45).unwrap();
            let delta = 0.3;
            let cover: HashSet<LatticeIndex> = lat.cover_points(&region, delta).unwrap().into_iter().collect();
            let depth = lat.depth_for_delta(delta).unwrap();
            assert!(lat.cell_diameter(depth) <= delta);
            let step = 1u64 << (lat.max_depth() - depth);
            let mut probes = 0;
            while probes < 1000 {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..2.0)).collect();
                if !region.contains(&x, lat.domain()) {
                    continue;
                }
                probes += 1;
                let n = lat.resolution() as f64;
                let base: Vec<u64> = x
                    .iter()
                    .map(|v| (((v / 2.0) * n).floor() as u64 / step * step).min(lat.resolution() - step))
                    .collect();
                for corner in 0..(1usize << d) {
                    let v: Vec<u64> = (0..d).map(|a| base[a] + if corner >> a & 1 == 1 { step } else { 0 }).collect();
                    assert!(cover.contains(&LatticeIndex(v)));
                }
            }
        }
    }

    #[test]
    fn depth_for_delta_reports_exhaustion() {
        let lat = unit(1, 3);
        assert_eq!(lat.depth_for_delta(1.0).unwrap(), 0);
        assert_eq!(lat.depth_for_delta(0.125).unwrap(), 3);
        assert!(matches!(
            lat.depth_for_delta(0.0625),
            Err(Error::ResolutionExhausted { requested: 4, max: 3 })
        ));
    }

    #[test]
    fn covering_number_examples() {
        assert_eq!(covering_number(1.0, 2.0, 2), 1);
        assert_eq!(covering_number(1.0, 1.0, 1), 1);
        assert_eq!(covering_number(1.0, 0.5, 1), 2);
        assert_eq!(covering_number(1.0, 0.5, 2), 9);
        // greedy 1D oracle: intervals of length 2δ cover [−ρ, ρ]
        let greedy = |rho: f64, delta: f64| {
            let mut covered = -rho;
            let mut n = 0;
            while covered < rho {
                covered += 2.0 * delta;
                n += 1;
            }
            n
        };
        assert_eq!(greedy(1.0, 0.5), 2);
        assert!(covering_number(1.0, 0.5, 2) >= 4);
    }

    #[test]
    fn covering_number_is_monotone() {
        let deltas = [0.05, 0.1, 0.2, 0.4, 0.8, 1.6];
        for d in 1..=4 {
            for w in deltas.windows(2) {
                assert!(covering_number(1.0, w[1], d) <= covering_number(1.0, w[0], d));
                assert!(covering_number(w[0], 0.3, d) <= covering_number(w[1], 0.3, d));
            }
            assert!(covering_number(1.0, 0.3, d) <= covering_number(1.0, 0.3, d + 1));
        }
    }

    #[test]
    fn farthest_pair_examples() {
        assert_eq!(farthest_pair(&[]), None);
        let (i, j, d) = farthest_pair(&[vec![0.0], vec![0.3], vec![1.0]]).unwrap();
        assert_eq!((i, j), (0, 2));
        assert_eq!(d, 1.0);
        assert_eq!(farthest_pair(&[vec![0.4, 0.1]]), Some((0, 0, 0.0)));
        let corners = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let (i, j, d) = farthest_pair(&corners).unwrap();
        let brute = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .map(|(a, b)| distance(&corners[a], &corners[b]))
            .fold(0.0, f64::max);
        assert_eq!(d, brute);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        // both diagonals tie; the lexicographically first pair wins
        assert_eq!((i, j), (0, 3));
    }

    #[test]
    fn farthest_pair_beats_random_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let pts: Vec<Vec<f64>> = (0..120).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
        let (_, _, best) = farthest_pair(&pts).unwrap();
        for _ in 0..1000 {
            let a = rng.random_range(0..pts.len());
            let b = rng.random_range(0..pts.len());
            assert!(distance(&pts[a], &pts[b]) <= best);
        }
    }

    #[test]
    fn enclosing_ball_examples() {
        let r = enclosing_ball(&[0.3, 0.2], &[0.3, 0.2]);
        assert_eq!(r.radius, 0.0);
        assert_eq!(r.center, vec![0.3, 0.2]);
        let r = enclosing_ball(&[0.0], &[1.0]);
        assert_eq!(r.center, vec![0.5]);
        assert_eq!(r.radius, 1.0);
    }

    #[test]
    fn clipped_ball_membership() {
        let dom = BoxDomain::unit(2);
        let region = enclosing_ball(&[0.9, 0.9], &[1.0, 0.7]);
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let x = [rng.random_range(-0.5..1.5), rng.random_range(-0.5..1.5)];
            let inside_box = (0.0..=1.0).contains(&x[0]) && (0.0..=1.0).contains(&x[1]);
            let inside_ball = distance(&x, &region.center) <= region.radius;
            assert_eq!(region.contains(&x, &dom), inside_box && inside_ball);
        }
    }

    #[test]
    fn lattice_condition_examples() {
        let c = check_lattice_conditions(&unit(1, 2), 0.5).unwrap();
        assert_eq!(c.required_depth, 2);
        assert!(c.passed());
        let c = check_lattice_conditions(&unit(1, 3), 0.05).unwrap();
        assert_eq!(c.required_depth, 6);
        assert!(c.nested);
        assert!(!c.fine_enough);
        assert!(check_lattice_conditions(&unit(3, 2), 0.1).unwrap().nested);
    }
}
