//! Noise-free Gaussian-process posterior.
//!
//! The posterior interpolates its observations exactly (up to a tiny
//! diagonal jitter that keeps the Cholesky factorization stable). The same
//! factorization serves three views of one object:
//!
//! * the predictive mean `μ_T(x) = k(x)ᵀ K⁻¹ f`,
//! * the predictive standard deviation `σ_T(x)`, and
//! * the orthogonal projection onto `span{κ(x_i, ·)}` in the RKHS, whose
//!   image of sampled values is the minimum-norm interpolant.
//!
//! `residual_norm` recomputes `σ_T` through the projection so the two routes
//! can be checked against each other.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::kernels::KernelSpec;

/// Relative jitter used by default: `1e-10 · signal_variance`.
pub const DEFAULT_RELATIVE_JITTER: f64 = 1e-10;
/// Jitter escalation stops here, relative to the signal variance.
pub const MAX_RELATIVE_JITTER: f64 = 1e-6;
/// Two points closer than this are treated as duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Cholesky factor of `K + jitter·I`, escalating the jitter by ×10 on failure.
///
/// Returns the lower factor together with the jitter that succeeded.
pub fn factorize_with_jitter(
    gram: &DMatrix<f64>,
    initial_jitter: f64,
    signal_variance: f64,
) -> Result<(DMatrix<f64>, f64)> {
    let cap = (MAX_RELATIVE_JITTER * signal_variance).max(initial_jitter);
    let mut jitter = initial_jitter;
    let empty = DMatrix::zeros(0, 0);
    loop {
        if let Some(chol) = append_cholesky(&empty, gram.nrows(), |i, j| gram[(i, j)], jitter) {
            return Ok((chol, jitter));
        }
        if jitter >= cap {
            return Err(Error::SingularGram { jitter });
        }
        jitter = (jitter * 10.0).min(cap);
    }
}

/// Extends the lower factor `chol` of the leading block to `n` rows.
///
/// `entry(i, j)` returns the Gram entry for `j ≤ i`; `jitter` is added on the
/// diagonal. Fits and incremental updates both go through this routine, so a
/// fit followed by an update performs exactly the arithmetic of a single fit.
/// Returns `None` when a pivot is not positive.
fn append_cholesky(
    chol: &DMatrix<f64>,
    n: usize,
    entry: impl Fn(usize, usize) -> f64,
    jitter: f64,
) -> Option<DMatrix<f64>> {
    let old = chol.nrows();
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (old, old)).copy_from(chol);
    for t in old..n {
        let mut row = DVector::from_fn(t, |s, _| entry(t, s));
        if t > 0 && !out.view((0, 0), (t, t)).solve_lower_triangular_mut(&mut row) {
            return None;
        }
        let pivot_sq = entry(t, t) + jitter - row.norm_squared();
        if !(pivot_sq > 0.0 && pivot_sq.is_finite()) {
            return None;
        }
        for s in 0..t {
            out[(t, s)] = row[s];
        }
        out[(t, t)] = pivot_sq.sqrt();
    }
    Some(out)
}

/// A GP posterior conditioned on exact observations.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: KernelSpec,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    /// Lower Cholesky factor of `K + jitter·I`.
    chol: DMatrix<f64>,
    /// `L⁻¹ f`, whose prefix is stable under appends.
    whitened: DVector<f64>,
    /// `(K + jitter·I)⁻¹ f`.
    weights: DVector<f64>,
    base_jitter: f64,
    jitter: f64,
}

impl GpPosterior {
    /// The prior: no observations.
    pub fn prior(kernel: KernelSpec, jitter: f64) -> Self {
        GpPosterior {
            kernel,
            points: Vec::new(),
            values: Vec::new(),
            chol: DMatrix::zeros(0, 0),
            whitened: DVector::zeros(0),
            weights: DVector::zeros(0),
            base_jitter: jitter,
            jitter,
        }
    }

    /// Default jitter for a kernel.
    pub fn default_jitter(kernel: &KernelSpec) -> f64 {
        DEFAULT_RELATIVE_JITTER * kernel.signal_variance()
    }

    pub fn fit(kernel: KernelSpec, points: Vec<Vec<f64>>, values: Vec<f64>, jitter: f64) -> Result<Self> {
        if !(jitter.is_finite() && jitter > 0.0) {
            return Err(Error::invalid(format!("jitter must be positive, got {jitter}")));
        }
        if points.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let mut gp = GpPosterior::prior(kernel, jitter);
        gp.validate_new(&points, &values)?;
        gp.points = points;
        gp.values = values;
        gp.refactorize(jitter)?;
        Ok(gp)
    }

    /// Returns the posterior conditioned on additional observations.
    ///
    /// The Cholesky factor is extended row by row; if a pivot fails the whole
    /// system is refactorized with an escalated jitter.
    pub fn update(&self, new_points: Vec<Vec<f64>>, new_values: Vec<f64>) -> Result<Self> {
        let mut gp = self.clone();
        gp.extend(new_points, new_values)?;
        Ok(gp)
    }

    /// In-place form of [`GpPosterior::update`].
    pub fn extend(&mut self, new_points: Vec<Vec<f64>>, new_values: Vec<f64>) -> Result<()> {
        if new_points.len() != new_values.len() {
            return Err(Error::invalid(format!(
                "{} points but {} values",
                new_points.len(),
                new_values.len()
            )));
        }
        if new_points.is_empty() {
            return Ok(());
        }
        self.validate_new(&new_points, &new_values)?;
        self.points.extend(new_points);
        self.values.extend(new_values);
        if !self.append_rows() {
            self.refactorize(self.jitter * 10.0)?;
        }
        Ok(())
    }

    fn validate_new(&self, new_points: &[Vec<f64>], new_values: &[f64]) -> Result<()> {
        let d = self.kernel.dim();
        for (i, p) in new_points.iter().enumerate() {
            check_dim(d, p.len())?;
            let index = self.points.len() + i;
            let clash = self
                .points
                .iter()
                .chain(&new_points[..i])
                .any(|q| distance(p, q) <= DUPLICATE_TOLERANCE);
            if clash {
                return Err(Error::DuplicatePoint { index });
            }
        }
        if let Some(v) = new_values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite observation {v}")));
        }
        Ok(())
    }

    fn refactorize(&mut self, jitter: f64) -> Result<()> {
        let cap = (MAX_RELATIVE_JITTER * self.kernel.signal_variance()).max(self.base_jitter);
        let mut jitter = jitter.max(self.base_jitter).min(cap);
        let empty = DMatrix::zeros(0, 0);
        loop {
            if let Some(chol) = self.factor_from(&empty, jitter) {
                self.chol = chol;
                self.jitter = jitter;
                self.finish_solves();
                return Ok(());
            }
            if jitter >= cap {
                return Err(Error::SingularGram { jitter });
            }
            jitter = (jitter * 10.0).min(cap);
        }
    }

    /// Appends rows for the newly added points. Returns false on a failed pivot.
    fn append_rows(&mut self) -> bool {
        match self.factor_from(&self.chol, self.jitter) {
            Some(chol) => {
                self.chol = chol;
                self.finish_solves();
                true
            }
            None => false,
        }
    }

    fn factor_from(&self, chol: &DMatrix<f64>, jitter: f64) -> Option<DMatrix<f64>> {
        let pts = &self.points;
        let kernel = &self.kernel;
        append_cholesky(
            chol,
            pts.len(),
            |i, j| {
                if i == j {
                    kernel.prior_variance()
                } else {
                    kernel.eval_unchecked(&pts[i], &pts[j])
                }
            },
            jitter,
        )
    }

    fn finish_solves(&mut self) {
        let f = DVector::from_column_slice(&self.values);
        let whitened = self
            .chol
            .solve_lower_triangular(&f)
            .expect("cholesky factor has a positive diagonal");
        let weights = self
            .chol
            .tr_solve_lower_triangular(&whitened)
            .expect("cholesky factor has a positive diagonal");
        self.whitened = whitened;
        self.weights = weights;
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The jitter actually used by the current factorization.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub(crate) fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub(crate) fn whitened(&self) -> &DVector<f64> {
        &self.whitened
    }

    fn cross_cov(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.points.len(),
            self.points.iter().map(|p| self.kernel.eval_unchecked(x, p)),
        )
    }

    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.kernel.dim(), x.len())?;
        Ok(self.cross_cov(x).dot(&self.weights))
    }

    pub fn predict_std(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict(x)?.1)
    }

    /// Mean and standard deviation at `x`.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        check_dim(self.kernel.dim(), x.len())?;
        let mut k = self.cross_cov(x);
        let mean = k.dot(&self.weights);
        if self.points.is_empty() {
            return Ok((mean, self.kernel.prior_variance().sqrt()));
        }
        self.chol.solve_lower_triangular_mut(&mut k);
        let var = self.kernel.prior_variance() - k.norm_squared();
        Ok((mean, var.max(0.0).sqrt()))
    }

    /// Mean and standard deviation at many points with one triangular solve.
    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<(f64, f64)>> {
        for x in xs {
            check_dim(self.kernel.dim(), x.len())?;
        }
        let n = self.points.len();
        let prior_sd = self.kernel.prior_variance().sqrt();
        if n == 0 {
            return Ok(vec![(0.0, prior_sd); xs.len()]);
        }
        let mut cross = DMatrix::from_fn(n, xs.len(), |i, j| self.kernel.eval_unchecked(&xs[j], &self.points[i]));
        let means: Vec<f64> = (0..xs.len()).map(|j| cross.column(j).dot(&self.weights)).collect();
        self.chol.solve_lower_triangular_mut(&mut cross);
        Ok(means
            .into_iter()
            .enumerate()
            .map(|(j, m)| {
                let var = self.kernel.prior_variance() - cross.column(j).norm_squared();
                (m, var.max(0.0).sqrt())
            })
            .collect())
    }

    /// Norm of the component of `κ(x, ·)` orthogonal to the sampled sections.
    ///
    /// Computed as `g(x)` for the residual `g = (1 − P)κ(x, ·)`, using the
    /// reproducing property `‖g‖² = ⟨g, κ(x, ·)⟩ = g(x)`.
    pub fn residual_norm(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.kernel.dim(), x.len())?;
        if self.points.is_empty() {
            return Ok(self.kernel.eval_unchecked(x, x).sqrt());
        }
        let section: Vec<f64> = self.points.iter().map(|p| self.kernel.eval_unchecked(p, x)).collect();
        let projected = self.project(&section)?;
        let residual_at_x = self.kernel.eval_unchecked(x, x) - projected.eval(x)?;
        Ok(residual_at_x.max(0.0).sqrt())
    }

    /// Minimum-norm interpolant of `h` given its values at the sampled points.
    pub fn project(&self, h_values: &[f64]) -> Result<Interpolant> {
        if h_values.len() != self.points.len() {
            return Err(Error::invalid(format!(
                "{} values for {} sampled points",
                h_values.len(),
                self.points.len()
            )));
        }
        let coefficients = if self.points.is_empty() {
            DVector::zeros(0)
        } else {
            let h = DVector::from_column_slice(h_values);
            let z = self
                .chol
                .solve_lower_triangular(&h)
                .expect("cholesky factor has a positive diagonal");
            self.chol
                .tr_solve_lower_triangular(&z)
                .expect("cholesky factor has a positive diagonal")
        };
        Ok(Interpolant {
            kernel: self.kernel.clone(),
            centers: self.points.clone(),
            coefficients: coefficients.iter().copied().collect(),
        })
    }
}

/// `Σ c_i κ(x_i, ·)`, an element of the span of the sampled kernel sections.
#[derive(Debug, Clone)]
pub struct Interpolant {
    kernel: KernelSpec,
    centers: Vec<Vec<f64>>,
    coefficients: Vec<f64>,
}

impl Interpolant {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.kernel.dim(), x.len())?;
        Ok(self
            .centers
            .iter()
            .zip(&self.coefficients)
            .map(|(p, c)| c * self.kernel.eval_unchecked(p, x))
            .sum())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Squared RKHS norm `cᵀ K c`.
    pub fn rkhs_norm_squared(&self) -> f64 {
        let mut total = 0.0;
        for (p, ci) in self.centers.iter().zip(&self.coefficients) {
            for (q, cj) in self.centers.iter().zip(&self.coefficients) {
                total += ci * cj * self.kernel.eval_unchecked(p, q);
            }
        }
        total
    }
}

/// Certified bound `Qδ²/4` on `sup σ_T` when the samples form a δ-cover.
pub fn interpolation_error_bound(delta: f64, q: f64) -> f64 {
    q * delta * delta / 4.0
}

/// Incrementally maintained posterior mean and deviation at fixed probes.
///
/// Each probe keeps `v = L⁻¹ k(probe)`. Appending an observation adds one
/// entry per probe at `O(T)` cost, so tracking `P` probes over `T` samples
/// costs `O(P T²)` in total instead of `O(P T³)`.
#[derive(Debug, Clone)]
pub struct ProbeCache {
    probes: Vec<Vec<f64>>,
    whitened_cross: Vec<Vec<f64>>,
    norm_sq: Vec<f64>,
    mean: Vec<f64>,
    synced: usize,
    jitter: f64,
}

impl ProbeCache {
    pub fn new(probes: Vec<Vec<f64>>) -> Self {
        let n = probes.len();
        ProbeCache {
            probes,
            whitened_cross: vec![Vec::new(); n],
            norm_sq: vec![0.0; n],
            mean: vec![0.0; n],
            synced: 0,
            jitter: f64::NAN,
        }
    }

    pub fn probes(&self) -> &[Vec<f64>] {
        &self.probes
    }

    /// Brings the cache up to date with `gp`, which must extend the
    /// observations last synced (same points, same order).
    pub fn sync(&mut self, gp: &GpPosterior) {
        if gp.jitter() != self.jitter || gp.len() < self.synced {
            self.reset();
            self.jitter = gp.jitter();
        }
        let chol = gp.chol();
        let w = gp.whitened();
        let kernel = gp.kernel();
        for t in self.synced..gp.len() {
            let xt = &gp.points()[t];
            let diag = chol[(t, t)];
            for (p, probe) in self.probes.iter().enumerate() {
                let v = &mut self.whitened_cross[p];
                let mut acc = kernel.eval_unchecked(xt, probe);
                for (s, vs) in v.iter().enumerate() {
                    acc -= chol[(t, s)] * vs;
                }
                let vt = acc / diag;
                v.push(vt);
                self.norm_sq[p] += vt * vt;
                self.mean[p] += vt * w[t];
            }
        }
        self.synced = gp.len();
        self.jitter = gp.jitter();
    }

    fn reset(&mut self) {
        for v in &mut self.whitened_cross {
            v.clear();
        }
        self.norm_sq.iter_mut().for_each(|x| *x = 0.0);
        self.mean.iter_mut().for_each(|x| *x = 0.0);
        self.synced = 0;
    }

    pub fn mean(&self, probe: usize) -> f64 {
        self.mean[probe]
    }

    pub fn std(&self, probe: usize, prior_variance: f64) -> f64 {
        (prior_variance - self.norm_sq[probe]).max(0.0).sqrt()
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn se(l: f64) -> KernelSpec {
        KernelSpec::squared_exponential(vec![l]).unwrap()
    }

    fn jit() -> f64 {
        1e-10
    }

    #[test]
    fn empty_posterior_is_the_prior() {
        let k = se(0.3).with_signal_variance(2.5).unwrap();
        let gp = GpPosterior::fit(k, vec![], vec![], jit()).unwrap();
        for x in [-1.0, 0.0, 0.4, 7.0] {
            assert_eq!(gp.predict_mean(&[x]).unwrap(), 0.0);
            assert!((gp.predict_std(&[x]).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
            assert!((gp.residual_norm(&[x]).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn single_point_interpolates() {
        let gp = GpPosterior::fit(se(1.0), vec![vec![0.3]], vec![2.0], jit()).unwrap();
        assert!((gp.predict_mean(&[0.3]).unwrap() - 2.0).abs() < 1e-6);
        assert!(gp.predict_std(&[0.3]).unwrap() < 1e-3);
    }

    #[test]
    fn two_point_case_matches_explicit_solve() {
        // K = [[1, e], [e, 1]] with e = exp(−1/2); f = (1, −1)
        let gp = GpPosterior::fit(se(1.0), vec![vec![0.0], vec![1.0]], vec![1.0, -1.0], jit()).unwrap();
        let e = (-0.5f64).exp();
        let kx = (-0.125f64).exp(); // κ(0.5, 0) = κ(0.5, 1)
        let (a, b, c, d) = (1.0 + jit(), e, e, 1.0 + jit());
        let det = a * d - b * c;
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let alpha = [inv[0][0] - inv[0][1], inv[1][0] - inv[1][1]];
        let mean = kx * alpha[0] + kx * alpha[1];
        let quad = kx * kx * (inv[0][0] + inv[0][1] + inv[1][0] + inv[1][1]);
        let sd = (1.0 - quad).sqrt();
        assert!((gp.predict_mean(&[0.5]).unwrap() - mean).abs() < 1e-10);
        assert!((gp.predict_std(&[0.5]).unwrap() - sd).abs() < 1e-10);
        // symmetric data gives a zero mean at the midpoint
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn far_away_reverts_to_prior() {
        let gp = GpPosterior::fit(se(0.1), vec![vec![0.0], vec![0.2]], vec![3.0, -2.0], jit()).unwrap();
        assert!(gp.predict_mean(&[5.0]).unwrap().abs() < 1e-3);
        assert!((gp.predict_std(&[5.0]).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn duplicates_rejected() {
        let err = GpPosterior::fit(se(1.0), vec![vec![0.1], vec![0.1]], vec![1.0, 1.0], jit()).unwrap_err();
        assert!(matches!(err, Error::DuplicatePoint { index: 1 }));
        let gp = GpPosterior::fit(se(1.0), vec![vec![0.1]], vec![1.0], jit()).unwrap();
        assert!(matches!(
            gp.update(vec![vec![0.1]], vec![0.0]),
            Err(Error::DuplicatePoint { index: 1 })
        ));
        assert!(GpPosterior::fit(se(1.0), vec![vec![0.1, 0.2]], vec![1.0], jit()).is_err());
        assert!(GpPosterior::fit(se(1.0), vec![vec![0.1]], vec![1.0, 2.0], jit()).is_err());
    }

    #[test]
    fn empty_update_is_a_no_op() {
        let gp = GpPosterior::fit(se(0.5), vec![vec![0.0], vec![0.7]], vec![1.0, 0.2], jit()).unwrap();
        let same = gp.update(vec![], vec![]).unwrap();
        for x in [0.1, 0.35, 0.9] {
            assert_eq!(gp.predict(&[x]).unwrap(), same.predict(&[x]).unwrap());
        }
    }

    #[test]
    fn update_matches_refit() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..20 {
            let d = rng.random_range(1..=3usize);
            let ls: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..0.8)).collect();
            let k = KernelSpec::squared_exponential(ls).unwrap();
            let n = rng.random_range(1..25usize);
            let m = rng.random_range(0..15usize);
            let pts: Vec<Vec<f64>> = (0..n + m).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
            let vals: Vec<f64> = (0..n + m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let a = GpPosterior::fit(k.clone(), pts[..n].to_vec(), vals[..n].to_vec(), jit()).unwrap();
            let inc = a.update(pts[n..].to_vec(), vals[n..].to_vec()).unwrap();
            let full = GpPosterior::fit(k, pts, vals, jit()).unwrap();
            assert_eq!(inc.jitter(), full.jitter());
            for _ in 0..30 {
                let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                let (m1, s1) = inc.predict(&x).unwrap();
                let (m2, s2) = full.predict(&x).unwrap();
                assert!((m1 - m2).abs() <= 1e-10, "{m1} vs {m2}");
                assert!((s1 - s2).abs() <= 1e-10, "{s1} vs {s2}");
            }
        }
    }

    #[test]
    fn residual_norm_is_zero_at_samples() {
        let pts = vec![vec![0.1], vec![0.45], vec![0.8]];
        let gp = GpPosterior::fit(se(0.3), pts.clone(), vec![0.0, 1.0, 0.5], jit()).unwrap();
        for p in &pts {
            assert!(gp.residual_norm(p).unwrap() < 1e-4);
        }
    }

    #[test]
    fn projection_of_zero_is_zero() {
        let pts = vec![vec![0.1, 0.2], vec![0.5, 0.5], vec![0.9, 0.0]];
        let gp = GpPosterior::fit(
            KernelSpec::squared_exponential(vec![0.4, 0.3]).unwrap(),
            pts,
            vec![1.0, 2.0, 3.0],
            jit(),
        )
        .unwrap();
        let zero = gp.project(&[0.0, 0.0, 0.0]).unwrap();
        for i in 0..10 {
            let x = [i as f64 / 10.0, 1.0 - i as f64 / 10.0];
            assert_eq!(zero.eval(&x).unwrap(), 0.0);
        }
    }

    #[test]
    fn projection_reproduces_sections_in_the_span() {
        let pts = vec![vec![0.0], vec![0.3], vec![0.55], vec![1.0]];
        let k = se(0.4);
        let gp = GpPosterior::fit(k.clone(), pts.clone(), vec![0.0; 4], jit()).unwrap();
        for xj in &pts {
            let h: Vec<f64> = pts.iter().map(|p| k.eval(xj, p).unwrap()).collect();
            let proj = gp.project(&h).unwrap();
            for i in 0..=40 {
                let x = [-0.5 + i as f64 * 0.05];
                assert!((proj.eval(&x).unwrap() - k.eval(xj, &x).unwrap()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn projection_does_not_increase_norm() {
        // ‖P h‖ ≤ ‖h‖ for h = κ(z, ·) whose norm is κ(z, z)
        let k = se(0.25);
        let pts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 7.0]).collect();
        let gp = GpPosterior::fit(k.clone(), pts.clone(), vec![0.0; 8], jit()).unwrap();
        let z = [0.33];
        let h: Vec<f64> = pts.iter().map(|p| k.eval(&z, p).unwrap()).collect();
        let proj = gp.project(&h).unwrap();
        assert!(proj.rkhs_norm_squared() <= k.prior_variance() + 1e-9);
    }

    #[test]
    fn predict_many_matches_predict() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 0.17, 0.3]).collect();
        let vals: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let gp = GpPosterior::fit(KernelSpec::matern(2.5, vec![0.3, 0.5]).unwrap(), pts, vals, jit()).unwrap();
        let probes: Vec<Vec<f64>> = (0..15).map(|i| vec![i as f64 / 14.0, 0.1]).collect();
        let many = gp.predict_many(&probes).unwrap();
        for (p, (m, s)) in probes.iter().zip(many) {
            let (m1, s1) = gp.predict(p).unwrap();
            assert!((m - m1).abs() < 1e-12 && (s - s1).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_cache_tracks_incremental_posteriors() {
        let k = se(0.2);
        let probes: Vec<Vec<f64>> = (0..=20).map(|i| vec![i as f64 / 20.0]).collect();
        let mut cache = ProbeCache::new(probes.clone());
        let mut gp = GpPosterior::prior(k.clone(), jit());
        cache.sync(&gp);
        for p in 0..probes.len() {
            assert_eq!(cache.mean(p), 0.0);
            assert_eq!(cache.std(p, 1.0), 1.0);
        }
        for (i, x) in [0.5, 0.0, 1.0, 0.25, 0.75, 0.4].iter().enumerate() {
            gp.extend(vec![vec![*x]], vec![(i as f64).cos()]).unwrap();
            cache.sync(&gp);
            for (p, probe) in probes.iter().enumerate() {
                let (m, s) = gp.predict(probe).unwrap();
                assert!((cache.mean(p) - m).abs() < 1e-10);
                assert!((cache.std(p, 1.0) - s).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bound_arithmetic() {
        assert!((interpolation_error_bound(0.1, 3f64.sqrt()) - 0.004330).abs() < 1e-6);
        assert_eq!(interpolation_error_bound(0.0, 5.0), 0.0);
        let a = interpolation_error_bound(0.07, 2.0);
        assert!((interpolation_error_bound(0.14, 2.0) - 4.0 * a).abs() < 1e-15);
    }

    #[test]
    fn jitter_escalates_on_rank_deficient_gram() {
        let k = se(1.0);
        let g = k.gram_matrix(&[vec![0.0], vec![0.0]]).unwrap();
        let (_, used) = factorize_with_jitter(&g, 1e-10, 1.0).unwrap();
        assert!(used >= 1e-10);
    }
}
