//! Stationary covariance functions.
//!
//! A kernel is written as `κ(x, x') = s · κ̃(q)` where
//! `q = (x − x')ᵀ D (x − x')` and `D` is diagonal. The diagonal is tied to
//! the usual lengthscales by `D_ii = 1 / (2 ℓ_i²)`, so the squared
//! exponential reads `s · exp(−Σ (x_i − x'_i)² / (2 ℓ_i²))`.
//!
//! Besides evaluation, each family knows the two derivative constants of
//! its profile at the origin that bound how fast functions in the RKHS
//! can vary: the gradient constant `L` and the curvature constant `Q`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Matérn smoothness orders with closed forms that are four times
/// differentiable at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaternOrder {
    FiveHalves,
    SevenHalves,
}

impl MaternOrder {
    pub fn from_nu(nu: f64) -> Result<Self> {
        if nu == 2.5 {
            Ok(MaternOrder::FiveHalves)
        } else if nu == 3.5 {
            Ok(MaternOrder::SevenHalves)
        } else {
            Err(Error::UnsupportedKernel(format!(
                "Matérn ν = {nu} (supported: 2.5, 3.5)"
            )))
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            MaternOrder::FiveHalves => 2.5,
            MaternOrder::SevenHalves => 3.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    SquaredExponential,
    Matern(MaternOrder),
}

impl KernelFamily {
    /// Unit-scale radial profile as a function of the scaled distance `r`.
    fn profile(self, r: f64) -> f64 {
        match self {
            KernelFamily::SquaredExponential => (-0.5 * r * r).exp(),
            KernelFamily::Matern(MaternOrder::FiveHalves) => {
                let a = 5f64.sqrt() * r;
                (1.0 + a + a * a / 3.0) * (-a).exp()
            }
            KernelFamily::Matern(MaternOrder::SevenHalves) => {
                let a = 7f64.sqrt() * r;
                (1.0 + a + 2.0 * a * a / 5.0 + a * a * a / 15.0) * (-a).exp()
            }
        }
    }

    /// `−κ̃''(0)` of the unit profile.
    fn second_moment(self) -> f64 {
        match self {
            KernelFamily::SquaredExponential => 1.0,
            KernelFamily::Matern(MaternOrder::FiveHalves) => 5.0 / 3.0,
            KernelFamily::Matern(MaternOrder::SevenHalves) => 7.0 / 5.0,
        }
    }

    /// `κ̃''''(0)` of the unit profile.
    fn fourth_moment(self) -> f64 {
        match self {
            KernelFamily::SquaredExponential => 3.0,
            KernelFamily::Matern(MaternOrder::FiveHalves) => 25.0,
            KernelFamily::Matern(MaternOrder::SevenHalves) => 49.0 / 5.0,
        }
    }
}

/// A stationary, anisotropic kernel with known hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    lengthscales: Vec<f64>,
    signal_variance: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, lengthscales: Vec<f64>, signal_variance: f64) -> Result<Self> {
        if lengthscales.is_empty() {
            return Err(Error::invalid("kernel needs at least one lengthscale"));
        }
        if let Some(bad) = lengthscales.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::invalid(format!("lengthscale must be positive, got {bad}")));
        }
        if !(signal_variance.is_finite() && signal_variance > 0.0) {
            return Err(Error::invalid(format!(
                "signal variance must be positive, got {signal_variance}"
            )));
        }
        Ok(KernelSpec {
            family,
            lengthscales,
            signal_variance,
        })
    }

    /// Squared exponential with unit signal variance.
    pub fn squared_exponential(lengthscales: Vec<f64>) -> Result<Self> {
        Self::new(KernelFamily::SquaredExponential, lengthscales, 1.0)
    }

    pub fn matern(nu: f64, lengthscales: Vec<f64>) -> Result<Self> {
        Self::new(KernelFamily::Matern(MaternOrder::from_nu(nu)?), lengthscales, 1.0)
    }

    /// Builds a kernel from the diagonal of `D` instead of lengthscales.
    pub fn from_anisotropy(family: KernelFamily, anisotropy: &[f64], signal_variance: f64) -> Result<Self> {
        if let Some(bad) = anisotropy.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::invalid(format!("anisotropy entries must be positive, got {bad}")));
        }
        let lengthscales = anisotropy.iter().map(|a| (0.5 / a).sqrt()).collect();
        Self::new(family, lengthscales, signal_variance)
    }

    pub fn with_signal_variance(mut self, signal_variance: f64) -> Result<Self> {
        if !(signal_variance.is_finite() && signal_variance > 0.0) {
            return Err(Error::invalid(format!(
                "signal variance must be positive, got {signal_variance}"
            )));
        }
        self.signal_variance = signal_variance;
        Ok(self)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }

    /// Diagonal of `D`.
    pub fn anisotropy(&self) -> Vec<f64> {
        self.lengthscales.iter().map(|l| 0.5 / (l * l)).collect()
    }

    /// Evaluates `κ(x, x')`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.eval_unchecked(x, y))
    }

    /// `eval` without the dimension check; callers guarantee matching lengths.
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        // q = (x − y)ᵀ D (x − y); the profile takes r = √(2q)
        let mut q = 0.0;
        for ((a, b), l) in x.iter().zip(y).zip(&self.lengthscales) {
            let t = (a - b) / l;
            q += 0.5 * t * t;
        }
        self.signal_variance * self.family.profile((2.0 * q).sqrt())
    }

    /// `κ(x, x)`, the same everywhere by stationarity.
    pub fn prior_variance(&self) -> f64 {
        self.signal_variance
    }

    pub fn gram_matrix(&self, points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        if points.is_empty() {
            return Err(Error::invalid("gram matrix of an empty point set"));
        }
        for p in points {
            check_dim(self.dim(), p.len())?;
        }
        Ok(self.gram_unchecked(points))
    }

    pub(crate) fn gram_unchecked(&self, points: &[Vec<f64>]) -> DMatrix<f64> {
        let n = points.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = self.signal_variance;
            for j in 0..i {
                let v = self.eval_unchecked(&points[i], &points[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    /// Gradient constant `L` with `L² = sup ∂_x ∂_x' κ(x, x')|_{x=x'}`.
    ///
    /// For `d > 1` this is the largest per-coordinate value, which is also the
    /// Euclidean Lipschitz constant since `D` is diagonal.
    pub fn derivative_bound_l(&self) -> f64 {
        (self.signal_variance * self.family.second_moment()).sqrt() / self.min_lengthscale()
    }

    /// Curvature constant `Q` with `Q² = κ̃''''(0)` along the worst coordinate.
    pub fn derivative_bound_q(&self) -> Result<f64> {
        // every supported family is four times differentiable at the origin;
        // the match keeps that explicit if rougher families are ever added
        match self.family {
            KernelFamily::SquaredExponential | KernelFamily::Matern(_) => {}
        }
        let l = self.min_lengthscale();
        Ok((self.signal_variance * self.family.fourth_moment()).sqrt() / (l * l))
    }

    pub fn derivative_bounds(&self) -> Result<DerivativeBounds> {
        Ok(DerivativeBounds {
            l: self.derivative_bound_l(),
            q: self.derivative_bound_q()?,
        })
    }

    fn min_lengthscale(&self) -> f64 {
        self.lengthscales.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// The pair of smoothness constants `(L, Q)` for a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBounds {
    pub l: f64,
    pub q: f64,
}

/// Serialized form used in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: FamilyName,
    pub lengthscales: Vec<f64>,
    #[serde(default = "one")]
    pub signal_variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    SquaredExponential,
    Matern,
}

fn one() -> f64 {
    1.0
}

impl KernelConfig {
    pub fn build(&self) -> Result<KernelSpec> {
        let family = match (self.family, self.nu) {
            (FamilyName::SquaredExponential, None) => KernelFamily::SquaredExponential,
            (FamilyName::SquaredExponential, Some(_)) => {
                return Err(Error::invalid("`nu` only applies to the matern family"))
            }
            (FamilyName::Matern, Some(nu)) => KernelFamily::Matern(MaternOrder::from_nu(nu)?),
            (FamilyName::Matern, None) => return Err(Error::invalid("matern kernel needs `nu`")),
        };
        KernelSpec::new(family, self.lengthscales.clone(), self.signal_variance)
    }
}

impl From<&KernelSpec> for KernelConfig {
    fn from(k: &KernelSpec) -> Self {
        let (family, nu) = match k.family {
            KernelFamily::SquaredExponential => (FamilyName::SquaredExponential, None),
            KernelFamily::Matern(order) => (FamilyName::Matern, Some(order.nu())),
        };
        KernelConfig {
            family,
            lengthscales: k.lengthscales.clone(),
            signal_variance: k.signal_variance,
            nu,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn se(l: f64) -> KernelSpec {
        KernelSpec::squared_exponential(vec![l]).unwrap()
    }

    /// 1D profile `u ↦ κ(u, 0)` used by the finite-difference oracles.
    fn profile_1d(k: &KernelSpec) -> impl Fn(f64) -> f64 + '_ {
        move |u| k.eval(&[u], &[0.0]).unwrap()
    }

    /// Repeated Richardson extrapolation over `h, h/2, h/4, h/8` removing
    /// error terms of order `h, h², h³`. Matérn profiles contain odd powers
    /// of `|r|`, so their difference quotients carry odd-order errors.
    fn richardson(d: &dyn Fn(f64) -> f64, h: f64) -> f64 {
        let mut table: Vec<f64> = (0..4).map(|i| d(h / 2f64.powi(i))).collect();
        for order in 1..4 {
            let w = 2f64.powi(order);
            table = table.windows(2).map(|p| (w * p[1] - p[0]) / (w - 1.0)).collect();
        }
        table[0]
    }

    /// `−κ̃''(0)` by central second differences.
    fn fd_second(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
        let d2 = |h: f64| -(f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        richardson(&d2, h)
    }

    /// `κ̃''''(0)` by central fourth differences.
    fn fd_fourth(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
        let d4 = |h: f64| (f(2.0 * h) - 4.0 * f(h) + 6.0 * f(0.0) - 4.0 * f(-h) + f(-2.0 * h)) / h.powi(4);
        richardson(&d4, h)
    }

    #[test]
    fn se_values() {
        let k = se(1.0);
        assert_eq!(k.anisotropy(), vec![0.5]);
        assert_eq!(k.eval(&[0.3], &[0.3]).unwrap(), 1.0);
        assert!((k.eval(&[0.0], &[1.0]).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((k.eval(&[0.0], &[1.0]).unwrap() - 0.606531).abs() < 1e-6);
    }

    #[test]
    fn matern_values() {
        let k = KernelSpec::matern(2.5, vec![1.0]).unwrap();
        assert_eq!(k.eval(&[0.0], &[0.0]).unwrap(), 1.0);
        let r: f64 = 0.7;
        let s5 = 5f64.sqrt();
        let want = (1.0 + s5 * r + 5.0 * r * r / 3.0) * (-s5 * r).exp();
        assert!((k.eval(&[0.0], &[r]).unwrap() - want).abs() < 1e-15);
        assert!(KernelSpec::matern(1.5, vec![1.0]).is_err());
        assert!(KernelSpec::matern(0.5, vec![1.0]).is_err());
    }

    #[test]
    fn anisotropy_round_trip() {
        let k = KernelSpec::from_anisotropy(KernelFamily::SquaredExponential, &[0.5, 2.0], 1.0).unwrap();
        assert!((k.lengthscales()[0] - 1.0).abs() < 1e-15);
        assert!((k.lengthscales()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        assert!(KernelSpec::squared_exponential(vec![0.0]).is_err());
        assert!(KernelSpec::squared_exponential(vec![]).is_err());
        assert!(se(1.0).with_signal_variance(-1.0).is_err());
        assert!(matches!(
            se(1.0).eval(&[0.0, 1.0], &[0.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn gram_examples() {
        let k = se(1.0).with_signal_variance(2.0).unwrap();
        let g = k.gram_matrix(&[vec![0.1]]).unwrap();
        assert_eq!(g[(0, 0)], 2.0);
        let g = k.gram_matrix(&[vec![0.4], vec![0.4]]).unwrap();
        assert!(g.iter().all(|v| *v == 2.0));
        let pts = vec![vec![0.0], vec![0.35], vec![1.2]];
        let g = k.gram_matrix(&pts).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g[(i, j)], k.eval(&pts[i], &pts[j]).unwrap());
            }
        }
    }

    #[test]
    fn derivative_constants_match_finite_differences() {
        let kernels = [
            se(1.0),
            se(0.5),
            se(2.0),
            KernelSpec::matern(2.5, vec![1.0]).unwrap(),
            KernelSpec::matern(2.5, vec![0.7]).unwrap(),
            KernelSpec::matern(3.5, vec![1.3]).unwrap(),
            se(0.8).with_signal_variance(3.0).unwrap(),
        ];
        for k in &kernels {
            let f = profile_1d(k);
            let ell = k.lengthscales()[0];
            let l_fd = fd_second(&f, 1e-2 * ell).sqrt();
            let q_fd = fd_fourth(&f, 8e-2 * ell).sqrt();
            let l = k.derivative_bound_l();
            let q = k.derivative_bound_q().unwrap();
            assert!((l - l_fd).abs() / l < 1e-4, "{k:?}: L {l} vs {l_fd}");
            assert!((q - q_fd).abs() / q < 1e-4, "{k:?}: Q {q} vs {q_fd}");
        }
    }

    #[test]
    fn se_derivative_closed_forms() {
        assert!((se(1.0).derivative_bound_l() - 1.0).abs() < 1e-15);
        assert!((se(0.5).derivative_bound_l() - 2.0).abs() < 1e-15);
        assert!((se(2.0).derivative_bound_l() - 0.5).abs() < 1e-15);
        assert!((se(1.0).derivative_bound_q().unwrap() - 1.732051).abs() < 1e-6);
        assert!((se(0.5).derivative_bound_q().unwrap() - 4.0 * 3f64.sqrt()).abs() < 1e-12);
        let s = 4.0;
        let scaled = se(0.5).with_signal_variance(s).unwrap();
        assert!((scaled.derivative_bound_l() - 2.0 * se(0.5).derivative_bound_l()).abs() < 1e-12);
        assert!((scaled.derivative_bound_q().unwrap() - 2.0 * se(0.5).derivative_bound_q().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn multi_dim_constants_use_shortest_lengthscale() {
        let k = KernelSpec::squared_exponential(vec![1.0, 0.25, 0.5]).unwrap();
        assert!((k.derivative_bound_l() - 4.0).abs() < 1e-12);
        assert!((k.derivative_bound_q().unwrap() - 16.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn config_round_trip() {
        let k = KernelSpec::matern(3.5, vec![0.2, 0.4]).unwrap();
        let cfg = KernelConfig::from(&k);
        assert_eq!(cfg.build().unwrap(), k);
        let bad: std::result::Result<KernelConfig, _> =
            serde_json::from_str(r#"{"family":"matern","lengthscales":[1],"nu":2.5,"extra":1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn random_gram_matrices_are_psd() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        for case in 0..40 {
            let d = 1 + case % 3;
            let n = 2 + (case * 7) % 49;
            let ls: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.5)).collect();
            let fam = match case % 3 {
                0 => KernelFamily::SquaredExponential,
                1 => KernelFamily::Matern(MaternOrder::FiveHalves),
                _ => KernelFamily::Matern(MaternOrder::SevenHalves),
            };
            let s = rng.random_range(0.5..3.0);
            let k = KernelSpec::new(fam, ls, s).unwrap();
            let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
            let eig = SymmetricEigen::new(k.gram_matrix(&pts).unwrap());
            let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-8 * s, "case {case}: min eigenvalue {min}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn symmetric_and_bounded_by_diagonal(
            x in prop::collection::vec(-3.0f64..3.0, 2),
            y in prop::collection::vec(-3.0f64..3.0, 2),
            l0 in 0.05f64..2.0,
            l1 in 0.05f64..2.0,
            which in 0usize..3,
        ) {
            let fam = [
                KernelFamily::SquaredExponential,
                KernelFamily::Matern(MaternOrder::FiveHalves),
                KernelFamily::Matern(MaternOrder::SevenHalves),
            ][which];
            let k = KernelSpec::new(fam, vec![l0, l1], 1.7).unwrap();
            let a = k.eval(&x, &y).unwrap();
            prop_assert_eq!(a, k.eval(&y, &x).unwrap());
            prop_assert!(a <= k.eval(&x, &x).unwrap());
            prop_assert!(a.abs() <= k.prior_variance());
        }
    }
}
