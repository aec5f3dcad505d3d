//! Gauss-Markov source model `x_{t+1} = A x_t + w_t`, `w_t ~ N(0, Σ_w)`,
//! `x_0 ~ N(0, Σ_x0)`, and the spectral utilities shared by the solvers.

use crate::error::{mismatch, Error, Result};
use crate::linalg::{self, Mat};
use crate::scalar::{cast, Real};

/// Relative Frobenius asymmetry below which covariances are symmetrized.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

const LYAPUNOV_TOLERANCE: f64 = 1e-12;
const LYAPUNOV_MAX_ITERS: usize = 100_000;

/// A validated time-invariant Gauss-Markov source.
///
/// Both covariances are exactly symmetric and positive definite; `A` is
/// `p × p`. Construct with [`GaussMarkovModel::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussMarkovModel<T: Real> {
    a: Mat<T>,
    sigma_w: Mat<T>,
    sigma_x0: Mat<T>,
}

impl<T: Real> GaussMarkovModel<T> {
    /// Validates a raw model.
    ///
    /// Covariances whose relative asymmetry is at most [`SYMMETRY_TOLERANCE`]
    /// are replaced by `(M + Mᵀ)/2`; larger asymmetry is rejected.
    pub fn new(p: usize, a: Mat<T>, sigma_w: Mat<T>, sigma_x0: Mat<T>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("state dimension p must be positive".into()));
        }
        for (name, m) in [("A", &a), ("sigma_w", &sigma_w), ("sigma_x0", &sigma_x0)] {
            if m.nrows() != p || m.ncols() != p {
                return Err(mismatch(
                    name,
                    format!("{p}x{p}"),
                    format!("{}x{}", m.nrows(), m.ncols()),
                ));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { which: name.into() });
            }
        }
        let sigma_w = checked_covariance("sigma_w", sigma_w)?;
        let sigma_x0 = checked_covariance("sigma_x0", sigma_x0)?;
        Ok(Self { a, sigma_w, sigma_x0 })
    }

    /// Re-validates an existing model. The result is bit-identical to `self`.
    pub fn revalidate(&self) -> Result<Self> {
        Self::new(self.dim(), self.a.clone(), self.sigma_w.clone(), self.sigma_x0.clone())
    }

    /// Scalar source `x_{t+1} = a x_t + w_t`.
    pub fn scalar(a: T, sigma_w: T, sigma_x0: T) -> Result<Self> {
        Self::new(
            1,
            Mat::from_element(1, 1, a),
            Mat::from_element(1, 1, sigma_w),
            Mat::from_element(1, 1, sigma_x0),
        )
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Mat<T> {
        &self.a
    }

    pub fn sigma_w(&self) -> &Mat<T> {
        &self.sigma_w
    }

    pub fn sigma_x0(&self) -> &Mat<T> {
        &self.sigma_x0
    }

    /// `A X Aᵀ + Σ_w`, symmetrized.
    pub fn predict(&self, x: &Mat<T>) -> Mat<T> {
        linalg::symmetrize(&(&self.a * x * self.a.transpose() + &self.sigma_w))
    }

    /// `Aᵀ Σ_w⁻¹ A`, the information the dynamics add to a posterior inverse.
    pub fn dynamics_information(&self) -> Mat<T> {
        let w_inv = linalg::spd_inverse(&self.sigma_w).expect("validated sigma_w is positive definite");
        linalg::symmetrize(&(self.a.transpose() * w_inv * &self.a))
    }

    pub fn spectral_summary(&self) -> SpectralSummary<T> {
        SpectralSummary::of(&self.a)
    }
}

fn checked_covariance<T: Real>(name: &str, m: Mat<T>) -> Result<Mat<T>> {
    let asym = linalg::relative_asymmetry(&m);
    if asym > cast(SYMMETRY_TOLERANCE) {
        return Err(Error::NotSymmetric {
            which: name.into(),
            asymmetry: crate::scalar::to_f64(asym),
        });
    }
    let m = if asym > T::zero() { linalg::symmetrize(&m) } else { m };
    if !linalg::is_positive_definite(&m) || linalg::min_eigenvalue(&m) <= T::zero() {
        return Err(Error::NotPositiveDefinite { which: name.into() });
    }
    Ok(m)
}

/// Eigenvalue moduli of `A` and the unstable-mode entropy `Σ_{|λ|>1} log|λ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary<T: Real> {
    pub eigenvalue_magnitudes: Vec<T>,
    /// Nats.
    pub unstable_log_sum: T,
    pub is_stable: bool,
}

impl<T: Real> SpectralSummary<T> {
    pub fn of(a: &Mat<T>) -> Self {
        let eigenvalue_magnitudes = linalg::eigenvalue_magnitudes(a);
        let unstable_log_sum = eigenvalue_magnitudes
            .iter()
            .filter(|&&m| m > T::one())
            .fold(T::zero(), |acc, &m| acc + m.ln());
        let is_stable = eigenvalue_magnitudes.iter().all(|&m| m < T::one());
        Self {
            eigenvalue_magnitudes,
            unstable_log_sum,
            is_stable,
        }
    }
}

/// Lower bound on any achievable rate: the sum of `log|λ_i(A)|` over modes
/// with modulus strictly above one (nats). Modulus exactly one contributes
/// nothing.
pub fn unstable_rate_lower_bound<T: Real>(model: &GaussMarkovModel<T>) -> T {
    model.spectral_summary().unstable_log_sum
}

/// Outcome of [`stationary_state_covariance`].
#[derive(Debug, Clone, PartialEq)]
pub enum StationaryCovariance<T: Real> {
    /// Unique solution of `Σ = A Σ Aᵀ + Σ_w`.
    Converged(Mat<T>),
    /// `A` has a mode of modulus at least one; the state variance grows without bound.
    Divergent,
}

impl<T: Real> StationaryCovariance<T> {
    pub fn converged(self) -> Option<Mat<T>> {
        match self {
            Self::Converged(m) => Some(m),
            Self::Divergent => None,
        }
    }
}

/// Stationary state covariance by fixed-point iteration of
/// `Σ ← A Σ Aᵀ + Σ_w` started from `Σ_w`.
///
/// Stops when the relative Frobenius change drops to 1e-12. A stable `A`
/// whose spectral radius is too close to one to settle within 100000
/// iterations yields [`Error::FixedPointNonConvergence`].
pub fn stationary_state_covariance<T: Real>(model: &GaussMarkovModel<T>) -> Result<StationaryCovariance<T>> {
    if !model.spectral_summary().is_stable {
        return Ok(StationaryCovariance::Divergent);
    }
    let tol = cast::<T>(LYAPUNOV_TOLERANCE).max(T::default_epsilon() * cast(4.0));
    let mut sigma = model.sigma_w().clone();
    let mut change = T::max_value().unwrap_or(T::one());
    for _ in 0..LYAPUNOV_MAX_ITERS {
        let next = model.predict(&sigma);
        let norm = linalg::frobenius(&next);
        if !norm.is_finite() {
            return Ok(StationaryCovariance::Divergent);
        }
        change = linalg::frobenius(&(&next - &sigma)) / norm;
        sigma = next;
        if change <= tol {
            return Ok(StationaryCovariance::Converged(sigma));
        }
    }
    Err(Error::FixedPointNonConvergence {
        iterations: LYAPUNOV_MAX_ITERS,
        last_change: crate::scalar::to_f64(change),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> Mat<f64> {
        Mat::from_diagonal(&nalgebra::DVector::from_column_slice(values))
    }

    fn eye(p: usize) -> Mat<f64> {
        Mat::identity(p, p)
    }

    #[test]
    fn unstable_counterexample_model_is_valid() {
        let m = GaussMarkovModel::new(2, diag(&[6.0, 1.0]), eye(2), eye(2)).unwrap();
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn rejects_indefinite_noise() {
        let err = GaussMarkovModel::new(2, eye(2), diag(&[1.0, -1.0]), eye(2)).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { which: "sigma_w".into() });
    }

    #[test]
    fn rejects_indefinite_initial_covariance() {
        let err = GaussMarkovModel::new(2, eye(2), eye(2), diag(&[0.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { which: "sigma_x0".into() });
    }

    #[test]
    fn rejects_rectangular_dynamics() {
        let a = Mat::<f64>::zeros(2, 3);
        assert!(matches!(
            GaussMarkovModel::new(2, a, eye(2), eye(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_asymmetric_covariance() {
        let w = Mat::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            GaussMarkovModel::new(2, eye(2), w, eye(2)),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn symmetrizes_tiny_asymmetry() {
        let w = Mat::from_row_slice(2, 2, &[1.0, 0.2 + 1e-12, 0.2, 1.0]);
        let m = GaussMarkovModel::new(2, eye(2), w, eye(2)).unwrap();
        assert_eq!(m.sigma_w()[(0, 1)], m.sigma_w()[(1, 0)]);
    }

    #[test]
    fn rejects_non_finite() {
        let a = Mat::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(
            GaussMarkovModel::new(1, a, eye(1), eye(1)),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn lower_bound_examples() {
        let zero = GaussMarkovModel::new(2, Mat::zeros(2, 2), eye(2), eye(2)).unwrap();
        assert_eq!(unstable_rate_lower_bound(&zero), 0.0);
        let fig1 = GaussMarkovModel::new(2, diag(&[6.0, 1.0]), eye(2), eye(2)).unwrap();
        assert!((unstable_rate_lower_bound(&fig1) - 6f64.ln()).abs() < 1e-12);
        let both = GaussMarkovModel::new(2, diag(&[2.0, 3.0]), eye(2), eye(2)).unwrap();
        assert!((unstable_rate_lower_bound(&both) - 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn stationary_covariance_examples() {
        let zero = GaussMarkovModel::new(2, Mat::zeros(2, 2), eye(2), eye(2)).unwrap();
        assert_eq!(stationary_state_covariance(&zero).unwrap(), StationaryCovariance::Converged(eye(2)));

        let half = GaussMarkovModel::<f64>::scalar(0.5, 1.0, 1.0).unwrap();
        let s = stationary_state_covariance(&half).unwrap().converged().unwrap();
        assert!((s[(0, 0)] - 4.0 / 3.0).abs() < 1e-11);

        let fig1 = GaussMarkovModel::new(2, diag(&[6.0, 1.0]), eye(2), eye(2)).unwrap();
        assert_eq!(stationary_state_covariance(&fig1).unwrap(), StationaryCovariance::Divergent);
    }

    #[test]
    fn near_marginal_mode_hits_iteration_cap() {
        let slow = GaussMarkovModel::scalar(1.0 - 1e-7, 1.0, 1.0).unwrap();
        assert!(matches!(
            stationary_state_covariance(&slow),
            Err(Error::FixedPointNonConvergence { .. })
        ));
    }

    #[test]
    fn single_precision_model() {
        let m = GaussMarkovModel::<f32>::scalar(0.5, 1.0, 1.0).unwrap();
        let s = stationary_state_covariance(&m).unwrap().converged().unwrap();
        assert!((s[(0, 0)] - 4.0 / 3.0).abs() < 1e-5);
    }
}
