//! Analytic rate-distortion expressions.
//!
//! * [`srd_scalar`]: the sequential rate-distortion function of a scalar
//!   Gauss-Markov source, `max{0, ½ log(a² + σ_w/D)}`.
//! * [`srd_rwf_vector`]: the dynamic reverse-water-filling expression
//!   `½ log det(AAᵀ + (p/D) Σ_w)` that was published for vector sources.
//!   **It is not the sequential rate-distortion function** unless `A = 0`;
//!   it is kept here so the two can be compared.
//! * [`iid_waterfilling`]: classical reverse water-filling for a memoryless
//!   Gaussian vector.
//! * [`counterexample_report`]: the two-mode family `A = diag(a, 0)` on which
//!   the vector expression violates the split-distortion upper bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::model::GaussMarkovModel;
use crate::scalar::{cast, to_f64, Real};

/// Margin by which the vector expression must exceed the split bound to count
/// as a contradiction.
pub const CONTRADICTION_TOLERANCE: f64 = 1e-12;

const WATER_LEVEL_TOLERANCE: f64 = 1e-12;

/// `max{0, ½ log(a² + σ_w / D)}` in nats.
pub fn srd_scalar<T: Real>(a: T, sigma_w: T, distortion: T) -> Result<T> {
    if !(sigma_w > T::zero()) {
        return Err(Error::InvalidArgument(format!("sigma_w must be positive, got {sigma_w}")));
    }
    if !(distortion > T::zero()) {
        return Err(Error::InvalidArgument(format!("distortion must be positive, got {distortion}")));
    }
    let half: T = cast(0.5);
    Ok((half * (a * a + sigma_w / distortion).ln()).max(T::zero()))
}

/// Value of the published vector expression together with its claimed
/// low-distortion validity region `D/p ≤ min_i λ_i((D/p) AAᵀ + Σ_w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RwfEvaluation<T> {
    pub rate: T,
    pub valid_region: bool,
}

/// The (incorrect) dynamic reverse-water-filling rate `½ log det(AAᵀ + (p/D) Σ_w)`.
///
/// The rate is returned outside the validity region too, flagged
/// `valid_region = false`, so the published curve can be drawn in full.
pub fn srd_rwf_vector<T: Real>(model: &GaussMarkovModel<T>, distortion: T) -> Result<RwfEvaluation<T>> {
    if !(distortion > T::zero()) {
        return Err(Error::InvalidArgument(format!("distortion must be positive, got {distortion}")));
    }
    let p: T = cast(model.dim() as f64);
    let aat = model.a() * model.a().transpose();
    let half: T = cast(0.5);
    let inner = linalg::symmetrize(&(&aat + model.sigma_w() * (p / distortion)));
    let rate = half
        * linalg::logdet(&inner).ok_or_else(|| Error::NotPositiveDefinite {
            which: "AAᵀ + (p/D)Σ_w".into(),
        })?;
    let per_mode = distortion / p;
    let region = linalg::symmetrize(&(aat * per_mode + model.sigma_w()));
    let slack: T = cast(1e-12);
    let valid_region = per_mode <= linalg::min_eigenvalue(&region) * (T::one() + slack);
    Ok(RwfEvaluation { rate, valid_region })
}

/// Reverse water-filling allocation for a memoryless Gaussian vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaterfillingSolution<T> {
    /// Water level θ.
    pub theta: T,
    /// `min(θ, σ_i)` for each source eigenvalue, ascending in `σ_i`.
    pub per_mode_distortions: Vec<T>,
    /// Nats.
    pub rate: T,
}

/// Classical reverse water-filling on the eigenvalues `σ_i` of `source_cov`.
///
/// Finds θ with `Σ min(θ, σ_i) = min(D, tr Σ)` by bisection on `(0, max σ_i]`,
/// then pins it exactly from the active set. Rate is `Σ max{0, ½ log(σ_i/θ)}`.
pub fn iid_waterfilling<T: Real>(source_cov: &Mat<T>, distortion: T) -> Result<WaterfillingSolution<T>> {
    if !(distortion > T::zero()) {
        return Err(Error::InvalidArgument(format!("distortion must be positive, got {distortion}")));
    }
    if source_cov.nrows() != source_cov.ncols() || source_cov.nrows() == 0 {
        return Err(Error::InvalidArgument("source covariance must be square and non-empty".into()));
    }
    let (sigmas, _) = linalg::sym_eigen(source_cov);
    if sigmas[0] <= T::zero() {
        return Err(Error::NotPositiveDefinite { which: "source covariance".into() });
    }
    let total = sigmas.iter().fold(T::zero(), |acc, &s| acc + s);
    let top = *sigmas.last().expect("non-empty");
    let allotted = |theta: T| sigmas.iter().fold(T::zero(), |acc, &s| acc + theta.min(s));

    let theta = if distortion >= total {
        top
    } else {
        let (mut lo, mut hi) = (T::zero(), top);
        let tol: T = cast(WATER_LEVEL_TOLERANCE);
        let half: T = cast(0.5);
        while hi - lo > tol {
            let mid = (lo + hi) * half;
            if mid <= lo || mid >= hi {
                break;
            }
            if allotted(mid) < distortion {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let approx = (lo + hi) * half;
        // Modes strictly above the approximate level share the remaining budget evenly.
        let (active, inactive_sum) = sigmas.iter().fold((0usize, T::zero()), |(n, s), &sigma| {
            if sigma > approx {
                (n + 1, s)
            } else {
                (n, s + sigma)
            }
        });
        if active > 0 {
            let exact = (distortion - inactive_sum) / cast(active as f64);
            if (exact - approx).abs() <= tol * cast(4.0) {
                exact
            } else {
                approx
            }
        } else {
            approx
        }
    };
    let half: T = cast(0.5);
    let per_mode_distortions: Vec<T> = sigmas.iter().map(|&s| theta.min(s)).collect();
    let rate = sigmas
        .iter()
        .fold(T::zero(), |acc, &s| acc + (half * (s / theta).ln()).max(T::zero()));
    Ok(WaterfillingSolution {
        theta,
        per_mode_distortions,
        rate,
    })
}

/// Comparison of the vector expression against the split-distortion bound on
/// `A = diag(a, 0)`, `Σ_w = I₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub a: f64,
    pub distortion: f64,
    pub split: (f64, f64),
    /// Vector expression at `D` (nats).
    pub lhs_rate: f64,
    /// `R₁(D₁) + R₂(D₂)` from the scalar formula (nats).
    pub rhs_rate: f64,
    /// `lhs_rate − rhs_rate > 1e-12`.
    pub contradiction: bool,
}

/// The two-mode source `A = diag(a, 0)`, `Σ_w = Σ_x0 = I₂`.
pub fn counterexample_model<T: Real>(a: T) -> Result<GaussMarkovModel<T>> {
    let mut dynamics = Mat::zeros(2, 2);
    dynamics[(0, 0)] = a;
    GaussMarkovModel::new(2, dynamics, Mat::identity(2, 2), Mat::identity(2, 2))
}

/// Evaluates both sides of `R(D) ≤ R₁(D₁) + R₂(D₂)` with `R(D)` taken from
/// the vector expression. `D₁ + D₂` must equal `D` to relative 1e-9.
pub fn counterexample_report<T: Real>(a: T, distortion: T, split: (T, T)) -> Result<CounterexampleReport> {
    let (d1, d2) = split;
    if !(d1 > T::zero() && d2 > T::zero()) {
        return Err(Error::InvalidArgument("split distortions must be positive".into()));
    }
    let scale = T::one().max(distortion.abs());
    if (d1 + d2 - distortion).abs() > cast::<T>(1e-9) * scale {
        return Err(Error::InvalidArgument(format!(
            "split ({d1}, {d2}) does not sum to D = {distortion}"
        )));
    }
    let lhs = srd_rwf_vector(&counterexample_model(a)?, distortion)?.rate;
    let rhs = srd_scalar(a, T::one(), d1)? + srd_scalar(T::zero(), T::one(), d2)?;
    let gap = to_f64(lhs) - to_f64(rhs);
    Ok(CounterexampleReport {
        a: to_f64(a),
        distortion: to_f64(distortion),
        split: (to_f64(d1), to_f64(d2)),
        lhs_rate: to_f64(lhs),
        rhs_rate: to_f64(rhs),
        contradiction: gap > CONTRADICTION_TOLERANCE,
    })
}
