//! Linear-Gaussian sensors that realize a solved covariance schedule, and
//! the Kalman/Riccati recursions that run them.
//!
//! Given posterior covariances `P_t` with prediction covariances
//! `Π_t = AP_{t−1}Aᵀ + Σ_w` (`Π_0 = Σ_x0`), the sensor at step `t` must add
//! information `M_t = P_t⁻¹ − Π_t⁻¹ ⪰ 0`. Any `E_t`, `Σ_z,t ≻ 0` with
//! `E_tᵀ Σ_z,t⁻¹ E_t = M_t` works; we take the eigenvectors of `M_t` with
//! non-negligible eigenvalues as the rows of `E_t` and the reciprocal
//! eigenvalues as the diagonal of `Σ_z,t`.

use crate::error::{mismatch, Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::model::GaussMarkovModel;
use crate::scalar::{cast, to_f64, Real};

/// Eigenvalues of `M_t` below this are treated as evidence of an inconsistent schedule.
pub const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-6;
/// Eigenvalues below this fraction of `σ_max(M_t)` are truncated.
pub const RELATIVE_RANK_THRESHOLD: f64 = 1e-9;
/// Eigenvalues below this fraction of `σ_max(P_t⁻¹)` are truncated as well.
pub const ABSOLUTE_RANK_THRESHOLD: f64 = 1e-8;
/// Relative change below which a Riccati recursion counts as settled.
pub const SETTLE_TOLERANCE: f64 = 1e-10;

/// One measurement `p_t = E x_t + z_t`, `z_t ~ N(0, Σ_z)`. `E` is `m × p`;
/// `m = 0` means no measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorStep<T: Real> {
    pub e: Mat<T>,
    pub sigma_z: Mat<T>,
}

impl<T: Real> SensorStep<T> {
    pub fn empty(p: usize) -> Self {
        Self {
            e: Mat::zeros(0, p),
            sigma_z: Mat::zeros(0, 0),
        }
    }

    pub fn rank(&self) -> usize {
        self.e.nrows()
    }

    /// `Eᵀ Σ_z⁻¹ E`.
    pub fn information(&self) -> Result<Mat<T>> {
        let p = self.e.ncols();
        if self.rank() == 0 {
            return Ok(Mat::zeros(p, p));
        }
        let z_inv = linalg::spd_inverse(&self.sigma_z).ok_or_else(|| Error::NotPositiveDefinite {
            which: "sigma_z".into(),
        })?;
        Ok(linalg::symmetrize(&(self.e.transpose() * z_inv * &self.e)))
    }
}

/// A sequence of sensors, one per time step. A stationary realization holds
/// a single step that repeats forever.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorRealization<T: Real> {
    pub steps: Vec<SensorStep<T>>,
    pub stationary: bool,
}

impl<T: Real> SensorRealization<T> {
    pub fn ranks(&self) -> Vec<usize> {
        self.steps.iter().map(SensorStep::rank).collect()
    }

    pub fn dim(&self) -> usize {
        self.steps.first().map_or(0, |s| s.e.ncols())
    }

    /// Sensor in effect at step `t`.
    pub fn step(&self, t: usize) -> Result<&SensorStep<T>> {
        if self.stationary {
            return self.steps.first().ok_or(Error::HorizonTooLong { horizon: t + 1, length: 0 });
        }
        self.steps.get(t).ok_or(Error::HorizonTooLong {
            horizon: t + 1,
            length: self.steps.len(),
        })
    }

    /// Checks shapes against a model of dimension `p`.
    pub fn check(&self, p: usize) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::InvalidArgument("realization has no steps".into()));
        }
        if self.stationary && self.steps.len() != 1 {
            return Err(mismatch("stationary realization steps", 1, self.steps.len()));
        }
        for (t, s) in self.steps.iter().enumerate() {
            let m = s.rank();
            if s.e.ncols() != p {
                return Err(mismatch(&format!("E[{t}] columns"), p, s.e.ncols()));
            }
            if s.sigma_z.nrows() != m || s.sigma_z.ncols() != m {
                return Err(mismatch(
                    &format!("sigma_z[{t}]"),
                    format!("{m}x{m}"),
                    format!("{}x{}", s.sigma_z.nrows(), s.sigma_z.ncols()),
                ));
            }
            if m > 0 && !linalg::is_positive_definite(&s.sigma_z) {
                return Err(Error::NotPositiveDefinite {
                    which: format!("sigma_z[{t}]"),
                });
            }
        }
        Ok(())
    }
}

/// Filter covariances and gain at one step, with the current estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState<T: Real> {
    /// `P_{t|t−1}`.
    pub p_pred: Mat<T>,
    /// `P_{t|t}`.
    pub p_post: Mat<T>,
    /// `L_t`, `p × m_t`.
    pub gain: Mat<T>,
    /// `y_t = E[x_t | p_0, …, p_t]`.
    pub estimate: Vector<T>,
}

impl<T: Real> KalmanState<T> {
    /// Processes the step-0 measurement against the prior `N(0, Σ_x0)`.
    pub fn start(model: &GaussMarkovModel<T>, sensor: &SensorStep<T>, measurement: &Vector<T>) -> Result<Self> {
        let p = model.dim();
        Self::update(model.sigma_x0().clone(), Vector::zeros(p), sensor, measurement)
    }

    /// Predicts one step through the dynamics and processes `measurement`.
    pub fn next(&self, model: &GaussMarkovModel<T>, sensor: &SensorStep<T>, measurement: &Vector<T>) -> Result<Self> {
        let p_pred = riccati_predict(&self.p_post, model);
        Self::update(p_pred, model.a() * &self.estimate, sensor, measurement)
    }

    fn update(p_pred: Mat<T>, predicted: Vector<T>, sensor: &SensorStep<T>, measurement: &Vector<T>) -> Result<Self> {
        if measurement.len() != sensor.rank() {
            return Err(mismatch("measurement", sensor.rank(), measurement.len()));
        }
        let (p_post, gain) = riccati_correct(&p_pred, &sensor.e, &sensor.sigma_z)?;
        let estimate = correct_estimate(&predicted, &gain, &sensor.e, measurement);
        Ok(Self {
            p_pred,
            p_post,
            gain,
            estimate,
        })
    }
}

/// `y = ŷ + L (p − E ŷ)`.
pub fn correct_estimate<T: Real>(predicted: &Vector<T>, gain: &Mat<T>, e: &Mat<T>, measurement: &Vector<T>) -> Vector<T> {
    if e.nrows() == 0 {
        return predicted.clone();
    }
    predicted + gain * (measurement - e * predicted)
}

/// `A P_post Aᵀ + Σ_w`, symmetrized.
pub fn riccati_predict<T: Real>(p_post: &Mat<T>, model: &GaussMarkovModel<T>) -> Mat<T> {
    model.predict(p_post)
}

/// Measurement update in information form, `P_post = (P_pred⁻¹ + EᵀΣ_z⁻¹E)⁻¹`,
/// with gain `L = P_pred Eᵀ (E P_pred Eᵀ + Σ_z)⁻¹`.
pub fn riccati_correct<T: Real>(p_pred: &Mat<T>, e: &Mat<T>, sigma_z: &Mat<T>) -> Result<(Mat<T>, Mat<T>)> {
    let p = p_pred.nrows();
    let m = e.nrows();
    if p_pred.ncols() != p {
        return Err(mismatch("P_pred", "square", format!("{}x{}", p, p_pred.ncols())));
    }
    if e.ncols() != p {
        return Err(mismatch("E columns", p, e.ncols()));
    }
    if sigma_z.nrows() != m || sigma_z.ncols() != m {
        return Err(mismatch("sigma_z", format!("{m}x{m}"), format!("{}x{}", sigma_z.nrows(), sigma_z.ncols())));
    }
    if m == 0 {
        return Ok((p_pred.clone(), Mat::zeros(p, 0)));
    }
    let innovation = linalg::symmetrize(&(e * p_pred * e.transpose() + sigma_z));
    let innovation_inv = linalg::spd_inverse(&innovation).ok_or(Error::SingularInnovation)?;
    let gain = p_pred * e.transpose() * innovation_inv;

    let pred_inv = linalg::spd_inverse(p_pred).ok_or_else(|| Error::NotPositiveDefinite { which: "P_pred".into() })?;
    let z_inv = linalg::spd_inverse(sigma_z).ok_or(Error::SingularInnovation)?;
    let info = pred_inv + e.transpose() * z_inv * e;
    let p_post = linalg::spd_inverse(&linalg::symmetrize(&info)).ok_or(Error::SingularInnovation)?;
    Ok((p_post, gain))
}

/// Factors `M = P_post⁻¹ − P_pred⁻¹` into a canonical sensor.
pub fn sensor_for_step<T: Real>(p_pred: &Mat<T>, p_post: &Mat<T>, step: usize) -> Result<SensorStep<T>> {
    let p = p_post.nrows();
    let post_inv = linalg::spd_inverse(p_post).ok_or_else(|| Error::NotPositiveDefinite {
        which: format!("P[{step}]"),
    })?;
    let pred_inv = linalg::spd_inverse(p_pred).ok_or_else(|| Error::NotPositiveDefinite {
        which: format!("prediction covariance at step {step}"),
    })?;
    let m = linalg::symmetrize(&(&post_inv - pred_inv));
    let (vals, vecs) = linalg::sym_eigen(&m);
    let lowest = vals.first().copied().unwrap_or(T::zero());
    if lowest < cast(-NEGATIVE_EIGENVALUE_TOLERANCE) {
        return Err(Error::InconsistentCovariances {
            step,
            eigenvalue: to_f64(lowest),
        });
    }
    let largest = vals.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let threshold = (largest * cast(RELATIVE_RANK_THRESHOLD))
        .max(linalg::max_eigenvalue(&post_inv) * cast(ABSOLUTE_RANK_THRESHOLD));
    // strongest directions first
    let kept: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > threshold).collect();
    if kept.is_empty() {
        return Ok(SensorStep::empty(p));
    }
    let e = Mat::from_fn(kept.len(), p, |r, c| {
        let col = vecs.column(kept[r]);
        col[c] * orientation(col.iter().copied())
    });
    let sigma_z = Mat::from_fn(kept.len(), kept.len(), |r, c| {
        if r == c {
            T::one() / vals[kept[r]]
        } else {
            T::zero()
        }
    });
    Ok(SensorStep { e, sigma_z })
}

/// Sign that makes the largest-magnitude entry (first on ties) positive.
fn orientation<T: Real>(entries: impl Iterator<Item = T>) -> T {
    let mut best = T::zero();
    for x in entries {
        if x.abs() > best.abs() {
            best = x;
        }
    }
    if best < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

fn check_schedule<T: Real>(model: &GaussMarkovModel<T>, p_seq: &[Mat<T>]) -> Result<()> {
    if p_seq.is_empty() {
        return Err(Error::InvalidArgument("empty covariance schedule".into()));
    }
    let p = model.dim();
    for (t, m) in p_seq.iter().enumerate() {
        if m.nrows() != p || m.ncols() != p {
            return Err(mismatch(&format!("P[{t}]"), format!("{p}x{p}"), format!("{}x{}", m.nrows(), m.ncols())));
        }
    }
    Ok(())
}

/// Prediction covariances `Σ_x0, AP_0Aᵀ+Σ_w, …` matching `p_seq`.
pub fn prediction_covariances<T: Real>(model: &GaussMarkovModel<T>, p_seq: &[Mat<T>]) -> Vec<Mat<T>> {
    std::iter::once(model.sigma_x0().clone())
        .chain(p_seq.iter().take(p_seq.len().saturating_sub(1)).map(|p| model.predict(p)))
        .collect()
}

/// One sensor per step of a finite-horizon schedule.
pub fn sensor_from_covariances<T: Real>(model: &GaussMarkovModel<T>, p_seq: &[Mat<T>]) -> Result<SensorRealization<T>> {
    check_schedule(model, p_seq)?;
    let steps = prediction_covariances(model, p_seq)
        .iter()
        .zip(p_seq)
        .enumerate()
        .map(|(t, (pred, post))| sensor_for_step(pred, post, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(SensorRealization {
        steps,
        stationary: false,
    })
}

/// The time-invariant sensor that holds `P` fixed: `M = P⁻¹ − (APAᵀ+Σ_w)⁻¹`.
pub fn stationary_sensor<T: Real>(model: &GaussMarkovModel<T>, p: &Mat<T>) -> Result<SensorRealization<T>> {
    check_schedule(model, std::slice::from_ref(p))?;
    Ok(SensorRealization {
        steps: vec![sensor_for_step(&model.predict(p), p, 0)?],
        stationary: true,
    })
}

/// Per-step information `½ log det Π_t − ½ log det P_t` (nats).
pub fn information_rate_from_covariances<T: Real>(model: &GaussMarkovModel<T>, p_seq: &[Mat<T>]) -> Result<Vec<T>> {
    check_schedule(model, p_seq)?;
    let half: T = cast(0.5);
    prediction_covariances(model, p_seq)
        .iter()
        .zip(p_seq)
        .enumerate()
        .map(|(t, (pred, post))| {
            let lp = linalg::logdet(pred).ok_or_else(|| Error::NotPositiveDefinite {
                which: format!("prediction covariance at step {t}"),
            })?;
            let lq = linalg::logdet(post).ok_or_else(|| Error::NotPositiveDefinite {
                which: format!("P[{t}]"),
            })?;
            Ok(half * (lp - lq))
        })
        .collect()
}

/// `½ log det(APAᵀ+Σ_w) − ½ log det P`.
pub fn stationary_information_rate<T: Real>(model: &GaussMarkovModel<T>, p: &Mat<T>) -> Result<T> {
    let half: T = cast(0.5);
    let lp = linalg::logdet(&model.predict(p)).ok_or_else(|| Error::NotPositiveDefinite { which: "prediction".into() })?;
    let lq = linalg::logdet(p).ok_or_else(|| Error::NotPositiveDefinite { which: "P".into() })?;
    Ok(half * (lp - lq))
}

/// Covariances and gain at one step of the filter, without an estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterStep<T: Real> {
    pub p_pred: Mat<T>,
    pub p_post: Mat<T>,
    pub gain: Mat<T>,
}

/// Runs the Riccati recursion from `Σ_x0` through `horizon` steps of `realization`.
pub fn filter_schedule<T: Real>(
    model: &GaussMarkovModel<T>,
    realization: &SensorRealization<T>,
    horizon: usize,
) -> Result<Vec<FilterStep<T>>> {
    realization.check(model.dim())?;
    let mut out: Vec<FilterStep<T>> = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let sensor = realization.step(t)?;
        let p_pred = match out.last() {
            Some(prev) => riccati_predict(&prev.p_post, model),
            None => model.sigma_x0().clone(),
        };
        let (p_post, gain) = riccati_correct(&p_pred, &sensor.e, &sensor.sigma_z)?;
        out.push(FilterStep { p_pred, p_post, gain });
    }
    Ok(out)
}

/// First step from which the posterior covariance changes by at most
/// [`SETTLE_TOLERANCE`] (relative) per step, or `schedule.len()` if never.
pub fn settling_step<T: Real>(schedule: &[FilterStep<T>]) -> usize {
    let tol: T = cast(SETTLE_TOLERANCE);
    let mut settled = schedule.len();
    for t in (1..schedule.len()).rev() {
        if linalg::relative_difference(&schedule[t].p_post, &schedule[t - 1].p_post) <= tol {
            settled = t;
        } else {
            break;
        }
    }
    settled
}

/// Worst relative error between `p_seq` and the posteriors the realization
/// produces when replayed from `Σ_x0`.
pub fn round_trip_error<T: Real>(
    model: &GaussMarkovModel<T>,
    realization: &SensorRealization<T>,
    p_seq: &[Mat<T>],
) -> Result<T> {
    let schedule = filter_schedule(model, realization, p_seq.len())?;
    Ok(schedule
        .iter()
        .zip(p_seq)
        .fold(T::zero(), |acc, (s, p)| acc.max(linalg::relative_difference(&s.p_post, p))))
}

/// Relative error of the stationary fixed point: one correction from
/// `APAᵀ+Σ_w` must return `P`.
pub fn stationary_round_trip_error<T: Real>(
    model: &GaussMarkovModel<T>,
    realization: &SensorRealization<T>,
    p: &Mat<T>,
) -> Result<T> {
    let sensor = realization.step(0)?;
    let (p_post, _) = riccati_correct(&model.predict(p), &sensor.e, &sensor.sigma_z)?;
    Ok(linalg::relative_difference(&p_post, p))
}
