//! Monte Carlo simulation of source, sensor and Kalman estimator.
//!
//! Randomness is counter-based: trajectory `i` uses ChaCha stream `i` of the
//! master seed, and step `t` starts at word offset `t · 2³²` within that
//! stream, so every draw is fixed by `(seed, i, t)` alone. Trajectories are
//! processed in blocks of [`BLOCK`]; each block sums sequentially and block
//! sums are combined in block order, so the result does not depend on the
//! thread pool.

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::model::GaussMarkovModel;
use crate::realization::{correct_estimate, filter_schedule, settling_step, FilterStep, SensorRealization};
use crate::scalar::{cast, to_f64, Real};

const BLOCK: usize = 256;
const WORDS_PER_STEP: u128 = 1 << 32;
const STATIONARY_RATE_TOLERANCE: f64 = 1e-13;
const STATIONARY_RATE_MAX_STEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub trajectories: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl SimulationConfig {
    fn check(&self) -> Result<()> {
        if self.trajectories == 0 || self.horizon == 0 {
            return Err(Error::InvalidArgument("trajectories and horizon must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseEstimate {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub empirical_mse: Vec<MseEstimate>,
    /// `tr P_{t|t}` from the filter's own Riccati recursion.
    pub theoretical_mse: Vec<f64>,
    /// `tr P_t` of the supplied schedule (the fixed `P` for stationary realizations).
    pub reference_mse: Vec<f64>,
    /// Largest `|empirical − theoretical| / stderr` over all steps.
    pub max_z_score: f64,
    /// First step at which the filter covariance has settled; zero for
    /// finite-horizon realizations.
    pub settled_from: usize,
}

impl SimulationReport {
    /// Largest `|empirical − reference| / stderr` over the settled window.
    pub fn max_reference_z_score(&self) -> f64 {
        self.empirical_mse
            .iter()
            .zip(&self.reference_mse)
            .skip(self.settled_from)
            .map(|(e, &r)| z_score(e, r))
            .fold(0.0, f64::max)
    }
}

fn z_score(e: &MseEstimate, target: f64) -> f64 {
    let diff = (e.mean - target).abs();
    if e.stderr > 0.0 {
        diff / e.stderr
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Simulates `config.trajectories` runs of the source and the Kalman
/// estimator fed by `realization`.
pub fn simulate<T: Real>(
    model: &GaussMarkovModel<T>,
    realization: &SensorRealization<T>,
    p_seq: &[Mat<T>],
    config: &SimulationConfig,
) -> Result<SimulationReport> {
    simulate_with_gain_scale(model, realization, p_seq, config, T::one())
}

/// [`simulate`] with every Kalman gain multiplied by `gain_scale`. The
/// theoretical column still describes the unperturbed filter.
pub fn simulate_with_gain_scale<T: Real>(
    model: &GaussMarkovModel<T>,
    realization: &SensorRealization<T>,
    p_seq: &[Mat<T>],
    config: &SimulationConfig,
    gain_scale: T,
) -> Result<SimulationReport> {
    config.check()?;
    check_inputs(model, realization, p_seq)?;
    let horizon = config.horizon;
    if !realization.stationary && horizon > realization.steps.len() {
        return Err(Error::HorizonTooLong {
            horizon,
            length: realization.steps.len(),
        });
    }
    let schedule = filter_schedule(model, realization, horizon)?;
    let gains: Vec<Mat<T>> = schedule.iter().map(|s| &s.gain * gain_scale).collect();
    let sampler = Sampler::new(model, realization)?;

    let n_blocks = config.trajectories.div_ceil(BLOCK);
    let block_sums: Vec<(Vec<f64>, Vec<f64>)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut sum = vec![0.0; horizon];
            let mut sum_sq = vec![0.0; horizon];
            let end = ((b + 1) * BLOCK).min(config.trajectories);
            for i in b * BLOCK..end {
                let errs = run_trajectory(model, realization, &gains, &sampler, config.seed, i as u64, horizon);
                for (t, e) in errs.into_iter().enumerate() {
                    sum[t] += e;
                    sum_sq[t] += e * e;
                }
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = vec![0.0; horizon];
    let mut sum_sq = vec![0.0; horizon];
    for (s, q) in &block_sums {
        for t in 0..horizon {
            sum[t] += s[t];
            sum_sq[t] += q[t];
        }
    }
    let n = config.trajectories as f64;
    let empirical_mse: Vec<MseEstimate> = (0..horizon)
        .map(|t| {
            let mean = sum[t] / n;
            let var = if config.trajectories > 1 {
                ((sum_sq[t] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            MseEstimate {
                mean,
                stderr: (var / n).sqrt(),
            }
        })
        .collect();
    let theoretical_mse: Vec<f64> = schedule.iter().map(|s| to_f64(s.p_post.trace())).collect();
    let reference_mse: Vec<f64> = (0..horizon)
        .map(|t| to_f64(p_seq[if realization.stationary { 0 } else { t }].trace()))
        .collect();
    let max_z_score = empirical_mse
        .iter()
        .zip(&theoretical_mse)
        .map(|(e, &th)| z_score(e, th))
        .fold(0.0, f64::max);
    let settled_from = if realization.stationary {
        settling_step(&schedule)
    } else {
        0
    };
    Ok(SimulationReport {
        config: *config,
        empirical_mse,
        theoretical_mse,
        reference_mse,
        max_z_score,
        settled_from,
    })
}

fn check_inputs<T: Real>(model: &GaussMarkovModel<T>, realization: &SensorRealization<T>, p_seq: &[Mat<T>]) -> Result<()> {
    let p = model.dim();
    realization.check(p)?;
    if realization.stationary {
        if p_seq.len() != 1 {
            return Err(mismatch("covariance schedule for a stationary realization", 1, p_seq.len()));
        }
    } else if p_seq.len() != realization.steps.len() {
        return Err(mismatch("covariance schedule length", realization.steps.len(), p_seq.len()));
    }
    for (t, m) in p_seq.iter().enumerate() {
        if m.nrows() != p || m.ncols() != p {
            return Err(mismatch(&format!("P[{t}]"), format!("{p}x{p}"), format!("{}x{}", m.nrows(), m.ncols())));
        }
    }
    Ok(())
}

/// Lower Cholesky factors of every covariance the simulation draws from.
struct Sampler<T: Real> {
    x0: Mat<T>,
    w: Mat<T>,
    z: Vec<Mat<T>>,
}

impl<T: Real> Sampler<T> {
    fn new(model: &GaussMarkovModel<T>, realization: &SensorRealization<T>) -> Result<Self> {
        let factor = |m: &Mat<T>, which: String| -> Result<Mat<T>> {
            if m.nrows() == 0 {
                return Ok(Mat::zeros(0, 0));
            }
            Cholesky::new(m.clone())
                .map(|c| c.l())
                .ok_or(Error::NotPositiveDefinite { which })
        };
        Ok(Self {
            x0: factor(model.sigma_x0(), "sigma_x0".into())?,
            w: factor(model.sigma_w(), "sigma_w".into())?,
            z: realization
                .steps
                .iter()
                .enumerate()
                .map(|(t, s)| factor(&s.sigma_z, format!("sigma_z[{t}]")))
                .collect::<Result<_>>()?,
        })
    }

    fn z(&self, t: usize, stationary: bool) -> &Mat<T> {
        &self.z[if stationary { 0 } else { t }]
    }
}

fn normals<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vector<T> {
    Vector::from_fn(n, |_, _| cast(rng.sample::<f64, _>(StandardNormal)))
}

/// Squared estimation error at each step of one trajectory.
fn run_trajectory<T: Real>(
    model: &GaussMarkovModel<T>,
    realization: &SensorRealization<T>,
    gains: &[Mat<T>],
    sampler: &Sampler<T>,
    seed: u64,
    trajectory: u64,
    horizon: usize,
) -> Vec<f64> {
    let p = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    let mut x = Vector::zeros(p);
    let mut y = Vector::zeros(p);
    let mut errs = Vec::with_capacity(horizon);
    for t in 0..horizon {
        rng.set_word_pos(t as u128 * WORDS_PER_STEP);
        let (predicted, noise) = if t == 0 {
            (Vector::zeros(p), &sampler.x0)
        } else {
            (model.a() * &y, &sampler.w)
        };
        x = if t == 0 {
            noise * normals::<T>(&mut rng, p)
        } else {
            model.a() * &x + noise * normals::<T>(&mut rng, p)
        };
        let sensor = realization.step(t).expect("horizon checked");
        let m = sensor.rank();
        let measurement = if m == 0 {
            Vector::zeros(0)
        } else {
            &sensor.e * &x + sampler.z(t, realization.stationary) * normals::<T>(&mut rng, m)
        };
        y = correct_estimate(&predicted, &gains[t], &sensor.e, &measurement);
        errs.push(to_f64((&x - &y).norm_squared()));
    }
    errs
}

/// Average Gaussian information per step carried by the realized sensors,
/// `½ log det(E Π Eᵀ + Σ_z) − ½ log det Σ_z` along the filter's Riccati
/// recursion. For a stationary realization the recursion is run to its
/// fixed point and the limiting per-step value is returned.
pub fn empirical_information_rate<T: Real>(
    model: &GaussMarkovModel<T>,
    realization: &SensorRealization<T>,
    p_seq: &[Mat<T>],
) -> Result<T> {
    check_inputs(model, realization, p_seq)?;
    if !realization.stationary {
        let schedule = filter_schedule(model, realization, realization.steps.len())?;
        let mut total = T::zero();
        for (t, step) in schedule.iter().enumerate() {
            total += innovation_information(realization.step(t)?, step)?;
        }
        return Ok(total / cast(schedule.len() as f64));
    }
    let sensor = realization.step(0)?;
    let tol: T = cast(STATIONARY_RATE_TOLERANCE);
    let mut prev = filter_schedule(model, realization, 1)?.remove(0);
    for _ in 0..STATIONARY_RATE_MAX_STEPS {
        let p_pred = model.predict(&prev.p_post);
        let (p_post, gain) = crate::realization::riccati_correct(&p_pred, &sensor.e, &sensor.sigma_z)?;
        let change = linalg::relative_difference(&p_post, &prev.p_post);
        prev = FilterStep { p_pred, p_post, gain };
        if change <= tol {
            return innovation_information(sensor, &prev);
        }
    }
    Err(Error::FixedPointNonConvergence {
        iterations: STATIONARY_RATE_MAX_STEPS,
        last_change: f64::NAN,
    })
}

fn innovation_information<T: Real>(sensor: &crate::realization::SensorStep<T>, step: &FilterStep<T>) -> Result<T> {
    if sensor.rank() == 0 {
        return Ok(T::zero());
    }
    let half: T = cast(0.5);
    let innovation = linalg::symmetrize(&(&sensor.e * &step.p_pred * sensor.e.transpose() + &sensor.sigma_z));
    let li = linalg::logdet(&innovation).ok_or(Error::SingularInnovation)?;
    let lz = linalg::logdet(&sensor.sigma_z).ok_or(Error::SingularInnovation)?;
    Ok(half * (li - lz))
}
