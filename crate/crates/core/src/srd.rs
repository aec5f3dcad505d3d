//! Sequential rate-distortion programs.
//!
//! All three programs are posed with the auxiliary matrix `Q` eliminated:
//! at the optimum `Q⁻¹ = P⁻¹ + AᵀΣ_w⁻¹A`, and by the matrix determinant
//! lemma `½ log det Σ_w − ½ log det Q = ½ log det(APAᵀ + Σ_w) − ½ log det P`.
//!
//! * [`srd_stationary`]: minimize `½ log det(APAᵀ+Σ_w) − ½ log det P` over
//!   `0 ≺ P ⪯ APAᵀ + Σ_w`, `tr P ≤ D`.
//! * [`srd_finite_horizon`]: the same per-step information summed over
//!   `t = 0..=n` with `P_{0|0} ⪯ Σ_x0` and `P_{t|t} ⪯ AP_{t−1|t−1}Aᵀ + Σ_w`,
//!   divided by `n + 1`.
//! * [`lemma4_bound`]: the stationary program with the constraint relaxed by
//!   `δ I` and the objective shifted by `−ε`, a lower bound on the
//!   finite-horizon rate for suitable `(ε_n, δ_n)` from [`make_bound_params`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{srd_rwf_vector, srd_scalar};
use crate::convex::{solve_from, AffineMatrix, LogDetProgram, SolverConfig, SolverReport};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{self, Mat};
use crate::model::GaussMarkovModel;
use crate::scalar::{cast, to_f64, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct SrdPoint<T: Real> {
    pub distortion: T,
    /// Nats per time step.
    pub rate: T,
    /// Optimal stationary posterior covariance.
    pub p_opt: Mat<T>,
    pub report: SolverReport<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHorizonSolution<T: Real> {
    /// Last time index; the horizon has `n + 1` steps.
    pub n: usize,
    /// `P_{t|t}` for `t = 0..=n`.
    pub p_seq: Vec<Mat<T>>,
    /// `Q_t` with `Q_t⁻¹ = P_{t|t}⁻¹ + AᵀΣ_w⁻¹A` for `t < n` and `Q_n = P_{n|n}`.
    pub q_seq: Vec<Mat<T>>,
    /// Nats per time step, averaged over the `n + 1` steps.
    pub rate: T,
    pub report: SolverReport<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams<T> {
    pub n: usize,
    pub epsilon_n: T,
    pub delta_n: T,
    pub gamma: T,
}

fn check_distortion<T: Real>(distortion: T) -> Result<()> {
    if distortion > T::zero() && distortion.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("distortion must be positive and finite, got {distortion}")))
    }
}

/// `APAᵀ + Σ_w + δI − P ⪰ 0`, `tr P ≤ D`, objective `½ log det(APAᵀ+Σ_w) − ½ log det P − ε`.
pub fn stationary_program<T: Real>(model: &GaussMarkovModel<T>, distortion: T, epsilon: T, delta: T) -> LogDetProgram<T> {
    let p = model.dim();
    let half: T = cast(0.5);
    let mut prog = LogDetProgram::new(vec![p]);
    prog.add_constant(-epsilon)
        .add_logdet(
            half,
            AffineMatrix::constant(model.sigma_w().clone()).congruence(0, T::one(), model.a().clone()),
        )
        .add_logdet(-half, AffineMatrix::zero(p).plus(0, T::one()))
        .add_lmi(
            AffineMatrix::constant(model.sigma_w() + Mat::identity(p, p) * delta)
                .congruence(0, T::one(), model.a().clone())
                .plus(0, -T::one()),
        )
        .add_trace_bound(0, distortion);
    prog
}

/// The averaged finite-horizon program over `P_{0|0}, …, P_{n|n}`.
pub fn finite_horizon_program<T: Real>(model: &GaussMarkovModel<T>, distortion: T, n: usize) -> LogDetProgram<T> {
    let p = model.dim();
    let w: T = cast::<T>(0.5) / cast(n as f64 + 1.0);
    let logdet_x0 = linalg::logdet(model.sigma_x0()).expect("validated sigma_x0 is positive definite");
    let mut prog = LogDetProgram::new(vec![p; n + 1]);
    prog.add_constant(w * logdet_x0)
        .add_lmi(AffineMatrix::constant(model.sigma_x0().clone()).plus(0, -T::one()));
    for t in 0..=n {
        prog.add_logdet(-w, AffineMatrix::zero(p).plus(t, T::one()))
            .add_trace_bound(t, distortion);
        if t > 0 {
            let pred = AffineMatrix::constant(model.sigma_w().clone()).congruence(t - 1, T::one(), model.a().clone());
            prog.add_logdet(w, pred.clone()).add_lmi(pred.plus(t, -T::one()));
        }
    }
    prog
}

fn initial_scale<T: Real>(model: &GaussMarkovModel<T>, distortion: T, include_x0: bool) -> T {
    let half: T = cast(0.5);
    let p: T = cast(model.dim() as f64);
    let mut eps = (distortion / (p + p)).min(linalg::min_eigenvalue(model.sigma_w()));
    if include_x0 {
        eps = eps.min(linalg::min_eigenvalue(model.sigma_x0()));
    }
    eps * half
}

fn require_converged<T: Real>(report: SolverReport<T>) -> Result<SolverReport<T>> {
    if report.converged {
        Ok(report)
    } else {
        Err(Error::SolverNonConvergence {
            outer_iterations: report.outer_iterations,
            gap_bound: to_f64(report.gap_bound),
            gradient_norm: to_f64(report.final_gradient_norm),
        })
    }
}

/// Stationary sequential rate-distortion function at distortion `D`.
pub fn srd_stationary<T: Real>(model: &GaussMarkovModel<T>, distortion: T, config: &SolverConfig<T>) -> Result<SrdPoint<T>> {
    check_distortion(distortion)?;
    let prog = stationary_program(model, distortion, T::zero(), T::zero());
    let start = prog.scaled_identity_start(initial_scale(model, distortion, false))?;
    let report = require_converged(solve_from(&prog, config, &start)?)?;
    Ok(SrdPoint {
        distortion,
        rate: report.objective_value,
        p_opt: report.variables[0].clone(),
        report,
    })
}

/// Finite-horizon sequential rate-distortion function `R_{0,n}(D)`, solved
/// jointly over all steps.
pub fn srd_finite_horizon<T: Real>(
    model: &GaussMarkovModel<T>,
    distortion: T,
    n: usize,
    config: &SolverConfig<T>,
) -> Result<FiniteHorizonSolution<T>> {
    check_distortion(distortion)?;
    let prog = finite_horizon_program(model, distortion, n);
    let start = prog.scaled_identity_start(initial_scale(model, distortion, true))?;
    let report = require_converged(solve_from(&prog, config, &start)?)?;
    let p_seq = report.variables.clone();
    let q_seq = recover_q(model, &p_seq)?;
    Ok(FiniteHorizonSolution {
        n,
        rate: report.objective_value,
        p_seq,
        q_seq,
        report,
    })
}

/// `Q_t = (P_t⁻¹ + AᵀΣ_w⁻¹A)⁻¹` for all but the last step, which keeps `Q_n = P_n`.
pub fn recover_q<T: Real>(model: &GaussMarkovModel<T>, p_seq: &[Mat<T>]) -> Result<Vec<Mat<T>>> {
    let info = model.dynamics_information();
    let last = p_seq.len().saturating_sub(1);
    p_seq
        .iter()
        .enumerate()
        .map(|(t, p)| {
            if t == last {
                return Ok(p.clone());
            }
            let p_inv = linalg::spd_inverse(p).ok_or_else(|| Error::NotPositiveDefinite {
                which: format!("P[{t}]"),
            })?;
            linalg::spd_inverse(&(p_inv + &info)).ok_or_else(|| Error::NotPositiveDefinite {
                which: format!("Q[{t}]⁻¹"),
            })
        })
        .collect()
}

/// The relaxed lower-bound program `f(D; ε, δ)`.
pub fn lemma4_bound<T: Real>(
    model: &GaussMarkovModel<T>,
    distortion: T,
    params: &BoundParams<T>,
    config: &SolverConfig<T>,
) -> Result<T> {
    check_distortion(distortion)?;
    if params.epsilon_n < T::zero() || params.delta_n < T::zero() {
        return Err(Error::InvalidArgument("bound parameters must be non-negative".into()));
    }
    let prog = stationary_program(model, distortion, params.epsilon_n, params.delta_n);
    let start = prog.scaled_identity_start(initial_scale(model, distortion, false))?;
    Ok(require_converged(solve_from(&prog, config, &start)?)?.objective_value)
}

/// `γ = max{0, (p/2) log((σ_max(AAᵀ) D + tr Σ_w)/p) − ½ log det Σ_x0}`,
/// `ε_n = γ/(n+1)`, `δ_n = σ_max(P_{0|0})/(n+1)`.
pub fn make_bound_params<T: Real>(model: &GaussMarkovModel<T>, distortion: T, n: usize, p00: &Mat<T>) -> Result<BoundParams<T>> {
    check_distortion(distortion)?;
    let p = model.dim();
    if p00.nrows() != p || p00.ncols() != p {
        return Err(mismatch("P00", format!("{p}x{p}"), format!("{}x{}", p00.nrows(), p00.ncols())));
    }
    let half: T = cast(0.5);
    let pf: T = cast(p as f64);
    let aat = model.a() * model.a().transpose();
    let growth = linalg::max_eigenvalue(&aat) * distortion + model.sigma_w().trace();
    let logdet_x0 = linalg::logdet(model.sigma_x0()).expect("validated sigma_x0 is positive definite");
    let gamma = (half * pf * (growth / pf).ln() - half * logdet_x0).max(T::zero());
    let steps: T = cast(n as f64 + 1.0);
    Ok(BoundParams {
        n,
        epsilon_n: gamma / steps,
        delta_n: linalg::sym_spectral_norm(p00) / steps,
        gamma,
    })
}

/// `½ log det(APAᵀ + Σ_w) − ½ log det P`, or `None` if `P` is not positive definite.
pub fn stationary_objective<T: Real>(model: &GaussMarkovModel<T>, p: &Mat<T>) -> Option<T> {
    let half: T = cast(0.5);
    Some(half * (linalg::logdet(&model.predict(p))? - linalg::logdet(p)?))
}

/// The same objective written through `Q`: `½ log det Σ_w + ½ log det(P⁻¹ + AᵀΣ_w⁻¹A)`.
pub fn stationary_objective_q_form<T: Real>(model: &GaussMarkovModel<T>, p: &Mat<T>) -> Option<T> {
    let half: T = cast(0.5);
    let info = linalg::spd_inverse(p)? + model.dynamics_information();
    Some(half * (linalg::logdet(model.sigma_w())? + linalg::logdet(&linalg::symmetrize(&info))?))
}

/// Averaged finite-horizon objective in terms of the posterior covariances.
pub fn finite_horizon_objective<T: Real>(model: &GaussMarkovModel<T>, p_seq: &[Mat<T>]) -> Option<T> {
    let half: T = cast(0.5);
    let mut total = half * (linalg::logdet(model.sigma_x0())? - linalg::logdet(p_seq.first()?)?);
    for pair in p_seq.windows(2) {
        total += half * (linalg::logdet(&model.predict(&pair[0]))? - linalg::logdet(&pair[1])?);
    }
    Some(total / cast(p_seq.len() as f64))
}

/// Averaged finite-horizon objective through `Q`: `(c − Σ_t ½ log det Q_t)/(n+1)`
/// with `c = ½ log det Σ_x0 + (n/2) log det Σ_w`.
pub fn finite_horizon_objective_q_form<T: Real>(model: &GaussMarkovModel<T>, q_seq: &[Mat<T>]) -> Option<T> {
    let half: T = cast(0.5);
    let n = q_seq.len().checked_sub(1)?;
    let c = half * linalg::logdet(model.sigma_x0())? + half * cast(n as f64) * linalg::logdet(model.sigma_w())?;
    let mut sum = T::zero();
    for q in q_seq {
        sum += half * linalg::logdet(q)?;
    }
    Some((c - sum) / cast(q_seq.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMethod {
    StationarySdp,
    RwfVector,
    ScalarClosedForm,
}

impl CurveMethod {
    pub fn name(self) -> &'static str {
        match self {
            CurveMethod::StationarySdp => "sdp",
            CurveMethod::RwfVector => "rwf",
            CurveMethod::ScalarClosedForm => "scalar",
        }
    }
}

impl fmt::Display for CurveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sdp" | "stationary_sdp" => Ok(CurveMethod::StationarySdp),
            "rwf" | "rwf_vector" => Ok(CurveMethod::RwfVector),
            "scalar" | "scalar_closed_form" => Ok(CurveMethod::ScalarClosedForm),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint<T> {
    pub distortion: T,
    pub rate: T,
    /// Validity-region flag for the vector expression; always true otherwise.
    pub valid: bool,
}

/// Evaluates one method on every grid point. Points are solved in parallel;
/// results (and the first error, if any) follow grid order.
pub fn sweep_curve<T: Real>(
    model: &GaussMarkovModel<T>,
    grid: &[T],
    method: CurveMethod,
    config: &SolverConfig<T>,
) -> Result<Vec<CurvePoint<T>>> {
    if grid.iter().any(|&d| !(d > T::zero()) || !d.is_finite()) {
        return Err(Error::InvalidArgument("distortion grid must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("distortion grid must be strictly increasing".into()));
    }
    if method == CurveMethod::ScalarClosedForm && model.dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "scalar closed form needs a scalar model, got dimension {}",
            model.dim()
        )));
    }
    grid.par_iter()
        .map(|&d| {
            let (rate, valid) = match method {
                CurveMethod::StationarySdp => (srd_stationary(model, d, config)?.rate, true),
                CurveMethod::RwfVector => {
                    let ev = srd_rwf_vector(model, d)?;
                    (ev.rate, ev.valid_region)
                }
                CurveMethod::ScalarClosedForm => (
                    srd_scalar(model.a()[(0, 0)], model.sigma_w()[(0, 0)], d)?,
                    true,
                ),
            };
            Ok(CurvePoint {
                distortion: d,
                rate,
                valid,
            })
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect()
}

/// `n` points spaced linearly over `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points spaced logarithmically over `[lo, hi]` (`lo > 0`).
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linear_grid(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::iid_waterfilling;

    fn eye(p: usize) -> Mat<f64> {
        Mat::identity(p, p)
    }

    fn diag(v: &[f64]) -> Mat<f64> {
        Mat::from_diagonal(&nalgebra::DVector::from_row_slice(v))
    }

    fn model(a: Mat<f64>) -> GaussMarkovModel<f64> {
        let p = a.nrows();
        GaussMarkovModel::new(p, a, eye(p), eye(p)).unwrap()
    }

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn stationary_memoryless_budget_covers_variance() {
        let pt = srd_stationary(&model(Mat::zeros(2, 2)), 2.0, &cfg()).unwrap();
        assert!(pt.rate.abs() < 1e-7);
        assert!(linalg::relative_difference(&pt.p_opt, &eye(2)) < 1e-6);
    }

    #[test]
    fn stationary_scalar_matches_closed_form() {
        let m = GaussMarkovModel::scalar(1.0, 1.0, 1.0).unwrap();
        let pt = srd_stationary(&m, 0.5, &cfg()).unwrap();
        assert!((pt.rate - 0.5 * 3f64.ln()).abs() < 1e-8);
        assert!((pt.p_opt[(0, 0)] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn stationary_counterexample_split() {
        let pt = srd_stationary(&model(diag(&[1.0, 0.0])), 1.5, &cfg()).unwrap();
        let d1 = (10f64.sqrt() - 2.0) / 2.0;
        let oracle = srd_scalar(1.0, 1.0, d1).unwrap() + srd_scalar(0.0, 1.0, 1.5 - d1).unwrap();
        assert!((pt.rate - oracle).abs() < 1e-7, "{} vs {oracle}", pt.rate);
        assert!((pt.p_opt[(0, 0)] - d1).abs() < 1e-5);
        assert!((pt.p_opt[(1, 1)] - (1.5 - d1)).abs() < 1e-5);
        assert!(pt.rate < 0.5 * 3f64.ln());
    }

    #[test]
    fn stationary_solution_is_feasible() {
        let m = model(diag(&[6.0, 1.0]));
        let pt = srd_stationary(&m, 1.0, &cfg()).unwrap();
        assert!(pt.p_opt.trace() <= 1.0 + 1e-8);
        let slack = m.predict(&pt.p_opt) - &pt.p_opt;
        assert!(linalg::min_eigenvalue(&slack) >= -1e-8);
        assert!(pt.rate >= 6f64.ln() - 1e-6);
    }

    #[test]
    fn finite_horizon_one_shot_is_waterfilling() {
        for a in [Mat::zeros(2, 2), diag(&[6.0, 1.0])] {
            let sol = srd_finite_horizon(&model(a), 1.0, 0, &cfg()).unwrap();
            assert!((sol.rate - 2f64.ln()).abs() < 1e-8);
            let wf = iid_waterfilling(&eye(2), 1.0).unwrap();
            assert!((sol.rate - wf.rate).abs() < 1e-8);
        }
        let sol = srd_finite_horizon(&model(Mat::zeros(2, 2)), 2.0, 0, &cfg()).unwrap();
        assert!(sol.rate.abs() < 1e-8);
        assert!(linalg::relative_difference(&sol.p_seq[0], &eye(2)) < 1e-6);
    }

    #[test]
    fn finite_horizon_identities_hold() {
        let m = GaussMarkovModel::new(
            2,
            Mat::from_row_slice(2, 2, &[1.1, 0.4, -0.2, 0.6]),
            Mat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]),
            Mat::from_row_slice(2, 2, &[2.0, -0.5, -0.5, 1.5]),
        )
        .unwrap();
        let sol = srd_finite_horizon(&m, 0.8, 4, &cfg()).unwrap();
        assert_eq!(sol.p_seq.len(), 5);
        let p_form = finite_horizon_objective(&m, &sol.p_seq).unwrap();
        let q_form = finite_horizon_objective_q_form(&m, &sol.q_seq).unwrap();
        assert!((p_form - sol.rate).abs() < 1e-10);
        assert!((p_form - q_form).abs() < 1e-8);
        let info = m.dynamics_information();
        for t in 0..4 {
            let lhs = linalg::spd_inverse(&sol.q_seq[t]).unwrap();
            let rhs = linalg::spd_inverse(&sol.p_seq[t]).unwrap() + &info;
            assert!(linalg::relative_difference(&lhs, &rhs) < 1e-8);
        }
        assert_eq!(sol.q_seq[4], sol.p_seq[4]);
        assert!(linalg::min_eigenvalue(&(m.sigma_x0() - &sol.p_seq[0])) >= -1e-8);
        for t in 1..5 {
            assert!(linalg::min_eigenvalue(&(m.predict(&sol.p_seq[t - 1]) - &sol.p_seq[t])) >= -1e-8);
            assert!(sol.p_seq[t].trace() <= 0.8 + 1e-8);
        }
    }

    #[test]
    fn bound_params_examples() {
        let m = model(diag(&[6.0, 1.0]));
        let bp = make_bound_params(&m, 1.0, 10, &eye(2)).unwrap();
        assert!((bp.gamma - 19f64.ln()).abs() < 1e-12);
        assert!((bp.epsilon_n - 19f64.ln() / 11.0).abs() < 1e-12);
        assert!((bp.delta_n - 1.0 / 11.0).abs() < 1e-12);
        let zero = make_bound_params(&model(Mat::zeros(2, 2)), 2.0, 3, &eye(2)).unwrap();
        assert_eq!(zero.gamma, 0.0);
        assert_eq!(zero.epsilon_n, 0.0);
        let later = make_bound_params(&m, 1.0, 20, &eye(2)).unwrap();
        assert!(later.epsilon_n < bp.epsilon_n && later.delta_n < bp.delta_n);
    }

    #[test]
    fn lemma4_reduces_to_stationary() {
        let m = model(diag(&[1.0, 0.0]));
        let stat = srd_stationary(&m, 1.5, &cfg()).unwrap().rate;
        let plain = BoundParams {
            n: 0,
            epsilon_n: 0.0,
            delta_n: 0.0,
            gamma: 0.0,
        };
        assert_eq!(lemma4_bound(&m, 1.5, &plain, &cfg()).unwrap(), stat);
        let shifted = BoundParams { epsilon_n: 0.1, ..plain };
        assert!((lemma4_bound(&m, 1.5, &shifted, &cfg()).unwrap() - (stat - 0.1)).abs() < 1e-12);
    }

    #[test]
    fn lemma4_lower_bounds_finite_horizon() {
        let m = model(diag(&[6.0, 1.0]));
        let sol = srd_finite_horizon(&m, 1.0, 10, &cfg()).unwrap();
        let bp = make_bound_params(&m, 1.0, 10, &sol.p_seq[0]).unwrap();
        let f = lemma4_bound(&m, 1.0, &bp, &cfg()).unwrap();
        assert!(f <= sol.rate + 1e-8, "{f} > {}", sol.rate);
    }

    #[test]
    fn sweep_examples() {
        let scalar = GaussMarkovModel::scalar(1.0, 1.0, 1.0).unwrap();
        let pts = sweep_curve(&scalar, &[0.5], CurveMethod::StationarySdp, &cfg()).unwrap();
        assert!((pts[0].rate - 0.5 * 3f64.ln()).abs() < 1e-8);
        assert!(pts[0].valid);
        let pts = sweep_curve(&scalar, &[0.5], CurveMethod::ScalarClosedForm, &cfg()).unwrap();
        assert!((pts[0].rate - 0.549_306).abs() < 1e-6);

        let m = model(Mat::zeros(2, 2));
        let grid = linear_grid(0.1, 2.0, 12);
        let sdp = sweep_curve(&m, &grid, CurveMethod::StationarySdp, &cfg()).unwrap();
        let rwf = sweep_curve(&m, &grid, CurveMethod::RwfVector, &cfg()).unwrap();
        for (s, r) in sdp.iter().zip(&rwf) {
            assert_eq!(s.distortion, r.distortion);
            assert!((s.rate - r.rate).abs() < 1e-6);
        }
    }

    #[test]
    fn sweep_rejects_bad_inputs() {
        let m = model(Mat::zeros(2, 2));
        assert!(sweep_curve(&m, &[1.0, 0.5], CurveMethod::RwfVector, &cfg()).is_err());
        assert!(sweep_curve(&m, &[0.0, 0.5], CurveMethod::RwfVector, &cfg()).is_err());
        assert!(sweep_curve(&m, &[0.5], CurveMethod::ScalarClosedForm, &cfg()).is_err());
        assert!(srd_stationary(&m, -1.0, &cfg()).is_err());
        assert!(srd_finite_horizon(&m, 0.0, 3, &cfg()).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [CurveMethod::StationarySdp, CurveMethod::RwfVector, CurveMethod::ScalarClosedForm] {
            assert_eq!(m.name().parse::<CurveMethod>().unwrap(), m);
        }
        assert!("bogus".parse::<CurveMethod>().is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let g = log_grid(0.01, 100.0, 5);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }
}
