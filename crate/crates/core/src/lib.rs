//! Sequential rate-distortion for vector Gauss-Markov sources.
//!
//! A source `x_{t+1} = A x_t + w_t` with `w_t ~ N(0, Σ_w)`, `x_0 ~ N(0, Σ_x0)`
//! is tracked causally under a per-step mean-squared-error budget `D`. This
//! crate computes the minimal information rate for that problem, both over
//! a finite horizon and in the stationary limit, by solving log-determinant
//! programs with its own interior-point engine. It also builds the
//! linear-Gaussian sensor that attains the optimum and simulates it.
//!
//! Module map:
//!
//! * [`model`]: validated source models, spectral summaries, Lyapunov solve.
//! * [`closed_forms`]: scalar closed form, the (incorrect) published vector
//!   expression, memoryless water-filling, the two-mode counterexample.
//! * [`convex`]: log-det barrier path-following solver.
//! * [`srd`]: the stationary, finite-horizon and relaxed lower-bound programs.
//! * [`realization`]: sensor construction and Kalman/Riccati recursions.
//! * [`montecarlo`]: reproducible simulation of the realized estimator.
//! * [`io`]: JSON model and realization files.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below fix the scalar. All rates are in nats.
//!
//! ```
//! use srd_core::{srd_stationary, GaussMarkovModelF64, SolverConfigF64};
//!
//! let model = GaussMarkovModelF64::scalar(1.0, 1.0, 1.0).unwrap();
//! let point = srd_stationary(&model, 0.5, &SolverConfigF64::default()).unwrap();
//! assert!((point.rate - 0.5 * 3f64.ln()).abs() < 1e-8);
//! ```

pub mod closed_forms;
pub mod convex;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod realization;
pub mod scalar;
pub mod srd;

pub use closed_forms::{counterexample_model, counterexample_report, iid_waterfilling, srd_rwf_vector, srd_scalar};
pub use convex::{gradient_check, solve, solve_from, LogDetProgram, SolverConfig, SolverReport};
pub use error::{Error, Result};
pub use model::{stationary_state_covariance, unstable_rate_lower_bound, GaussMarkovModel};
pub use montecarlo::{empirical_information_rate, simulate, SimulationConfig, SimulationReport};
pub use realization::{sensor_from_covariances, stationary_sensor, SensorRealization};
pub use scalar::Real;
pub use srd::{
    lemma4_bound, make_bound_params, srd_finite_horizon, srd_stationary, sweep_curve, BoundParams, CurveMethod,
    FiniteHorizonSolution, SrdPoint,
};

pub type MatF64 = linalg::Mat<f64>;
pub type MatF32 = linalg::Mat<f32>;
pub type GaussMarkovModelF64 = GaussMarkovModel<f64>;
pub type GaussMarkovModelF32 = GaussMarkovModel<f32>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type SolverConfigF32 = SolverConfig<f32>;
pub type SolverReportF64 = SolverReport<f64>;
pub type SolverReportF32 = SolverReport<f32>;
pub type SrdPointF64 = SrdPoint<f64>;
pub type SrdPointF32 = SrdPoint<f32>;
pub type FiniteHorizonSolutionF64 = FiniteHorizonSolution<f64>;
pub type FiniteHorizonSolutionF32 = FiniteHorizonSolution<f32>;
pub type SensorRealizationF64 = SensorRealization<f64>;
pub type SensorRealizationF32 = SensorRealization<f32>;
pub type LogDetProgramF64 = LogDetProgram<f64>;
pub type LogDetProgramF32 = LogDetProgram<f32>;
