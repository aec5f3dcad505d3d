use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use srd_core::closed_forms::CounterexampleReport;
use srd_core::io::{model_from_json, realization_from_json, realization_to_json};
use srd_core::realization::information_rate_from_covariances;
use srd_core::srd::{linear_grid, log_grid};
use srd_core::{
    counterexample_model, counterexample_report, simulate as run_simulation, srd_finite_horizon, srd_stationary,
    sweep_curve, CurveMethod, Error, GaussMarkovModelF64, SimulationConfig, SolverConfigF64,
};

use crate::output::{self, bits, rate_label, CurveRecord, FiniteRow, SimulationRow};
use crate::{CounterexampleArgs, CurveArgs, FiniteArgs, Format, RealizeArgs, SimulateArgs};

const Z_SCORE_LIMIT: f64 = 4.0;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Model(String),
    Solver(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Model(_) => 3,
            Failure::Solver(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Model(m) | Failure::Solver(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

/// Classifies an error raised after the inputs were loaded.
fn solver_failure(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(m) => Failure::Usage(m),
        other => Failure::Solver(other.to_string()),
    }
}

fn load_model(path: &Path) -> Result<GaussMarkovModelF64, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    model_from_json(&text).map_err(|e| Failure::Model(format!("{}: {e}", path.display())))
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Usage(format!("{name} must be positive and finite, got {x}")))
    }
}

pub fn curve(args: &CurveArgs) -> Result<u8, Failure> {
    let dmin = positive("--dmin", args.dmin)?;
    let dmax = positive("--dmax", args.dmax)?;
    if dmin >= dmax {
        return Err(Failure::Usage(format!("--dmin {dmin} must be below --dmax {dmax}")));
    }
    if args.points < 2 {
        return Err(Failure::Usage(format!("--points must be at least 2, got {}", args.points)));
    }
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<CurveMethod>().map_err(|e| Failure::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let model = load_model(&args.model)?;
    if methods.contains(&CurveMethod::ScalarClosedForm) && model.dim() != 1 {
        return Err(Failure::Usage("method `scalar` needs a scalar model".into()));
    }
    let grid = if args.log_grid {
        log_grid(dmin, dmax, args.points)
    } else {
        linear_grid(dmin, dmax, args.points)
    };
    let config = SolverConfigF64::default();
    let mut records = Vec::with_capacity(grid.len() * methods.len());
    for method in &methods {
        for pt in sweep_curve(&model, &grid, *method, &config).map_err(solver_failure)? {
            records.push(CurveRecord {
                distortion: pt.distortion,
                rate_nats: pt.rate,
                rate_bits: bits(pt.rate),
                method: method.name().to_string(),
                valid: pt.valid,
            });
        }
    }
    let text = match args.common.format {
        Format::Csv => output::csv(&records)?,
        Format::Json => output::json(&records)?,
    };
    output::emit(args.common.out.as_deref(), &text)?;
    eprintln!("{} records ({} grid points x {} methods)", records.len(), grid.len(), methods.len());
    Ok(0)
}

#[derive(Serialize)]
struct CounterexampleOutput {
    #[serde(flatten)]
    report: CounterexampleReport,
    sdp_rate: f64,
    lhs_bits: f64,
    rhs_bits: f64,
    sdp_bits: f64,
}

/// Always prints JSON; `--format` is ignored.
pub fn counterexample(args: &CounterexampleArgs) -> Result<u8, Failure> {
    if args.split.len() != 2 {
        return Err(Failure::Usage(format!("--split needs two values, got {}", args.split.len())));
    }
    let report = counterexample_report(args.a, args.distortion, (args.split[0], args.split[1]))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let model = counterexample_model(args.a).map_err(|e| Failure::Usage(e.to_string()))?;
    let sdp = srd_stationary(&model, args.distortion, &SolverConfigF64::default()).map_err(solver_failure)?;
    eprintln!(
        "vector expression {} vs split bound {} (optimum {}): contradiction={}",
        rate_label(report.lhs_rate, args.common.bits),
        rate_label(report.rhs_rate, args.common.bits),
        rate_label(sdp.rate, args.common.bits),
        report.contradiction
    );
    let out = CounterexampleOutput {
        lhs_bits: bits(report.lhs_rate),
        rhs_bits: bits(report.rhs_rate),
        sdp_bits: bits(sdp.rate),
        sdp_rate: sdp.rate,
        report,
    };
    output::emit(args.common.out.as_deref(), &output::json(&out)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct FiniteOutput {
    n: usize,
    #[serde(rename = "D")]
    distortion: f64,
    rate_nats: f64,
    rate_bits: f64,
    steps: Vec<FiniteRow>,
}

pub fn finite(args: &FiniteArgs) -> Result<u8, Failure> {
    let d = positive("--distortion", args.distortion)?;
    let model = load_model(&args.model)?;
    let sol = srd_finite_horizon(&model, d, args.horizon, &SolverConfigF64::default()).map_err(solver_failure)?;
    let step_rates = information_rate_from_covariances(&model, &sol.p_seq).map_err(solver_failure)?;
    let steps: Vec<FiniteRow> = sol
        .p_seq
        .iter()
        .zip(&step_rates)
        .enumerate()
        .map(|(t, (p, &r))| FiniteRow {
            t,
            trace_p: p.trace(),
            step_rate_nats: r,
            step_rate_bits: bits(r),
        })
        .collect();
    let text = match args.common.format {
        Format::Csv => output::csv(&steps)?,
        Format::Json => output::json(&FiniteOutput {
            n: sol.n,
            distortion: d,
            rate_nats: sol.rate,
            rate_bits: bits(sol.rate),
            steps,
        })?,
    };
    output::emit(args.common.out.as_deref(), &text)?;
    eprintln!("rate {} over {} steps", rate_label(sol.rate, args.common.bits), sol.n + 1);
    Ok(0)
}

/// Always writes JSON; `--format` is ignored.
pub fn realize(args: &RealizeArgs) -> Result<u8, Failure> {
    let d = positive("--distortion", args.distortion)?;
    let model = load_model(&args.model)?;
    let config = SolverConfigF64::default();
    let (realization, p_seq, rate) = if args.stationary {
        let pt = srd_stationary(&model, d, &config).map_err(solver_failure)?;
        let r = srd_core::stationary_sensor(&model, &pt.p_opt).map_err(solver_failure)?;
        (r, vec![pt.p_opt], pt.rate)
    } else {
        let n = args.horizon.expect("clap enforces the group");
        let sol = srd_finite_horizon(&model, d, n, &config).map_err(solver_failure)?;
        let r = srd_core::sensor_from_covariances(&model, &sol.p_seq).map_err(solver_failure)?;
        (r, sol.p_seq, sol.rate)
    };
    let text = realization_to_json(&realization, &p_seq).map_err(|e| Failure::Io(e.to_string()))?;
    output::emit(args.common.out.as_deref(), &(text + "\n"))?;
    eprintln!("rate {}; sensor ranks {:?}", rate_label(rate, args.common.bits), realization.ranks());
    Ok(0)
}

pub fn simulate(args: &SimulateArgs) -> Result<u8, Failure> {
    if args.trajectories == 0 || args.horizon == 0 {
        return Err(Failure::Usage("--trajectories and --horizon must be at least 1".into()));
    }
    let model = load_model(&args.model)?;
    let text = fs::read_to_string(&args.realization)
        .map_err(|e| Failure::Io(format!("{}: {e}", args.realization.display())))?;
    let (realization, p_seq) = realization_from_json(&text, model.dim())
        .map_err(|e| Failure::Model(format!("{}: {e}", args.realization.display())))?;
    let config = SimulationConfig {
        trajectories: args.trajectories,
        horizon: args.horizon,
        seed: args.seed,
    };
    let report = run_simulation(&model, &realization, &p_seq, &config).map_err(|e| match e {
        Error::HorizonTooLong { .. } => Failure::Usage(e.to_string()),
        other => Failure::Model(other.to_string()),
    })?;
    let text = match args.common.format {
        Format::Csv => {
            let rows: Vec<SimulationRow> = report
                .empirical_mse
                .iter()
                .zip(&report.theoretical_mse)
                .enumerate()
                .map(|(t, (e, &th))| SimulationRow {
                    t,
                    empirical_mse: e.mean,
                    stderr: e.stderr,
                    theoretical_mse: th,
                })
                .collect();
            output::csv(&rows)?
        }
        Format::Json => output::json(&report)?,
    };
    output::emit(args.common.out.as_deref(), &text)?;
    eprintln!("max_z_score {:.4} (settled from step {})", report.max_z_score, report.settled_from);
    Ok(if report.max_z_score <= Z_SCORE_LIMIT { 0 } else { 5 })
}
