//! Path-following log-barrier solver for determinant-maximization programs
//! over symmetric matrix variables.
//!
//! A [`LogDetProgram`] minimizes
//!
//! ```text
//! c + Σ_j w_j · log det F_j(X)
//! ```
//!
//! subject to linear matrix inequalities `G_k(X) ⪰ 0` and trace bounds
//! `tr X_i ≤ b_i`, where every `F_j`, `G_k` is an affine matrix function
//! built from congruences `coef · L X_i Lᵀ`. The objective must be convex on
//! the feasible set; individual terms need not be (a `+½ log det(A P Aᵀ + Σ)`
//! term is concave on its own but is always paired with `−½ log det P`).
//!
//! Symmetric variables are parametrized by their upper-triangle entries, so a
//! `n × n` variable contributes `n(n+1)/2` coordinates. The barrier
//! subproblem `f₀ + μ φ` is centered with damped Newton steps and Armijo
//! backtracking; `μ` shrinks geometrically until `μ · m` (with `m` the total
//! barrier degree) is below the requested gap. The Newton system is factored
//! with a banded Cholesky whose bandwidth comes from the coupling structure,
//! so chained programs (each constraint touching neighbouring variables)
//! cost linear time in the chain length.

use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::scalar::{cast, to_f64, Real};

const ARMIJO: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 80;
/// A Newton step that cannot be line-searched is still accepted as centered
/// when the decrement is within this factor of the tolerance.
const STALL_FACTOR: f64 = 1e3;

/// `coefficient · L X_variable Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CongruenceTerm<T: Real> {
    pub variable: usize,
    pub coefficient: T,
    pub left: Mat<T>,
}

/// `C + Σ_s coef_s · L_s X_{i_s} L_sᵀ`. Symmetric whenever `C` and the
/// variables are.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMatrix<T: Real> {
    pub constant: Mat<T>,
    pub terms: Vec<CongruenceTerm<T>>,
}

impl<T: Real> AffineMatrix<T> {
    pub fn constant(constant: Mat<T>) -> Self {
        Self {
            constant,
            terms: Vec::new(),
        }
    }

    /// Zero constant of dimension `m`.
    pub fn zero(m: usize) -> Self {
        Self::constant(Mat::zeros(m, m))
    }

    /// Adds `coefficient · L X_variable Lᵀ`.
    pub fn congruence(mut self, variable: usize, coefficient: T, left: Mat<T>) -> Self {
        self.terms.push(CongruenceTerm {
            variable,
            coefficient,
            left,
        });
        self
    }

    /// Adds `coefficient · X_variable`.
    pub fn plus(self, variable: usize, coefficient: T) -> Self {
        let m = self.dim();
        self.congruence(variable, coefficient, Mat::identity(m, m))
    }

    pub fn dim(&self) -> usize {
        self.constant.nrows()
    }

    pub fn evaluate(&self, variables: &[Mat<T>]) -> Mat<T> {
        let mut out = self.constant.clone();
        for term in &self.terms {
            out += (&term.left * &variables[term.variable] * term.left.transpose()) * term.coefficient;
        }
        linalg::symmetrize(&out)
    }
}

/// `weight · log det F(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDetTerm<T: Real> {
    pub weight: T,
    pub argument: AffineMatrix<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConstraint<T: Real> {
    pub variable: usize,
    pub bound: T,
}

/// A determinant-maximization program. See the module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDetProgram<T: Real> {
    pub variable_dims: Vec<usize>,
    pub objective_constant: T,
    pub objective: Vec<LogDetTerm<T>>,
    pub lmi_constraints: Vec<AffineMatrix<T>>,
    pub trace_constraints: Vec<TraceConstraint<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    pub barrier_initial: T,
    pub barrier_decrease: T,
    /// Tolerance on the Newton decrement `λ²/2` of each centering problem.
    pub newton_tolerance: T,
    pub max_newton_iters: usize,
    pub max_outer_iters: usize,
    /// Stop once `μ · m` (the barrier suboptimality bound) is below this.
    pub final_gap_tolerance: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            barrier_initial: T::one(),
            barrier_decrease: cast(0.2),
            newton_tolerance: cast(1e-10),
            max_newton_iters: 200,
            max_outer_iters: 60,
            final_gap_tolerance: cast(1e-9),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    /// Looser tolerances usable in single precision.
    pub fn relaxed() -> Self {
        Self {
            newton_tolerance: cast(1e-6),
            final_gap_tolerance: cast(1e-4),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.barrier_initial > T::zero()
            && self.barrier_decrease > T::zero()
            && self.barrier_decrease < T::one()
            && self.newton_tolerance > T::zero()
            && self.final_gap_tolerance > T::zero()
            && self.max_newton_iters > 0
            && self.max_outer_iters > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("solver configuration out of range".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport<T: Real> {
    /// `f₀` at the returned point (nats for the rate programs).
    pub objective_value: T,
    #[serde(skip)]
    pub variables: Vec<Mat<T>>,
    pub outer_iterations: usize,
    pub newton_iterations: usize,
    /// `‖∇(f₀ + μφ)‖_∞` at the last centered point.
    pub final_gradient_norm: T,
    /// `λ²/2` at the last centered point.
    pub final_newton_decrement: T,
    pub barrier_parameter: T,
    /// `μ · m` at termination.
    pub gap_bound: T,
    /// Smallest eigenvalue of each LMI at the solution.
    pub feasibility_margins: Vec<T>,
    /// `b_i − tr X_i` for each trace constraint.
    pub trace_margins: Vec<T>,
    /// `f₀` after each outer iteration.
    pub objective_history: Vec<T>,
    pub converged: bool,
}

/// Coordinate layout of the packed upper triangles.
#[derive(Debug, Clone)]
struct Layout {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    /// `(a, b)` with `a ≤ b` for each local coordinate, per variable.
    entries: Vec<Vec<(usize, usize)>>,
    len: usize,
}

impl Layout {
    fn new(dims: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut entries = Vec::with_capacity(dims.len());
        let mut len = 0;
        for &n in dims {
            offsets.push(len);
            let e: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
            len += e.len();
            entries.push(e);
        }
        Self {
            dims: dims.to_vec(),
            offsets,
            entries,
            len,
        }
    }

    fn pack<T: Real>(&self, vars: &[Mat<T>]) -> Vector<T> {
        let mut x = Vector::zeros(self.len);
        for (i, v) in vars.iter().enumerate() {
            for (k, &(a, b)) in self.entries[i].iter().enumerate() {
                x[self.offsets[i] + k] = v[(a, b)];
            }
        }
        x
    }

    fn unpack<T: Real>(&self, x: &Vector<T>) -> Vec<Mat<T>> {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let mut m = Mat::zeros(n, n);
                for (k, &(a, b)) in self.entries[i].iter().enumerate() {
                    let v = x[self.offsets[i] + k];
                    m[(a, b)] = v;
                    m[(b, a)] = v;
                }
                m
            })
            .collect()
    }

    fn span(&self, var: usize) -> (usize, usize) {
        (self.offsets[var], self.offsets[var] + self.entries[var].len())
    }
}

/// Merit value with optional derivatives.
struct Evaluation<T: Real> {
    merit: T,
    objective: T,
    gradient: Option<Vector<T>>,
    hessian: Option<Mat<T>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Order {
    Value,
    Gradient,
    Hessian,
}

impl<T: Real> LogDetProgram<T> {
    pub fn new(variable_dims: Vec<usize>) -> Self {
        Self {
            variable_dims,
            objective_constant: T::zero(),
            objective: Vec::new(),
            lmi_constraints: Vec::new(),
            trace_constraints: Vec::new(),
        }
    }

    pub fn add_constant(&mut self, c: T) -> &mut Self {
        self.objective_constant += c;
        self
    }

    pub fn add_logdet(&mut self, weight: T, argument: AffineMatrix<T>) -> &mut Self {
        self.objective.push(LogDetTerm { weight, argument });
        self
    }

    pub fn add_lmi(&mut self, constraint: AffineMatrix<T>) -> &mut Self {
        self.lmi_constraints.push(constraint);
        self
    }

    pub fn add_trace_bound(&mut self, variable: usize, bound: T) -> &mut Self {
        self.trace_constraints.push(TraceConstraint { variable, bound });
        self
    }

    /// Total degree of the barrier: LMI dimensions plus one per trace bound.
    pub fn barrier_degree(&self) -> usize {
        self.lmi_constraints.iter().map(AffineMatrix::dim).sum::<usize>() + self.trace_constraints.len()
    }

    /// Checks that every affine map is dimensionally consistent.
    pub fn check(&self) -> Result<()> {
        let nv = self.variable_dims.len();
        let maps = self
            .objective
            .iter()
            .map(|t| &t.argument)
            .chain(self.lmi_constraints.iter());
        for map in maps {
            let m = map.dim();
            if map.constant.ncols() != m {
                return Err(mismatch("affine constant", "square", format!("{}x{}", m, map.constant.ncols())));
            }
            for term in &map.terms {
                if term.variable >= nv {
                    return Err(mismatch("variable index", format!("< {nv}"), term.variable));
                }
                let n = self.variable_dims[term.variable];
                if term.left.nrows() != m || term.left.ncols() != n {
                    return Err(mismatch(
                        "congruence factor",
                        format!("{m}x{n}"),
                        format!("{}x{}", term.left.nrows(), term.left.ncols()),
                    ));
                }
            }
        }
        for tc in &self.trace_constraints {
            if tc.variable >= nv {
                return Err(mismatch("trace constraint variable", format!("< {nv}"), tc.variable));
            }
        }
        Ok(())
    }

    /// `f₀(X)`, or `None` outside the domain of some log-det term.
    pub fn objective_value(&self, variables: &[Mat<T>]) -> Option<T> {
        let mut total = self.objective_constant;
        for term in &self.objective {
            total += term.weight * linalg::logdet(&term.argument.evaluate(variables))?;
        }
        Some(total)
    }

    /// Smallest eigenvalue of every LMI at `variables`.
    pub fn lmi_margins(&self, variables: &[Mat<T>]) -> Vec<T> {
        self.lmi_constraints
            .iter()
            .map(|g| linalg::min_eigenvalue(&g.evaluate(variables)))
            .collect()
    }

    pub fn trace_margins(&self, variables: &[Mat<T>]) -> Vec<T> {
        self.trace_constraints
            .iter()
            .map(|tc| tc.bound - variables[tc.variable].trace())
            .collect()
    }

    /// Strict feasibility: all LMIs positive definite, all trace bounds slack,
    /// all objective log-det arguments positive definite.
    pub fn is_strictly_feasible(&self, variables: &[Mat<T>]) -> bool {
        if variables.len() != self.variable_dims.len()
            || variables
                .iter()
                .zip(&self.variable_dims)
                .any(|(v, &n)| v.nrows() != n || v.ncols() != n)
        {
            return false;
        }
        self.trace_margins(variables).iter().all(|&s| s > T::zero())
            && self
                .lmi_constraints
                .iter()
                .all(|g| linalg::is_positive_definite(&g.evaluate(variables)))
            && self
                .objective
                .iter()
                .all(|t| linalg::is_positive_definite(&t.argument.evaluate(variables)))
    }

    /// `X_i = ε I` for every variable, halving `ε` from `initial` until
    /// strictly feasible (at most 200 halvings).
    pub fn scaled_identity_start(&self, initial: T) -> Result<Vec<Mat<T>>> {
        let half: T = cast(0.5);
        let mut eps = initial;
        for _ in 0..200 {
            let vars: Vec<Mat<T>> = self
                .variable_dims
                .iter()
                .map(|&n| Mat::identity(n, n) * eps)
                .collect();
            if self.is_strictly_feasible(&vars) {
                return Ok(vars);
            }
            eps *= half;
        }
        Err(Error::InfeasibleStart)
    }

    /// Gradient of `f₀ + μφ` with respect to the packed upper-triangle coordinates.
    pub fn merit_gradient(&self, variables: &[Mat<T>], barrier: T) -> Result<Vec<T>> {
        let layout = Layout::new(&self.variable_dims);
        let ev = self
            .evaluate(&layout, variables, barrier, Order::Gradient)
            .ok_or(Error::InfeasiblePoint)?;
        Ok(ev.gradient.expect("requested").iter().copied().collect())
    }

    /// Hessian of `f₀ + μφ` in packed coordinates.
    pub fn merit_hessian(&self, variables: &[Mat<T>], barrier: T) -> Result<Mat<T>> {
        let layout = Layout::new(&self.variable_dims);
        let ev = self
            .evaluate(&layout, variables, barrier, Order::Hessian)
            .ok_or(Error::InfeasiblePoint)?;
        Ok(ev.hessian.expect("requested"))
    }

    /// `f₀ + μφ`, or `None` outside the domain.
    pub fn merit_value(&self, variables: &[Mat<T>], barrier: T) -> Option<T> {
        let layout = Layout::new(&self.variable_dims);
        self.evaluate(&layout, variables, barrier, Order::Value).map(|e| e.merit)
    }

    /// Perturbs packed coordinate `index` by `delta` (both mirrored entries
    /// for off-diagonal coordinates).
    pub fn perturb(&self, variables: &[Mat<T>], index: usize, delta: T) -> Vec<Mat<T>> {
        let layout = Layout::new(&self.variable_dims);
        let mut x = layout.pack(variables);
        x[index] += delta;
        layout.unpack(&x)
    }

    pub fn coordinate_count(&self) -> usize {
        Layout::new(&self.variable_dims).len
    }

    fn bandwidth(&self, layout: &Layout) -> usize {
        let mut band = 0;
        let maps = self
            .objective
            .iter()
            .map(|t| &t.argument)
            .chain(self.lmi_constraints.iter());
        for map in maps {
            let lo = map.terms.iter().map(|t| layout.span(t.variable).0).min();
            let hi = map.terms.iter().map(|t| layout.span(t.variable).1).max();
            if let (Some(lo), Some(hi)) = (lo, hi) {
                band = band.max(hi - lo - 1);
            }
        }
        for tc in &self.trace_constraints {
            let (lo, hi) = layout.span(tc.variable);
            band = band.max(hi - lo - 1);
        }
        band
    }

    fn evaluate(&self, layout: &Layout, vars: &[Mat<T>], barrier: T, order: Order) -> Option<Evaluation<T>> {
        let n = layout.len;
        let mut grad = (order != Order::Value).then(|| Vector::zeros(n));
        let mut hess = (order == Order::Hessian).then(|| Mat::zeros(n, n));
        let mut objective = self.objective_constant;
        let mut barrier_value = T::zero();

        for term in &self.objective {
            objective += term.weight
                * accumulate_logdet(layout, &term.argument, vars, term.weight, grad.as_mut(), hess.as_mut())?;
        }
        let neg_mu = -barrier;
        for g in &self.lmi_constraints {
            barrier_value -= accumulate_logdet(layout, g, vars, neg_mu, grad.as_mut(), hess.as_mut())?;
        }
        for tc in &self.trace_constraints {
            let slack = tc.bound - vars[tc.variable].trace();
            if !(slack > T::zero()) {
                return None;
            }
            barrier_value -= slack.ln();
            let (lo, _) = layout.span(tc.variable);
            let diag: Vec<usize> = layout.entries[tc.variable]
                .iter()
                .enumerate()
                .filter(|(_, (a, b))| a == b)
                .map(|(k, _)| lo + k)
                .collect();
            if let Some(g) = grad.as_mut() {
                for &k in &diag {
                    g[k] += barrier / slack;
                }
            }
            if let Some(h) = hess.as_mut() {
                let c = barrier / (slack * slack);
                for &k in &diag {
                    for &l in &diag {
                        h[(k, l)] += c;
                    }
                }
            }
        }
        let merit = objective + barrier * barrier_value;
        if !merit.is_finite() {
            return None;
        }
        Some(Evaluation {
            merit,
            objective,
            gradient: grad,
            hessian: hess,
        })
    }
}

/// Returns `log det F(X)` and adds `scale ·` its derivatives into `grad`/`hess`.
fn accumulate_logdet<T: Real>(
    layout: &Layout,
    map: &AffineMatrix<T>,
    vars: &[Mat<T>],
    scale: T,
    grad: Option<&mut Vector<T>>,
    hess: Option<&mut Mat<T>>,
) -> Option<T> {
    let chol = linalg::cholesky(&map.evaluate(vars))?;
    let value = linalg::logdet_from_cholesky(&chol);
    if grad.is_none() && hess.is_none() {
        return Some(value);
    }
    let w = linalg::symmetrize(&chol.inverse());
    let two: T = cast(2.0);

    if let Some(g) = grad {
        for term in &map.terms {
            let gm = term.left.transpose() * &w * &term.left;
            let (lo, _) = layout.span(term.variable);
            let c = scale * term.coefficient;
            for (k, &(a, b)) in layout.entries[term.variable].iter().enumerate() {
                let d = if a == b { gm[(a, a)] } else { two * gm[(a, b)] };
                g[lo + k] += c * d;
            }
        }
    }

    if let Some(h) = hess {
        // d²/dx_k dx_l log det F = −tr(W F_k W F_l)
        let wl: Vec<Mat<T>> = map.terms.iter().map(|t| &w * &t.left).collect();
        for ts in &map.terms {
            for (r, tr) in map.terms.iter().enumerate() {
                let u = ts.left.transpose() * &wl[r];
                let c = -scale * ts.coefficient * tr.coefficient;
                let (lo_s, _) = layout.span(ts.variable);
                let (lo_r, _) = layout.span(tr.variable);
                for (k, &(a, b)) in layout.entries[ts.variable].iter().enumerate() {
                    for (l, &(cc, d)) in layout.entries[tr.variable].iter().enumerate() {
                        h[(lo_s + k, lo_r + l)] += c * congruence_trace(&u, a, b, cc, d);
                    }
                }
            }
        }
    }
    Some(value)
}

/// `tr(E_ab U E_cd Uᵀ)` with `E_ab = e_a e_bᵀ + e_b e_aᵀ` (`e_a e_aᵀ` when `a = b`).
#[inline]
fn congruence_trace<T: Real>(u: &Mat<T>, a: usize, b: usize, c: usize, d: usize) -> T {
    let mut acc = u[(b, c)] * u[(a, d)];
    if c != d {
        acc += u[(b, d)] * u[(a, c)];
    }
    if a != b {
        acc += u[(a, c)] * u[(b, d)];
        if c != d {
            acc += u[(a, d)] * u[(b, c)];
        }
    }
    acc
}

/// Solves `program` from an internally constructed start (`X_i = ε I`
/// backtracked from `ε = 1`).
pub fn solve<T: Real>(program: &LogDetProgram<T>, config: &SolverConfig<T>) -> Result<SolverReport<T>> {
    let start = program.scaled_identity_start(T::one())?;
    solve_from(program, config, &start)
}

/// Solves `program` starting from a strictly feasible point.
///
/// Iteration caps do not abort: the report comes back with
/// `converged = false`. A Newton step that cannot decrease the merit function
/// while still far from centered is an error.
pub fn solve_from<T: Real>(
    program: &LogDetProgram<T>,
    config: &SolverConfig<T>,
    start: &[Mat<T>],
) -> Result<SolverReport<T>> {
    config.validate()?;
    program.check()?;
    if !program.is_strictly_feasible(start) {
        return Err(Error::InfeasibleStart);
    }
    let layout = Layout::new(&program.variable_dims);
    let band = program.bandwidth(&layout);
    let degree: T = cast(program.barrier_degree().max(1) as f64);
    let armijo: T = cast(ARMIJO);
    let shrink: T = cast(BACKTRACK);
    let stall_tol = config.newton_tolerance * cast(STALL_FACTOR);
    let half: T = cast(0.5);

    let mut x = layout.pack(start);
    let mut mu = config.barrier_initial;
    let mut history = Vec::new();
    let mut newton_total = 0usize;
    let mut outer = 0usize;
    let mut last_grad_norm = T::zero();
    let mut last_decrement = T::zero();
    let mut converged = false;
    let mut centering_failed = false;

    while outer < config.max_outer_iters {
        outer += 1;
        let mut centered = false;
        for _ in 0..config.max_newton_iters {
            let vars = layout.unpack(&x);
            let ev = program
                .evaluate(&layout, &vars, mu, Order::Hessian)
                .ok_or(Error::InfeasiblePoint)?;
            let g = ev.gradient.expect("requested");
            let h = ev.hessian.expect("requested");
            let dx = newton_direction(h, &g, band);
            let slope = g.dot(&dx);
            let decrement = -slope * half;
            last_grad_norm = g.amax();
            last_decrement = decrement;
            if decrement <= config.newton_tolerance {
                centered = true;
                break;
            }
            newton_total += 1;
            let mut step = T::one();
            let mut accepted = false;
            for _ in 0..MAX_BACKTRACKS {
                let trial = &x + &dx * step;
                let trial_vars = layout.unpack(&trial);
                if let Some(t) = program.evaluate(&layout, &trial_vars, mu, Order::Value) {
                    if t.merit <= ev.merit + armijo * step * slope {
                        x = trial;
                        accepted = true;
                        break;
                    }
                }
                step *= shrink;
            }
            if !accepted {
                if decrement <= stall_tol {
                    centered = true;
                    break;
                }
                return Err(Error::NewtonDivergence {
                    decrement: to_f64(decrement),
                    outer_iteration: outer,
                });
            }
        }
        let vars = layout.unpack(&x);
        let objective = program
            .evaluate(&layout, &vars, mu, Order::Value)
            .ok_or(Error::InfeasiblePoint)?
            .objective;
        history.push(objective);
        if !centered {
            centering_failed = true;
            break;
        }
        if mu * degree <= config.final_gap_tolerance {
            converged = true;
            break;
        }
        mu *= config.barrier_decrease;
    }

    let variables = layout.unpack(&x);
    let objective_value = program.objective_value(&variables).ok_or(Error::InfeasiblePoint)?;
    let feasibility_margins = program.lmi_margins(&variables);
    let trace_margins = program.trace_margins(&variables);
    Ok(SolverReport {
        objective_value,
        variables,
        outer_iterations: outer,
        newton_iterations: newton_total,
        final_gradient_norm: last_grad_norm,
        final_newton_decrement: last_decrement,
        barrier_parameter: mu,
        gap_bound: mu * degree,
        feasibility_margins,
        trace_margins,
        objective_history: history,
        converged: converged && !centering_failed,
    })
}

/// Solves `H dx = −g`, regularizing `H` if it is not numerically positive definite.
fn newton_direction<T: Real>(h: Mat<T>, g: &Vector<T>, band: usize) -> Vector<T> {
    let scale = h.diagonal().amax().max(T::one());
    let mut tau = T::zero();
    loop {
        let mut f = h.clone();
        if tau > T::zero() {
            for i in 0..f.nrows() {
                f[(i, i)] += tau;
            }
        }
        if linalg::banded_cholesky_in_place(&mut f, band) {
            return -linalg::banded_cholesky_solve(&f, band, g);
        }
        tau = if tau == T::zero() {
            scale * cast(1e-12)
        } else {
            tau * cast(10.0)
        };
    }
}

/// Worst relative disagreement between the analytic gradient of `f₀ + φ`
/// (barrier weight one) and central differences with step `step`, over every
/// packed coordinate. Each coordinate's error is scaled by
/// `max(|finite difference|, 1)`.
pub fn gradient_check<T: Real>(program: &LogDetProgram<T>, point: &[Mat<T>], step: T) -> Result<T> {
    gradient_check_at(program, point, step, T::one())
}

/// [`gradient_check`] at an arbitrary barrier weight.
pub fn gradient_check_at<T: Real>(program: &LogDetProgram<T>, point: &[Mat<T>], step: T, barrier: T) -> Result<T> {
    if !(step > T::zero()) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    program.check()?;
    if !program.is_strictly_feasible(point) {
        return Err(Error::InfeasiblePoint);
    }
    let analytic = program.merit_gradient(point, barrier)?;
    let two: T = cast(2.0);
    let mut worst = T::zero();
    for (k, &g) in analytic.iter().enumerate() {
        let plus = program
            .merit_value(&program.perturb(point, k, step), barrier)
            .ok_or(Error::InfeasiblePoint)?;
        let minus = program
            .merit_value(&program.perturb(point, k, -step), barrier)
            .ok_or(Error::InfeasiblePoint)?;
        let fd = (plus - minus) / (two * step);
        worst = worst.max((g - fd).abs() / fd.abs().max(T::one()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> Mat<f64> {
        Mat::from_element(1, 1, x)
    }

    /// minimize ½ log(a²P + σ) − ½ log P  s.t.  P ≤ a²P + σ, P ≤ D
    fn scalar_srd(a: f64, sigma: f64, d: f64) -> LogDetProgram<f64> {
        let mut prog = LogDetProgram::new(vec![1]);
        prog.add_logdet(0.5, AffineMatrix::constant(scalar(sigma)).congruence(0, 1.0, scalar(a)))
            .add_logdet(-0.5, AffineMatrix::zero(1).plus(0, 1.0))
            .add_lmi(AffineMatrix::constant(scalar(sigma)).congruence(0, 1.0, scalar(a)).plus(0, -1.0))
            .add_trace_bound(0, d);
        prog
    }

    #[test]
    fn barrier_pushes_to_boundary() {
        let mut prog = LogDetProgram::new(vec![1]);
        prog.add_logdet(-0.5, AffineMatrix::zero(1).plus(0, 1.0))
            .add_lmi(AffineMatrix::constant(scalar(1.0)).plus(0, -1.0))
            .add_trace_bound(0, 1.0);
        let rep = solve(&prog, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert!((rep.variables[0][(0, 0)] - 1.0).abs() < 1e-8);
        assert!(rep.objective_value.abs() < 1e-8);
    }

    #[test]
    fn scalar_program_matches_closed_form() {
        let prog = scalar_srd(1.0, 1.0, 0.5);
        let rep = solve(&prog, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert!((rep.objective_value - 0.5 * 3f64.ln()).abs() < 1e-8);
        assert!((rep.variables[0][(0, 0)] - 0.5).abs() < 1e-8);
        assert!(rep.feasibility_margins.iter().all(|&m| m >= -1e-9));
    }

    #[test]
    fn objective_history_is_non_increasing() {
        let prog = scalar_srd(0.5, 1.0, 0.7);
        let rep = solve(&prog, &SolverConfig::default()).unwrap();
        for w in rep.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{:?}", rep.objective_history);
        }
    }

    #[test]
    fn solves_are_deterministic() {
        let prog = scalar_srd(6.0, 1.0, 0.3);
        let a = solve(&prog, &SolverConfig::default()).unwrap();
        let b = solve(&prog, &SolverConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn logdet_gradient_at_identity() {
        let mut prog = LogDetProgram::<f64>::new(vec![2]);
        prog.add_logdet(-0.5, AffineMatrix::zero(2).plus(0, 1.0));
        let g = prog.merit_gradient(&[Mat::identity(2, 2)], 1.0).unwrap();
        // packed (0,0), (0,1), (1,1)
        assert!((g[0] + 0.5).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);
        assert!((g[2] + 0.5).abs() < 1e-15);
        assert!(gradient_check(&prog, &[Mat::identity(2, 2)], 1e-6).unwrap() < 1e-6);
    }

    #[test]
    fn scalar_gradient_check() {
        let prog = scalar_srd(1.0, 1.0, 0.9);
        assert!(gradient_check(&prog, &[scalar(0.5)], 1e-6).unwrap() < 1e-5);
    }

    #[test]
    fn hessian_matches_finite_differences_of_gradient() {
        let a = Mat::<f64>::from_row_slice(2, 2, &[1.2, 0.3, -0.4, 0.7]);
        let w = Mat::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.5]);
        let mut prog = LogDetProgram::new(vec![2, 2]);
        prog.add_logdet(0.5, AffineMatrix::constant(w.clone()).congruence(0, 1.0, a.clone()))
            .add_logdet(-0.5, AffineMatrix::zero(2).plus(1, 1.0))
            .add_lmi(AffineMatrix::constant(w.clone()).congruence(0, 1.0, a.clone()).plus(1, -1.0))
            .add_lmi(AffineMatrix::constant(Mat::identity(2, 2)).plus(0, -1.0))
            .add_trace_bound(0, 3.0)
            .add_trace_bound(1, 3.0);
        let p0 = Mat::from_row_slice(2, 2, &[0.4, 0.05, 0.05, 0.3]);
        let p1 = Mat::from_row_slice(2, 2, &[0.3, -0.02, -0.02, 0.2]);
        let point = vec![p0, p1];
        assert!(prog.is_strictly_feasible(&point));
        let mu = 0.3;
        let h = prog.merit_hessian(&point, mu).unwrap();
        let n = prog.coordinate_count();
        let step = 1e-6;
        for l in 0..n {
            let gp = prog.merit_gradient(&prog.perturb(&point, l, step), mu).unwrap();
            let gm = prog.merit_gradient(&prog.perturb(&point, l, -step), mu).unwrap();
            for k in 0..n {
                let fd = (gp[k] - gm[k]) / (2.0 * step);
                assert!((h[(k, l)] - fd).abs() < 1e-5 * fd.abs().max(1.0), "H[{k},{l}] {} vs {fd}", h[(k, l)]);
            }
        }
        assert!(gradient_check_at(&prog, &point, 1e-6, mu).unwrap() < 1e-6);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let prog = scalar_srd(1.0, 1.0, 0.5);
        let cfg = SolverConfig {
            max_outer_iters: 2,
            ..SolverConfig::default()
        };
        let rep = solve(&prog, &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.outer_iterations, 2);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let prog = scalar_srd(1.0, 1.0, 0.5);
        assert_eq!(
            solve_from(&prog, &SolverConfig::default(), &[scalar(0.9)]).unwrap_err(),
            Error::InfeasibleStart
        );
        assert_eq!(gradient_check(&prog, &[scalar(-1.0)], 1e-6).unwrap_err(), Error::InfeasiblePoint);
    }

    #[test]
    fn inconsistent_program_is_rejected() {
        let mut prog = LogDetProgram::<f64>::new(vec![2]);
        prog.add_lmi(AffineMatrix::zero(3).plus(0, 1.0));
        assert!(matches!(prog.check(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn single_precision_solve() {
        let mut prog = LogDetProgram::<f32>::new(vec![1]);
        let one = Mat::from_element(1, 1, 1.0f32);
        prog.add_logdet(0.5, AffineMatrix::constant(one.clone()).plus(0, 1.0))
            .add_logdet(-0.5, AffineMatrix::zero(1).plus(0, 1.0))
            .add_lmi(AffineMatrix::constant(one).plus(0, 1.0).plus(0, -1.0))
            .add_trace_bound(0, 0.5);
        let rep = solve(&prog, &SolverConfig::relaxed()).unwrap();
        assert!((rep.objective_value - 0.549_306).abs() < 1e-3);
    }
}
