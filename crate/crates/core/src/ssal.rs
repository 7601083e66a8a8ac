//! The outer splitting loop.
//!
//! With `y = x` split off and `L_ρ(x, y, λ) = f(x) + λᵀ(y − x) + (ρ/2)‖y − x‖²`:
//!
//! ```text
//! x⁰ = argmin_{x ∈ X} L_ρ(x, y⁰, λ⁰)
//! while ‖xᵏ − yᵏ‖² > ε:
//!     yᵏ⁺¹ = Π_Y(xᵏ − λᵏ/ρ)                  (closed form, see `semiproj`)
//!     xᵏ⁺¹ = argmin_{x ∈ X} L_ρ(x, yᵏ⁺¹, λᵏ)
//!     λᵏ⁺¹ = λᵏ + ωρ(yᵏ⁺¹ − xᵏ⁺¹)
//! ```
//!
//! The y-step is exact because `L_ρ(xᵏ, y, λᵏ) = const + (ρ/2)‖y − w‖²` with
//! `w = xᵏ − λᵏ/ρ`. After the loop the support `z` is fixed and `f` is
//! minimized over `X` restricted to it, which yields a point feasible for
//! both sets.

use std::time::Instant;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::inner::{solve_restricted, InnerSolverOpts, XSubproblem};
use crate::model::ProblemSpec;
use crate::semiproj::project_semicard;
use crate::stationarity::{stationarity_residual, DEFAULT_ZERO_TOL};

/// Step size used by the portfolio experiments.
pub const PORTFOLIO_OMEGA: f64 = 0.3;
/// Step size used by the compressed-sensing experiments.
pub const SENSING_OMEGA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub rho: f64,
    pub omega: f64,
    /// Threshold on the squared gap `‖x − y‖²`.
    pub epsilon: f64,
    pub max_outer: usize,
    /// Initial multiplier; zero when `None`.
    pub lambda0: Option<DVector<f64>>,
    /// Initial `y ∈ Y`; zero when `None`.
    pub y0: Option<DVector<f64>>,
    pub inner: InnerSolverOpts,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            rho: 1.0,
            omega: PORTFOLIO_OMEGA,
            epsilon: 1e-4,
            max_outer: 500,
            lambda0: None,
            y0: None,
            inner: InnerSolverOpts::default(),
        }
    }
}

impl SolverParams {
    pub fn portfolio() -> Self {
        Self::default()
    }

    pub fn compressed_sensing() -> Self {
        Self {
            omega: SENSING_OMEGA,
            ..Self::default()
        }
    }

    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.omega > 0.0 && self.omega <= 2.0) {
            return Err(Error::InvalidArgument(format!("omega must lie in (0, 2], got {}", self.omega)));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        self.inner.validate()?;
        let n = spec.dim();
        if let Some(l) = &self.lambda0 {
            check_dim("initial multiplier", n, l.len())?;
        }
        if let Some(y) = &self.y0 {
            check_dim("initial y", n, y.len())?;
            if !spec.y_set.contains(y, 0.0) {
                return Err(Error::InvalidArgument("initial y is not in Y".into()));
            }
        }
        Ok(())
    }
}

/// Snapshot of the iterates after outer iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub k: usize,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub z: Vec<u8>,
    pub lambda: DVector<f64>,
    /// `‖x − y‖²`.
    pub primal_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub k: usize,
    pub primal_residual: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub x_final: Vec<f64>,
    pub y_final: Vec<f64>,
    pub z_final: Vec<u8>,
    pub x_polished: Option<Vec<f64>>,
    pub objective_x: f64,
    pub objective_y: f64,
    pub objective_polished: Option<f64>,
    pub polish_error: Option<String>,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub primal_residual_final: f64,
    /// Stationarity residual of the polished point.
    pub stationarity_residual: Option<f64>,
    pub converged: bool,
    pub wall_time: f64,
    pub per_iteration_trace: Vec<TraceEntry>,
}

impl SolveReport {
    /// The polished point when polishing succeeded, otherwise `y_final`.
    pub fn deliverable(&self) -> &[f64] {
        self.x_polished.as_deref().unwrap_or(&self.y_final)
    }
}

/// `λ + ωρ(y − x)`.
pub fn update_multiplier(
    lambda: &DVector<f64>,
    y: &DVector<f64>,
    x: &DVector<f64>,
    omega: f64,
    rho: f64,
) -> Result<DVector<f64>> {
    check_dim("multiplier update y", lambda.len(), y.len())?;
    check_dim("multiplier update x", lambda.len(), x.len())?;
    Ok(DVector::from_fn(lambda.len(), |i, _| lambda[i] + omega * rho * (y[i] - x[i])))
}

fn support_mask(z: &[u8]) -> Vec<bool> {
    z.iter().map(|&zi| zi == 1).collect()
}

fn polish_from(
    spec: &ProblemSpec,
    z: &[u8],
    start: &DVector<f64>,
    f_curvature: f64,
    opts: &InnerSolverOpts,
) -> Result<(DVector<f64>, f64)> {
    check_dim("support indicator", spec.dim(), z.len())?;
    let active = z.iter().filter(|&&zi| zi == 1).count();
    if active > spec.y_set.cardinality() {
        return Err(Error::InvalidArgument(format!(
            "support of size {active} exceeds K = {}",
            spec.y_set.cardinality()
        )));
    }
    match solve_restricted(spec, &support_mask(z), start, f_curvature, opts)? {
        Some(sol) => {
            let value = spec.objective.value(&sol.x);
            Ok((sol.x, value))
        }
        None => Err(Error::PolishInfeasible),
    }
}

/// Minimizes `f` over `X ∩ {xᵢ = 0 : zᵢ = 0} ∩ {aᵢ ≤ xᵢ ≤ bᵢ : zᵢ = 1}`.
pub fn polish(spec: &ProblemSpec, z: &[u8], opts: &InnerSolverOpts) -> Result<(DVector<f64>, f64)> {
    let start = DVector::zeros(spec.dim());
    polish_from(spec, z, &start, spec.objective.curvature_estimate(), opts)
}

pub fn run(spec: &ProblemSpec, params: &SolverParams) -> Result<SolveReport> {
    run_observed(spec, params, |_, _| {})
}

/// Runs the solver and calls `observer(previous, current)` after every outer
/// iteration.
pub fn run_observed<F>(spec: &ProblemSpec, params: &SolverParams, mut observer: F) -> Result<SolveReport>
where
    F: FnMut(&IterateState, &IterateState),
{
    params.validate(spec)?;
    let started = Instant::now();
    let n = spec.dim();
    let (rho, omega) = (params.rho, params.omega);
    let xsub = XSubproblem::new(spec, params.inner)?;

    let y0 = params.y0.clone().unwrap_or_else(|| DVector::zeros(n));
    let lambda0 = params.lambda0.clone().unwrap_or_else(|| DVector::zeros(n));
    let first = xsub.solve(&y0, &lambda0, rho, &y0)?;
    let mut inner_iterations = first.iterations;
    let z0 = y0.iter().map(|&v| u8::from(v != 0.0)).collect();
    let mut state = IterateState {
        k: 0,
        primal_residual: (&first.x - &y0).norm_squared(),
        x: first.x,
        y: y0,
        z: z0,
        lambda: lambda0,
    };
    let mut trace = vec![TraceEntry {
        k: 0,
        primal_residual: state.primal_residual,
        objective: spec.objective.value(&state.x),
    }];

    while state.primal_residual > params.epsilon && state.k < params.max_outer {
        let k = state.k + 1;
        let w = &state.x - &state.lambda / rho;
        let (y, z) = project_semicard(&w, &spec.y_set)?;
        let sol = xsub.solve(&y, &state.lambda, rho, &state.x).map_err(|e| Error::AtIteration {
            iteration: k,
            source: Box::new(e),
        })?;
        inner_iterations += sol.iterations;
        let lambda = update_multiplier(&state.lambda, &y, &sol.x, omega, rho)?;
        let next = IterateState {
            k,
            primal_residual: (&sol.x - &y).norm_squared(),
            x: sol.x,
            y,
            z,
            lambda,
        };
        let objective = spec.objective.value(&next.x);
        log::trace!(
            "k={k} gap={:.3e} f(x)={objective:.6e} |supp|={} inner={}",
            next.primal_residual,
            next.z.iter().filter(|&&v| v == 1).count(),
            sol.iterations
        );
        trace.push(TraceEntry {
            k,
            primal_residual: next.primal_residual,
            objective,
        });
        observer(&state, &next);
        state = next;
    }
    let converged = state.primal_residual <= params.epsilon;

    let (x_polished, objective_polished, polish_error, stationarity) =
        match polish_from(spec, &state.z, &state.y, xsub.f_curvature(), &params.inner) {
            Ok((xp, value)) => {
                let residual = stationarity_residual(spec, &xp, DEFAULT_ZERO_TOL)
                    .map(|c| c.residual)
                    .ok();
                (Some(xp.as_slice().to_vec()), Some(value), None, residual)
            }
            Err(e) => (None, None, Some(e.to_string()), None),
        };

    let report = SolveReport {
        objective_x: spec.objective.value(&state.x),
        objective_y: spec.objective.value(&state.y),
        x_final: state.x.as_slice().to_vec(),
        y_final: state.y.as_slice().to_vec(),
        z_final: state.z,
        x_polished,
        objective_polished,
        polish_error,
        outer_iterations: state.k,
        inner_iterations,
        primal_residual_final: state.primal_residual,
        stationarity_residual: stationarity,
        converged,
        wall_time: started.elapsed().as_secs_f64(),
        per_iteration_trace: trace,
    };
    log::info!(
        "ssal finished: converged={} iterations={} gap={:.3e} f(polished)={:?}",
        report.converged,
        report.outer_iterations,
        report.primal_residual_final,
        report.objective_polished
    );
    Ok(report)
}
