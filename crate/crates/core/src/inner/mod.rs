//! The convex x-subproblem: minimize `L_ρ(x, y, λ)` over `X`.
//!
//! Projected gradient with a Barzilai–Borwein trial step and monotone Armijo
//! backtracking along the projection arc. The first trial step is the
//! inverse of a power-iteration curvature estimate. The risk cap
//! `xᵀDx ≤ σ₀` is not projected onto; it is enforced by an outer
//! augmented-Lagrangian loop on its scalar multiplier.

mod projection;

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::model::{BoxBounds, ConvexSetX, ObjectiveKind, ProblemSpec, RiskCap};

pub use projection::{project_box, project_polytope};

/// Armijo backtracking parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRule {
    /// Multiplier on the curvature-based (or Barzilai–Borwein) trial step.
    pub init_step: f64,
    pub shrink: f64,
    pub armijo_c: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        Self {
            init_step: 1.0,
            shrink: 0.5,
            armijo_c: 1e-4,
        }
    }
}

/// Outer augmented-Lagrangian loop on the risk cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskPenalty {
    pub init_multiplier: f64,
    pub penalty: f64,
    /// Penalty growth when the violation fails to drop by a factor of four.
    pub growth: f64,
    /// The cap is declared infeasible once the penalty would pass this value.
    pub max_penalty: f64,
    pub outer_iters: usize,
    pub feas_tol: f64,
}

impl Default for RiskPenalty {
    fn default() -> Self {
        Self {
            init_multiplier: 0.0,
            penalty: 10.0,
            growth: 10.0,
            max_penalty: 1e12,
            outer_iters: 50,
            feas_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolverOpts {
    pub max_iters: usize,
    /// Threshold on `‖x − Π_X(x − ∇φ(x))‖∞`.
    pub grad_tol: f64,
    pub step: StepRule,
    /// Iteration cap of the return-floor root search inside the projection.
    pub projection_iters: usize,
    /// Accuracy of the return-floor root search, in units of `‖μ‖`.
    pub projection_tol: f64,
    pub risk: RiskPenalty,
}

impl Default for InnerSolverOpts {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            grad_tol: 1e-8,
            step: StepRule::default(),
            projection_iters: 500,
            projection_tol: 1e-12,
            risk: RiskPenalty::default(),
        }
    }
}

impl InnerSolverOpts {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.grad_tol > 0.0
            && self.step.init_step > 0.0
            && self.step.shrink > 0.0
            && self.step.shrink < 1.0
            && self.step.armijo_c > 0.0
            && self.step.armijo_c < 1.0
            && self.projection_iters > 0
            && self.projection_tol > 0.0
            && self.risk.penalty > 0.0
            && self.risk.growth >= 1.0
            && self.risk.max_penalty >= self.risk.penalty
            && self.risk.init_multiplier >= 0.0
            && self.risk.outer_iters > 0
            && self.risk.feas_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("inner solver options out of range".into()))
        }
    }
}

/// A smooth convex function the projected-gradient loop can minimize.
pub(crate) trait Smooth {
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    /// `value(x_new) − value(x)`, computed from the step.
    fn difference(&self, x: &DVector<f64>, x_new: &DVector<f64>) -> f64;
}

impl Smooth for ObjectiveKind {
    fn value(&self, x: &DVector<f64>) -> f64 {
        ObjectiveKind::value(self, x)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        ObjectiveKind::gradient(self, x)
    }
    fn difference(&self, x: &DVector<f64>, x_new: &DVector<f64>) -> f64 {
        ObjectiveKind::difference(self, x, x_new)
    }
}

/// `x ↦ L_ρ(x, y, λ)` for fixed `y`, `λ`.
struct Lagrangian<'a> {
    f: &'a ObjectiveKind,
    y: &'a DVector<f64>,
    lambda: &'a DVector<f64>,
    rho: f64,
}

impl Smooth for Lagrangian<'_> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let gap = self.y - x;
        self.f.value(x) + self.lambda.dot(&gap) + 0.5 * self.rho * gap.norm_squared()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.f.gradient(x) - self.lambda - (self.y - x) * self.rho
    }

    fn difference(&self, x: &DVector<f64>, x_new: &DVector<f64>) -> f64 {
        let step = x_new - x;
        let mid = x_new + x - self.y * 2.0;
        self.f.difference(x, x_new) - self.lambda.dot(&step) + 0.5 * self.rho * step.dot(&mid)
    }
}

/// Adds `(c/2)·max(0, g(x) − σ₀ + μ/c)² − μ²/(2c)` to a base function.
struct RiskAugmented<'a, S: Smooth> {
    base: &'a S,
    risk: &'a RiskCap,
    multiplier: f64,
    penalty: f64,
}

impl<S: Smooth> RiskAugmented<'_, S> {
    fn shifted(&self, x: &DVector<f64>) -> f64 {
        (self.risk.value(x) - self.risk.sigma0 + self.multiplier / self.penalty).max(0.0)
    }

    fn penalty_term(&self, x: &DVector<f64>) -> f64 {
        let s = self.shifted(x);
        0.5 * self.penalty * s * s - self.multiplier * self.multiplier / (2.0 * self.penalty)
    }
}

impl<S: Smooth> Smooth for RiskAugmented<'_, S> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.base.value(x) + self.penalty_term(x)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let s = self.shifted(x);
        let mut g = self.base.gradient(x);
        if s > 0.0 {
            g += self.risk.gradient(x) * (self.penalty * s);
        }
        g
    }

    fn difference(&self, x: &DVector<f64>, x_new: &DVector<f64>) -> f64 {
        let (s0, s1) = (self.shifted(x), self.shifted(x_new));
        self.base.difference(x, x_new) + 0.5 * self.penalty * (s1 - s0) * (s1 + s0)
    }
}

/// Result of one inner minimization.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub x: DVector<f64>,
    /// Projected-gradient iterations, summed over risk-penalty rounds.
    pub iterations: usize,
    /// Final `‖x − Π(x − ∇φ(x))‖∞` of the last round.
    pub residual: f64,
    /// Multiplier of the risk cap when that block is present.
    pub risk_multiplier: Option<f64>,
}

struct PgOutcome {
    x: DVector<f64>,
    iterations: usize,
    residual: f64,
}

fn projected_gradient<S: Smooth>(
    objective: &S,
    x_set: &ConvexSetX,
    start: &DVector<f64>,
    curvature: f64,
    opts: &InnerSolverOpts,
    grad_tol: f64,
) -> Result<PgOutcome> {
    let project = |p: &DVector<f64>| project_polytope(p, x_set, opts);
    let mut x = project(start)?;
    let mut g = objective.gradient(&x);
    let base_step = if curvature > 0.0 { 1.0 / curvature } else { 1.0 };
    let mut step = base_step;
    let mut residual = f64::INFINITY;

    for it in 0..opts.max_iters {
        residual = (&x - project(&(&x - &g))?).amax();
        if residual <= grad_tol {
            return Ok(PgOutcome {
                x,
                iterations: it,
                residual,
            });
        }

        // Decreases below this are lost to rounding in the function value.
        let roundoff = 8.0 * f64::EPSILON * objective.value(&x).abs().max(1.0);
        let mut t = opts.step.init_step * step;
        let mut accepted = None;
        for _ in 0..80 {
            let candidate = project(&(&x - &g * t))?;
            let d = &candidate - &x;
            if d.amax() == 0.0 {
                break;
            }
            let predicted = g.dot(&d);
            if objective.difference(&x, &candidate) <= opts.step.armijo_c * predicted + roundoff {
                accepted = Some(candidate);
                break;
            }
            t *= opts.step.shrink;
        }
        let Some(next) = accepted else {
            return Err(Error::LineSearchStalled {
                iterations: it,
                residual,
            });
        };

        let g_next = objective.gradient(&next);
        let s = &next - &x;
        let yv = &g_next - &g;
        let sy = s.dot(&yv);
        step = if sy > 0.0 {
            (s.norm_squared() / sy).clamp(1e-6 * base_step, 1e6 * base_step)
        } else {
            base_step
        };
        x = next;
        g = g_next;
    }
    Err(Error::InnerNotConverged {
        iterations: opts.max_iters,
        residual,
    })
}

/// Minimizes a smooth convex function over `X`, including the risk cap when present.
pub(crate) fn minimize_over<S: Smooth>(
    objective: &S,
    x_set: &ConvexSetX,
    start: &DVector<f64>,
    curvature: f64,
    opts: &InnerSolverOpts,
    grad_tol: f64,
) -> Result<InnerSolution> {
    let Some(risk) = &x_set.risk else {
        let out = projected_gradient(objective, x_set, start, curvature, opts, grad_tol)?;
        return Ok(InnerSolution {
            x: out.x,
            iterations: out.iterations,
            residual: out.residual,
            risk_multiplier: None,
        });
    };

    let rp = &opts.risk;
    let mut multiplier = rp.init_multiplier;
    let mut penalty = rp.penalty;
    let mut last_violation = f64::INFINITY;
    let mut x = start.clone();
    let mut iterations = 0;
    for _ in 0..rp.outer_iters {
        let augmented = RiskAugmented {
            base: objective,
            risk,
            multiplier,
            penalty,
        };
        let out = projected_gradient(&augmented, x_set, &x, curvature, opts, grad_tol)?;
        iterations += out.iterations;
        x = out.x;
        let violation = risk.value(&x) - risk.sigma0;
        let next_multiplier = (multiplier + penalty * violation).max(0.0);
        let slack = (-violation).max(0.0);
        if violation <= rp.feas_tol && multiplier * slack <= grad_tol {
            return Ok(InnerSolution {
                x,
                iterations,
                residual: out.residual,
                risk_multiplier: Some(multiplier),
            });
        }
        if violation > 0.25 * last_violation {
            penalty *= rp.growth;
            if penalty > rp.max_penalty {
                break;
            }
        }
        last_violation = violation.max(0.0);
        multiplier = next_multiplier;
    }
    Err(Error::RiskInfeasible {
        violation: risk.value(&x) - risk.sigma0,
    })
}

/// Reusable solver for `min_{x ∈ X} L_ρ(x, y, λ)` with the curvature of `f`
/// estimated once.
#[derive(Debug, Clone)]
pub struct XSubproblem<'a> {
    spec: &'a ProblemSpec,
    opts: InnerSolverOpts,
    f_curvature: f64,
}

impl<'a> XSubproblem<'a> {
    pub fn new(spec: &'a ProblemSpec, opts: InnerSolverOpts) -> Result<Self> {
        opts.validate()?;
        Ok(Self {
            spec,
            opts,
            f_curvature: spec.objective.curvature_estimate(),
        })
    }

    pub fn f_curvature(&self) -> f64 {
        self.f_curvature
    }

    /// Solves from `warm_start` (projected onto `X` first).
    pub fn solve(
        &self,
        y: &DVector<f64>,
        lambda: &DVector<f64>,
        rho: f64,
        warm_start: &DVector<f64>,
    ) -> Result<InnerSolution> {
        let n = self.spec.dim();
        check_dim("x-subproblem y", n, y.len())?;
        check_dim("x-subproblem lambda", n, lambda.len())?;
        check_dim("x-subproblem warm start", n, warm_start.len())?;
        if !(rho > 0.0) {
            return Err(Error::InvalidArgument(format!("penalty must be positive, got {rho}")));
        }
        let lagrangian = Lagrangian {
            f: &self.spec.objective,
            y,
            lambda,
            rho,
        };
        minimize_over(
            &lagrangian,
            &self.spec.x_set,
            warm_start,
            self.f_curvature + rho,
            &self.opts,
            self.opts.grad_tol,
        )
    }
}

/// One-shot x-subproblem solve, warm-started at `y`.
pub fn solve_x_subproblem(
    spec: &ProblemSpec,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    rho: f64,
    opts: &InnerSolverOpts,
) -> Result<DVector<f64>> {
    Ok(XSubproblem::new(spec, *opts)?.solve(y, lambda, rho, y)?.x)
}

/// `X` intersected with `{xᵢ = 0 : i ∉ support} ∩ {aᵢ ≤ xᵢ ≤ bᵢ : i ∈ support}`.
/// Returns `None` when the tightened box is already empty.
pub(crate) fn restrict_to_support(spec: &ProblemSpec, on: &[bool]) -> Option<ConvexSetX> {
    let n = spec.dim();
    let (a, b) = (spec.y_set.lower(), spec.y_set.upper());
    let (mut lower, mut upper) = match &spec.x_set.bounds {
        Some(bx) => (bx.lower.clone(), bx.upper.clone()),
        None => (
            DVector::from_element(n, f64::NEG_INFINITY),
            DVector::from_element(n, f64::INFINITY),
        ),
    };
    for i in 0..n {
        if on[i] {
            lower[i] = lower[i].max(a[i]);
            upper[i] = upper[i].min(b[i]);
        } else {
            if lower[i] > 0.0 || upper[i] < 0.0 {
                return None;
            }
            lower[i] = 0.0;
            upper[i] = 0.0;
        }
        if lower[i] > upper[i] {
            return None;
        }
    }
    Some(ConvexSetX {
        bounds: Some(BoxBounds { lower, upper }),
        ..spec.x_set.clone()
    })
}

/// Solution of `min f` over [`restrict_to_support`]; `Ok(None)` when the
/// restriction is empty.
pub(crate) fn solve_restricted(
    spec: &ProblemSpec,
    on: &[bool],
    start: &DVector<f64>,
    f_curvature: f64,
    opts: &InnerSolverOpts,
) -> Result<Option<InnerSolution>> {
    let Some(set) = restrict_to_support(spec, on) else {
        return Ok(None);
    };
    match minimize_over(&spec.objective, &set, start, f_curvature, opts, opts.grad_tol) {
        Ok(sol) => Ok(Some(sol)),
        Err(Error::EmptySet(_)) | Err(Error::RiskInfeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ReturnFloor, SemicontinuousSet};
    use super::projection::max_return;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn shifted_identity(c: &[f64], x_set: ConvexSetX) -> ProblemSpec {
        let n = c.len();
        ProblemSpec::new(
            ObjectiveKind::LeastSquares {
                a: DMatrix::identity(n, n),
                b_obs: v(c),
            },
            x_set,
            SemicontinuousSet::uniform(n, 0.1, 1.0, n).unwrap(),
        )
        .unwrap()
    }

    fn stationarity(spec: &ProblemSpec, x: &DVector<f64>, y: &DVector<f64>, lambda: &DVector<f64>, rho: f64) -> f64 {
        let g = spec.objective.gradient(x) - lambda - (y - x) * rho;
        (x - project_polytope(&(x - g), &spec.x_set, &InnerSolverOpts::default()).unwrap()).amax()
    }

    #[test]
    fn separable_quadratic_is_solved_coordinatewise() {
        let c = [3.0, -2.0, 25.0, 0.4];
        let spec = shifted_identity(&c, ConvexSetX::uniform_box(4, 0.0, 10.0));
        let y = v(&[1.0, 0.5, 0.0, 0.2]);
        let x = solve_x_subproblem(&spec, &y, &DVector::zeros(4), 1.0, &InnerSolverOpts::default()).unwrap();
        for i in 0..4 {
            let expected = ((c[i] + y[i]) / 2.0).clamp(0.0, 10.0);
            assert_abs_diff_eq!(x[i], expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn large_penalty_tracks_the_projection_of_y() {
        let mut x_set = ConvexSetX::uniform_box(3, 0.0, 0.6);
        x_set.budget = true;
        let spec = shifted_identity(&[0.2, 0.9, -0.4], x_set);
        let y = v(&[0.9, 0.0, 0.3]);
        let x = solve_x_subproblem(&spec, &y, &DVector::zeros(3), 1e6, &InnerSolverOpts::default()).unwrap();
        let target = project_polytope(&y, &spec.x_set, &InnerSolverOpts::default()).unwrap();
        assert!((x - target).amax() <= 1e-3);
    }

    #[test]
    fn joint_minimizer_is_returned() {
        let spec = shifted_identity(&[0.3, 0.7], ConvexSetX::uniform_box(2, 0.0, 1.0));
        let y = v(&[0.3, 0.7]);
        let x = solve_x_subproblem(&spec, &y, &DVector::zeros(2), 1.0, &InnerSolverOpts::default()).unwrap();
        assert!((x - y).amax() <= 1e-8);
    }

    #[test]
    fn rejects_nonpositive_penalty() {
        let spec = shifted_identity(&[0.3], ConvexSetX::uniform_box(1, 0.0, 1.0));
        let r = solve_x_subproblem(&spec, &v(&[0.0]), &v(&[0.0]), 0.0, &InnerSolverOpts::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let m = DMatrix::from_fn(6, 6, |i, j| if i == j { 10f64.powi(i as i32) } else { 0.0 });
        let spec = ProblemSpec::new(
            ObjectiveKind::QuadraticForm { m },
            ConvexSetX::uniform_box(6, -5.0, 5.0),
            SemicontinuousSet::uniform(6, 0.1, 1.0, 6).unwrap(),
        )
        .unwrap();
        let opts = InnerSolverOpts {
            max_iters: 2,
            grad_tol: 1e-14,
            ..Default::default()
        };
        let r = solve_x_subproblem(&spec, &DVector::from_element(6, 1.0), &DVector::zeros(6), 1.0, &opts);
        assert!(matches!(r, Err(Error::InnerNotConverged { iterations: 2, .. })));
    }

    #[test]
    fn risk_cap_is_enforced() {
        let n = 4;
        let mut x_set = ConvexSetX::uniform_box(n, 0.0, 1.0);
        x_set.budget = true;
        x_set.risk = Some(RiskCap {
            d: v(&[1.0, 1.0, 1.0, 1.0]),
            sigma0: 0.4,
        });
        // Unconstrained the solve would concentrate on the first coordinate (risk 1.0).
        let spec = shifted_identity(&[1.0, 0.0, 0.0, 0.0], x_set);
        let sol = XSubproblem::new(&spec, InnerSolverOpts::default())
            .unwrap()
            .solve(&v(&[1.0, 0.0, 0.0, 0.0]), &DVector::zeros(n), 1.0, &DVector::from_element(n, 0.25))
            .unwrap();
        let risk = spec.x_set.risk.as_ref().unwrap();
        assert!(risk.value(&sol.x) <= 0.4 + 1e-8);
        assert!(sol.risk_multiplier.unwrap() > 0.0);
        // Symmetric minimizer on the sphere ‖x‖² = 0.4 with eᵀx = 1.
        assert_abs_diff_eq!(sol.x[1], sol.x[2], epsilon = 1e-6);
        assert_abs_diff_eq!(sol.x.sum(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.x.norm_squared(), 0.4, epsilon = 1e-6);
    }

    #[test]
    fn infeasible_risk_cap_is_an_error() {
        let mut x_set = ConvexSetX::uniform_box(2, 0.0, 1.0);
        x_set.budget = true;
        // min ‖x‖² on the budget line is 0.5 > 0.1.
        x_set.risk = Some(RiskCap { d: v(&[1.0, 1.0]), sigma0: 0.1 });
        let spec = shifted_identity(&[0.5, 0.5], x_set);
        let r = solve_x_subproblem(&spec, &v(&[0.5, 0.5]), &DVector::zeros(2), 1.0, &InnerSolverOpts::default());
        assert!(matches!(r, Err(Error::RiskInfeasible { .. })), "{r:?}");
    }

    #[test]
    fn restriction_respects_support() {
        let spec = shifted_identity(&[0.5, 0.02], ConvexSetX::uniform_box(2, 0.0, 10.0));
        let set = restrict_to_support(&spec, &[true, false]).unwrap();
        let bx = set.bounds.unwrap();
        assert_eq!(bx.lower.as_slice(), &[0.1, 0.0]);
        assert_eq!(bx.upper.as_slice(), &[1.0, 0.0]);
        let positive = shifted_identity(&[0.5], ConvexSetX::uniform_box(1, 0.2, 10.0));
        assert!(restrict_to_support(&positive, &[false]).is_none());
    }

    /// Cyclic coordinate descent on a box, an independent reference.
    fn coordinate_descent(m: &DMatrix<f64>, shift: &DVector<f64>, lo: f64, hi: f64, sweeps: usize) -> DVector<f64> {
        // minimizes xᵀMx − shiftᵀx
        let n = shift.len();
        let mut x = DVector::zeros(n);
        for _ in 0..sweeps {
            for i in 0..n {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)] * x[j]).sum();
                let xi = (shift[i] - 2.0 * off) / (2.0 * m[(i, i)]);
                x[i] = xi.clamp(lo, hi);
            }
        }
        x
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn box_quadratic_matches_coordinate_descent(
            raw in prop::collection::vec(-1.0f64..1.0, 25),
            y in prop::collection::vec(-2.0f64..2.0, 5),
            lambda in prop::collection::vec(-1.0f64..1.0, 5),
        ) {
            let b = DMatrix::from_row_slice(5, 5, &raw);
            let m = b.transpose() * &b + DMatrix::identity(5, 5) * 0.05;
            let spec = ProblemSpec::new(
                ObjectiveKind::QuadraticForm { m: m.clone() },
                ConvexSetX::uniform_box(5, -0.5, 0.5),
                SemicontinuousSet::uniform(5, 0.1, 1.0, 2).unwrap(),
            ).unwrap();
            let (y, lambda) = (DVector::from_vec(y), DVector::from_vec(lambda));
            let rho = 1.0;
            let x = solve_x_subproblem(&spec, &y, &lambda, rho, &InnerSolverOpts::default()).unwrap();
            // L_ρ = xᵀ(M + ρ/2 I)x − (λ + ρy)ᵀx + const.
            let m_aug = &m + DMatrix::identity(5, 5) * (rho / 2.0);
            let shift = &lambda + &y * rho;
            let reference = coordinate_descent(&m_aug, &shift, -0.5, 0.5, 200);
            let objective = |p: &DVector<f64>| p.dot(&(&m_aug * p)) - shift.dot(p);
            prop_assert!((objective(&x) - objective(&reference)).abs() <= 1e-6);
        }

        #[test]
        fn solution_is_feasible_stationary_and_descends(
            mu in prop::collection::vec(0.0f64..0.03, 6),
            raw in prop::collection::vec(-0.1f64..0.1, 36),
            y in prop::collection::vec(0.0f64..0.4, 6),
            lambda in prop::collection::vec(-0.1f64..0.1, 6),
            warm in prop::collection::vec(0.0f64..1.0, 6),
        ) {
            let b = DMatrix::from_row_slice(6, 6, &raw);
            let m = b.transpose() * &b;
            let mu = DVector::from_vec(mu);
            let mut x_set = ConvexSetX::uniform_box(6, 0.0, 0.4);
            x_set.budget = true;
            let floor = 0.5 * max_return(&x_set, &mu);
            x_set.return_floor = Some(ReturnFloor { mu, rho0: floor });
            let spec = ProblemSpec::new(
                ObjectiveKind::QuadraticForm { m },
                x_set,
                SemicontinuousSet::uniform(6, 0.01, 0.4, 3).unwrap(),
            ).unwrap();
            let (y, lambda) = (DVector::from_vec(y), DVector::from_vec(lambda));
            let opts = InnerSolverOpts::default();
            let x0 = project_polytope(&DVector::from_vec(warm), &spec.x_set, &opts).unwrap();
            let sol = XSubproblem::new(&spec, opts).unwrap().solve(&y, &lambda, 1.0, &x0).unwrap();
            prop_assert!(spec.x_set.violation(&sol.x) <= 1e-8);
            prop_assert!(stationarity(&spec, &sol.x, &y, &lambda, 1.0) <= 1e-8);
            let l = |p: &DVector<f64>| crate::model::augmented_lagrangian(&spec, p, &y, &lambda, 1.0);
            prop_assert!(l(&sol.x) <= l(&x0) + 1e-12);
        }
    }
}
