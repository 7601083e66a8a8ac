//! Problem data model: the objective, the convex set `X` and the
//! semicontinuous cardinality set `Y`.
//!
//! The problem solved throughout the crate is
//!
//! ```text
//! minimize    f(x)
//! subject to  x ∈ X
//!             ‖x‖₀ ≤ K
//!             xᵢ ∈ {0} ∪ [aᵢ, bᵢ]
//! ```
//!
//! with `f` either a quadratic form `xᵀMx` or a least-squares misfit
//! `½‖Ax − b‖²`, and `X` an intersection of a box, the budget hyperplane
//! `eᵀx = 1`, a return floor `μᵀx ≥ ρ₀` and a diagonal risk cap `xᵀDx ≤ σ₀`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_dim, Error, Result};

/// Eigenvalue floor tolerated for quadratic forms before a warning is issued.
pub const PSD_FLOOR: f64 = -1e-10;

/// Largest dimension for which [`ProblemSpec::new`] runs the eigenvalue check.
const PSD_CHECK_MAX_DIM: usize = 512;

/// The nonconvex set `Y = {y : ‖y‖₀ ≤ K, yᵢ ∈ {0} ∪ [aᵢ, bᵢ]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemicontinuousSet {
    lower: DVector<f64>,
    upper: DVector<f64>,
    cardinality: usize,
}

impl SemicontinuousSet {
    /// Builds the set, requiring `0 < aᵢ ≤ bᵢ` and `1 ≤ K ≤ n`.
    pub fn new(lower: DVector<f64>, upper: DVector<f64>, cardinality: usize) -> Result<Self> {
        check_dim("semicontinuous upper bounds", lower.len(), upper.len())?;
        let n = lower.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty semicontinuous set".into()));
        }
        for i in 0..n {
            let (a, b) = (lower[i], upper[i]);
            if !(a.is_finite() && b.is_finite()) || a <= 0.0 || a > b {
                return Err(Error::InvalidArgument(format!(
                    "semicontinuous bounds must satisfy 0 < a <= b, got [{a}, {b}] at index {i}"
                )));
            }
        }
        if cardinality == 0 || cardinality > n {
            return Err(Error::InvalidArgument(format!(
                "cardinality budget must lie in 1..={n}, got {cardinality}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            cardinality,
        })
    }

    /// Same bounds on every coordinate.
    pub fn uniform(n: usize, a: f64, b: f64, cardinality: usize) -> Result<Self> {
        Self::new(
            DVector::from_element(n, a),
            DVector::from_element(n, b),
            cardinality,
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Membership test. Zero entries are exact zeros; nonzero entries must sit
    /// in `[aᵢ - tol, bᵢ + tol]`.
    pub fn contains(&self, y: &DVector<f64>, tol: f64) -> bool {
        if y.len() != self.dim() {
            return false;
        }
        let mut nonzeros = 0;
        for i in 0..y.len() {
            if y[i] != 0.0 {
                nonzeros += 1;
                if y[i] < self.lower[i] - tol || y[i] > self.upper[i] + tol {
                    return false;
                }
            }
        }
        nonzeros <= self.cardinality
    }
}

/// The smooth convex objective.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// `f(x) = xᵀMx`; the portfolio model stores `M = Q + D` here.
    QuadraticForm { m: DMatrix<f64> },
    /// `f(x) = ½‖Ax − b‖²`.
    LeastSquares { a: DMatrix<f64>, b_obs: DVector<f64> },
}

impl ObjectiveKind {
    pub fn dim(&self) -> usize {
        match self {
            ObjectiveKind::QuadraticForm { m } => m.ncols(),
            ObjectiveKind::LeastSquares { a, .. } => a.ncols(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ObjectiveKind::QuadraticForm { m } => {
                check_dim("quadratic form rows", m.ncols(), m.nrows())?;
                let scale = m.amax().max(1.0);
                for i in 0..m.nrows() {
                    for j in 0..i {
                        if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                            return Err(Error::InvalidArgument(format!(
                                "quadratic form is not symmetric at ({i}, {j})"
                            )));
                        }
                    }
                }
                if m.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("quadratic form has non-finite entries".into()));
                }
            }
            ObjectiveKind::LeastSquares { a, b_obs } => {
                check_dim("least-squares observations", a.nrows(), b_obs.len())?;
                if a.iter().chain(b_obs.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("least-squares data has non-finite entries".into()));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            ObjectiveKind::QuadraticForm { m } => x.dot(&(m * x)),
            ObjectiveKind::LeastSquares { a, b_obs } => 0.5 * (a * x - b_obs).norm_squared(),
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            ObjectiveKind::QuadraticForm { m } => (m * x) * 2.0,
            ObjectiveKind::LeastSquares { a, b_obs } => a.tr_mul(&(a * x - b_obs)),
        }
    }

    /// `f(x_new) − f(x)` evaluated from the step, free of the cancellation a
    /// plain subtraction suffers near a minimizer.
    pub fn difference(&self, x: &DVector<f64>, x_new: &DVector<f64>) -> f64 {
        let step = x_new - x;
        match self {
            ObjectiveKind::QuadraticForm { m } => step.dot(&(m * (x_new + x))),
            ObjectiveKind::LeastSquares { a, b_obs } => {
                let a_step = a * &step;
                let mid = a * (x_new + x) - b_obs * 2.0;
                0.5 * a_step.dot(&mid)
            }
        }
    }

    /// Applies the Hessian `∇²f` to `v`.
    pub fn hessian_apply(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            ObjectiveKind::QuadraticForm { m } => (m * v) * 2.0,
            ObjectiveKind::LeastSquares { a, .. } => a.tr_mul(&(a * v)),
        }
    }

    /// Largest Hessian eigenvalue estimated by 20 power-iteration steps from
    /// the normalized all-ones vector.
    pub fn curvature_estimate(&self) -> f64 {
        let n = self.dim();
        let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let mut estimate = 0.0;
        for _ in 0..20 {
            let hv = self.hessian_apply(&v);
            estimate = v.dot(&hv);
            let norm = hv.norm();
            if norm == 0.0 {
                return 0.0;
            }
            v = hv / norm;
        }
        // One more product so the returned value is the Rayleigh quotient of the final iterate.
        let hv = self.hessian_apply(&v);
        estimate.max(v.dot(&hv)).max(0.0)
    }
}

/// Box block `lower ≤ x ≤ upper`. Infinite entries are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

/// Return floor `μᵀx ≥ ρ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnFloor {
    pub mu: DVector<f64>,
    pub rho0: f64,
}

/// Diagonal risk cap `xᵀDx ≤ σ₀`; `d` holds the diagonal of `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskCap {
    pub d: DVector<f64>,
    pub sigma0: f64,
}

impl RiskCap {
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().zip(self.d.iter()).map(|(xi, di)| di * xi * xi).sum()
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x.component_mul(&self.d) * 2.0
    }
}

/// The convex set `X`, an intersection of optional blocks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexSetX {
    pub bounds: Option<BoxBounds>,
    /// The budget hyperplane `eᵀx = 1`.
    pub budget: bool,
    pub return_floor: Option<ReturnFloor>,
    pub risk: Option<RiskCap>,
}

impl ConvexSetX {
    pub fn boxed(lower: DVector<f64>, upper: DVector<f64>) -> Self {
        Self {
            bounds: Some(BoxBounds { lower, upper }),
            ..Self::default()
        }
    }

    pub fn uniform_box(n: usize, lower: f64, upper: f64) -> Self {
        Self::boxed(
            DVector::from_element(n, lower),
            DVector::from_element(n, upper),
        )
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.bounds.is_none() && !self.budget && self.return_floor.is_none() && self.risk.is_none() {
            return Err(Error::InvalidArgument("convex set X has no blocks".into()));
        }
        if let Some(bx) = &self.bounds {
            check_dim("box lower bound", n, bx.lower.len())?;
            check_dim("box upper bound", n, bx.upper.len())?;
            for i in 0..n {
                if bx.lower[i].is_nan() || bx.upper[i].is_nan() || bx.lower[i] > bx.upper[i] {
                    return Err(Error::InvalidArgument(format!("box bounds inverted at index {i}")));
                }
            }
        }
        if let Some(hs) = &self.return_floor {
            check_dim("return vector", n, hs.mu.len())?;
            if !hs.rho0.is_finite() || hs.mu.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("return floor has non-finite data".into()));
            }
        }
        if let Some(risk) = &self.risk {
            check_dim("risk diagonal", n, risk.d.len())?;
            if risk.d.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::InvalidArgument("risk diagonal must be nonnegative".into()));
            }
            if !risk.sigma0.is_finite() {
                return Err(Error::InvalidArgument("risk level must be finite".into()));
            }
        }
        Ok(())
    }

    /// Largest violation over all blocks (zero when `x ∈ X`).
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        if let Some(bx) = &self.bounds {
            for i in 0..x.len() {
                worst = worst.max(bx.lower[i] - x[i]).max(x[i] - bx.upper[i]);
            }
        }
        if self.budget {
            worst = worst.max((x.sum() - 1.0).abs());
        }
        if let Some(hs) = &self.return_floor {
            worst = worst.max(hs.rho0 - hs.mu.dot(x));
        }
        if let Some(risk) = &self.risk {
            worst = worst.max(risk.value(x) - risk.sigma0);
        }
        worst
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.violation(x) <= tol
    }
}

/// A complete instance of the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub objective: ObjectiveKind,
    pub x_set: ConvexSetX,
    pub y_set: SemicontinuousSet,
}

impl ProblemSpec {
    pub fn new(objective: ObjectiveKind, x_set: ConvexSetX, y_set: SemicontinuousSet) -> Result<Self> {
        objective.validate()?;
        let n = objective.dim();
        check_dim("semicontinuous set", n, y_set.dim())?;
        x_set.validate(n)?;
        let spec = Self {
            objective,
            x_set,
            y_set,
        };
        if n <= PSD_CHECK_MAX_DIM {
            if let Some(floor) = spec.min_eigenvalue() {
                if floor < PSD_FLOOR {
                    log::warn!("quadratic form is indefinite: min eigenvalue {floor:.3e}");
                }
            }
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Smallest eigenvalue of the quadratic form; `None` for least squares.
    pub fn min_eigenvalue(&self) -> Option<f64> {
        match &self.objective {
            ObjectiveKind::QuadraticForm { m } => {
                let eig = SymmetricEigen::new(m.clone());
                Some(eig.eigenvalues.min())
            }
            ObjectiveKind::LeastSquares { .. } => None,
        }
    }
}

pub fn eval_objective(spec: &ProblemSpec, x: &DVector<f64>) -> Result<f64> {
    check_dim("objective argument", spec.dim(), x.len())?;
    Ok(spec.objective.value(x))
}

pub fn eval_gradient(spec: &ProblemSpec, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim("gradient argument", spec.dim(), x.len())?;
    Ok(spec.objective.gradient(x))
}

/// `L_ρ(x, y, λ) = f(x) + λᵀ(y − x) + (ρ/2)‖y − x‖²`.
pub fn augmented_lagrangian(
    spec: &ProblemSpec,
    x: &DVector<f64>,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    rho: f64,
) -> f64 {
    let gap = y - x;
    spec.objective.value(x) + lambda.dot(&gap) + 0.5 * rho * gap.norm_squared()
}
