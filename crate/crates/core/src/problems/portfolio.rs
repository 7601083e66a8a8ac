//! Simulated factor-model portfolios.
//!
//! `M = BΣBᵀ + D` with loadings `βᵢⱼ ~ U[0.3, 2]/m`, `Σ` the sample
//! covariance of `T = 200` i.i.d. factor draws with entries `U[0, 0.4]`, and
//! nonsystematic variances `Dᵢᵢ ~ U[0, 0.002]`. Expected returns are
//! `αᵢ ~ U[0, 0.03]`. `X` is the box `[0, b]`, the budget `eᵀx = 1`, the
//! return floor `αᵀx ≥ ρ₀` and optionally the risk cap `xᵀDx ≤ σ₀`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::inner::{minimize_over, project_polytope, InnerSolverOpts};
use crate::instance::Instance;
use crate::model::{ConvexSetX, ObjectiveKind, ProblemSpec, ReturnFloor, RiskCap, SemicontinuousSet};

use super::rng::Stream;

/// Length of the simulated factor series.
pub const FACTOR_SERIES_LEN: usize = 200;
const MAX_ATTEMPTS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioParams {
    pub rho0: f64,
    pub sigma0: f64,
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub with_risk: bool,
}

impl Default for PortfolioParams {
    fn default() -> Self {
        Self {
            rho0: 2e-3,
            sigma0: 1e-3,
            a: 0.01,
            b: 0.3,
            k: 10,
            with_risk: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PortfolioInstance {
    pub spec: ProblemSpec,
    pub alpha: DVector<f64>,
    pub factor_count: usize,
    pub seed: u64,
}

impl PortfolioInstance {
    pub fn id(&self) -> String {
        format!("portfolio-n{}-m{}-s{}", self.spec.dim(), self.factor_count, self.seed)
    }

    pub fn to_instance(&self) -> Instance {
        Instance {
            id: Some(self.id()),
            spec: self.spec.clone(),
            f_true: None,
        }
    }
}

fn factor_covariance(stream: &mut Stream, m: usize) -> DMatrix<f64> {
    let t = FACTOR_SERIES_LEN;
    let series = DMatrix::from_fn(t, m, |_, _| stream.uniform_in(0.0, 0.4));
    let mean = series.row_mean();
    let mut centered = series;
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    centered.transpose() * &centered / (t - 1) as f64
}

fn is_degenerate(sigma: &DMatrix<f64>) -> bool {
    let eig = SymmetricEigen::new(sigma.clone()).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    !(lo > 1e-12 * hi.max(f64::MIN_POSITIVE))
}

/// `Some(x ∈ X)` when one exists.
fn feasible_point(x_set: &ConvexSetX, n: usize) -> Option<DVector<f64>> {
    let opts = InnerSolverOpts::default();
    let polytope = ConvexSetX {
        risk: None,
        ..x_set.clone()
    };
    let start = DVector::from_element(n, 1.0 / n as f64);
    let x = project_polytope(&start, &polytope, &opts).ok()?;
    let Some(risk) = &x_set.risk else { return Some(x) };
    // Least-risk point of the polytope.
    let objective = ObjectiveKind::QuadraticForm {
        m: DMatrix::from_diagonal(&risk.d),
    };
    let curvature = 2.0 * risk.d.max();
    let sol = minimize_over(&objective, &polytope, &x, curvature, &opts, opts.grad_tol).ok()?;
    (risk.value(&sol.x) <= risk.sigma0).then_some(sol.x)
}

fn attempt(n: usize, m: usize, stream: &mut Stream, params: &PortfolioParams) -> Result<Option<(ProblemSpec, DVector<f64>)>> {
    let alpha = DVector::from_fn(n, |_, _| stream.uniform_in(0.0, 0.03));
    let loadings = DMatrix::from_fn(n, m, |_, _| stream.uniform_in(0.3, 2.0) / m as f64);
    let sigma = factor_covariance(stream, m);
    let d = DVector::from_fn(n, |_, _| stream.uniform_in(0.0, 0.002));
    if is_degenerate(&sigma) {
        log::debug!("degenerate factor covariance, redrawing");
        return Ok(None);
    }
    let q = &loadings * &sigma * loadings.transpose();
    let mut mat = q + DMatrix::from_diagonal(&d);
    mat = (&mat + mat.transpose()) * 0.5;

    let x_set = ConvexSetX {
        return_floor: Some(ReturnFloor {
            mu: alpha.clone(),
            rho0: params.rho0,
        }),
        risk: params.with_risk.then(|| RiskCap {
            d: d.clone(),
            sigma0: params.sigma0,
        }),
        budget: true,
        ..ConvexSetX::uniform_box(n, 0.0, params.b)
    };
    if feasible_point(&x_set, n).is_none() {
        log::debug!("generated portfolio set is empty, redrawing");
        return Ok(None);
    }
    let spec = ProblemSpec::new(
        ObjectiveKind::QuadraticForm { m: mat },
        x_set,
        SemicontinuousSet::uniform(n, params.a, params.b, params.k)?,
    )?;
    Ok(Some((spec, alpha)))
}

pub fn gen_portfolio(n: usize, m: usize, seed: u64, params: &PortfolioParams) -> Result<PortfolioInstance> {
    if n < 2 || m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("need n >= 2 and 1 <= m <= n, got n = {n}, m = {m}")));
    }
    if params.k == 0 || params.k > n {
        return Err(Error::InvalidArgument(format!("K = {} outside 1..={n}", params.k)));
    }
    for attempt_no in 0..MAX_ATTEMPTS {
        // Retries draw from a fresh stream keyed by the attempt number.
        let mut stream = Stream::new(seed.wrapping_add(attempt_no.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        if let Some((spec, alpha)) = attempt(n, m, &mut stream, params)? {
            return Ok(PortfolioInstance {
                spec,
                alpha,
                factor_count: m,
                seed,
            });
        }
    }
    Err(Error::Generator(format!("no usable portfolio after {MAX_ATTEMPTS} attempts")))
}
