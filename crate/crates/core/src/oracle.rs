//! Exact global solver for small instances by support enumeration.
//!
//! Every support of size at most `K` is tried: sizes below `K` are not limits
//! of size-`K` restrictions because active coordinates are bounded away from
//! zero. Each restriction is a convex problem handed to the inner solver.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::inner::{solve_restricted, InnerSolverOpts};
use crate::model::ProblemSpec;

/// Largest dimension accepted by the enumeration.
pub const MAX_DIM: usize = 24;

/// Gradient tolerance of the restricted solves.
pub const ORACLE_GRAD_TOL: f64 = 1e-10;

/// Subsets of `{0, …, n−1}` of size `≤ k`, by size then lexicographically.
#[derive(Debug, Clone)]
pub struct Supports {
    n: usize,
    k: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Supports {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        self.current = advance(&out, self.n, self.k);
        Some(out)
    }
}

fn advance(set: &[usize], n: usize, k: usize) -> Option<Vec<usize>> {
    let size = set.len();
    let mut next = set.to_vec();
    // Rightmost position that can still move up.
    for pos in (0..size).rev() {
        if next[pos] < n - size + pos {
            next[pos] += 1;
            for later in pos + 1..size {
                next[later] = next[later - 1] + 1;
            }
            return Some(next);
        }
    }
    (size < k && size < n).then(|| (0..=size).collect())
}

pub fn enumerate_supports(n: usize, k: usize) -> Result<Supports> {
    if n > MAX_DIM {
        return Err(Error::SizeCap { n, cap: MAX_DIM });
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("K = {k} exceeds n = {n}")));
    }
    Ok(Supports {
        n,
        k,
        current: Some(Vec::new()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub x_star: DVector<f64>,
    pub support: Vec<usize>,
    pub objective: f64,
    pub supports_examined: usize,
}

pub fn global_solve(spec: &ProblemSpec) -> Result<OracleResult> {
    global_solve_with(spec, &InnerSolverOpts::default())
}

/// As [`global_solve`] with caller-supplied inner options; `grad_tol` is
/// tightened to at least [`ORACLE_GRAD_TOL`].
pub fn global_solve_with(spec: &ProblemSpec, opts: &InnerSolverOpts) -> Result<OracleResult> {
    let n = spec.dim();
    let supports = enumerate_supports(n, spec.y_set.cardinality())?;
    let opts = InnerSolverOpts {
        grad_tol: opts.grad_tol.min(ORACLE_GRAD_TOL),
        ..*opts
    };
    opts.validate()?;
    let curvature = spec.objective.curvature_estimate();
    let start = DVector::zeros(n);
    let mut best: Option<(DVector<f64>, Vec<usize>, f64)> = None;
    let mut examined = 0;
    for support in supports {
        examined += 1;
        let mut on = vec![false; n];
        for &i in &support {
            on[i] = true;
        }
        let Some(sol) = solve_restricted(spec, &on, &start, curvature, &opts)? else {
            continue;
        };
        let value = spec.objective.value(&sol.x);
        if best.as_ref().is_none_or(|(_, _, b)| value < *b) {
            best = Some((sol.x, support, value));
        }
    }
    let (x_star, support, objective) = best.ok_or(Error::GlobalInfeasible)?;
    log::debug!("oracle examined {examined} supports, best {objective:.6e} on {support:?}");
    Ok(OracleResult {
        x_star,
        support,
        objective,
        supports_examined: examined,
    })
}
