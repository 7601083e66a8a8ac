//! Compressed-sensing instances: recover a sparse nonnegative signal from
//! `b = Af + r` with orthonormal-row `A`.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::instance::Instance;
use crate::model::{BoxBounds, ConvexSetX, ObjectiveKind, ProblemSpec, SemicontinuousSet};

use super::rng::Stream;

/// Semicontinuous floor of active entries.
pub const CS_FLOOR: f64 = 1e-5;
/// Upper bound of every entry.
pub const CS_CAP: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct CsInstance {
    pub spec: ProblemSpec,
    pub f_true: DVector<f64>,
    pub noise_sigma2: f64,
    pub seed: u64,
}

impl CsInstance {
    pub fn id(&self) -> String {
        let (a, _) = self.sensing();
        format!("cs-p{}-n{}-K{}-s{}", a.nrows(), a.ncols(), self.spec.y_set.cardinality(), self.seed)
    }

    pub fn sensing(&self) -> (&DMatrix<f64>, &DVector<f64>) {
        match &self.spec.objective {
            ObjectiveKind::LeastSquares { a, b_obs } => (a, b_obs),
            ObjectiveKind::QuadraticForm { .. } => unreachable!("sensing instances are least squares"),
        }
    }

    pub fn to_instance(&self) -> Instance {
        Instance {
            id: Some(self.id()),
            spec: self.spec.clone(),
            f_true: Some(self.f_true.clone()),
        }
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
fn orthonormalize_columns(m: &mut DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let proj = m.column(i).dot(&m.column(j));
                let qi = m.column(i).clone_owned();
                m.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = m.column(j).norm();
        if !(norm > 1e-12) {
            return Err(Error::Generator("rank-deficient sensing draw".into()));
        }
        m.column_mut(j).unscale_mut(norm);
    }
    Ok(())
}

/// Draws a `p × n` sensing instance. With `p ≤ n` the rows of `A` are
/// orthonormal; with `p > n` the columns are.
pub fn gen_cs(p: usize, n: usize, k: usize, sigma2: f64, seed: u64) -> Result<CsInstance> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidArgument("p and n must be positive".into()));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("need 1 <= K < n, got K = {k}, n = {n}")));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise variance must be >= 0, got {sigma2}")));
    }
    let mut stream = Stream::new(seed);
    // Row-major draw order.
    let gauss: Vec<f64> = (0..p * n).map(|_| stream.normal()).collect();
    let a = if p <= n {
        let mut t = DMatrix::from_vec(n, p, gauss);
        orthonormalize_columns(&mut t)?;
        t.transpose()
    } else {
        let mut m = DMatrix::from_row_slice(p, n, &gauss);
        orthonormalize_columns(&mut m)?;
        m
    };

    // Partial Fisher–Yates for the support.
    let mut positions: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + stream.index(n - i);
        positions.swap(i, j);
    }
    let mut f = DVector::zeros(n);
    for &i in &positions[..k] {
        let mut value = 0.0;
        while value == 0.0 {
            value = stream.normal().abs();
        }
        f[i] = value;
    }
    let sigma = sigma2.sqrt();
    let noise = DVector::from_fn(p, |_, _| sigma * stream.normal());
    let b_obs = &a * &f + noise;

    let gram = if p <= n { &a * a.transpose() } else { a.transpose() * &a };
    let dev = (gram - DMatrix::identity(p.min(n), p.min(n))).amax();
    if dev > 1e-10 {
        return Err(Error::Generator(format!("orthonormality lost: {dev:e}")));
    }
    debug_assert_eq!(f.iter().filter(|&&v| v != 0.0).count(), k);

    let spec = ProblemSpec::new(
        ObjectiveKind::LeastSquares { a, b_obs },
        ConvexSetX::uniform_box(n, 0.0, CS_CAP),
        SemicontinuousSet::uniform(n, CS_FLOOR, CS_CAP, k)?,
    )?;
    Ok(CsInstance {
        spec,
        f_true: f,
        noise_sigma2: sigma2,
        seed,
    })
}

/// `(1/n)‖f − f̂‖²`.
pub fn mse(f: &DVector<f64>, f_hat: &DVector<f64>) -> Result<f64> {
    check_dim("mse estimate", f.len(), f_hat.len())?;
    if f.is_empty() {
        return Err(Error::InvalidArgument("mse of empty vectors".into()));
    }
    Ok((f - f_hat).norm_squared() / f.len() as f64)
}

/// Keeps the `K` largest-magnitude entries of `Aᵀb` and clamps them into
/// `[aᵢ, min(bᵢ, uᵢ)]`; the rest are zero.
pub fn hard_threshold(spec: &ProblemSpec) -> Result<DVector<f64>> {
    let ObjectiveKind::LeastSquares { a, b_obs } = &spec.objective else {
        return Err(Error::InvalidArgument("hard thresholding needs a least-squares objective".into()));
    };
    let x_ls = a.transpose() * b_obs;
    let n = x_ls.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x_ls[j].abs().total_cmp(&x_ls[i].abs()));
    let (lo, hi) = (spec.y_set.lower(), spec.y_set.upper());
    let cap = |i: usize| match &spec.x_set.bounds {
        Some(BoxBounds { upper, .. }) => hi[i].min(upper[i]),
        None => hi[i],
    };
    let mut x = DVector::zeros(n);
    for &i in order.iter().take(spec.y_set.cardinality()) {
        x[i] = x_ls[i].max(lo[i]).min(cap(i));
    }
    Ok(x)
}

pub fn baseline_hard_threshold(inst: &CsInstance) -> DVector<f64> {
    hard_threshold(&inst.spec).expect("sensing instances are least squares")
}
