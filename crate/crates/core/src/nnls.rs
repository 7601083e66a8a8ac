//! Nonnegative least squares by the Lawson–Hanson active-set method.

use nalgebra::{DMatrix, DVector};

pub(crate) const MAX_ITERS: usize = 1000;

fn passive_solve(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let mut s = DVector::zeros(passive.len());
    if cols.is_empty() {
        return s;
    }
    let sub = a.select_columns(&cols);
    let scale = sub.amax().max(1.0);
    let eps = 1e-13 * scale * (sub.nrows().max(sub.ncols()) as f64);
    let svd = sub.svd(true, true);
    if let Ok(sol) = svd.solve(b, eps) {
        for (k, &j) in cols.iter().enumerate() {
            s[j] = sol[k];
        }
    }
    s
}

/// `argmin_{x ≥ 0} ‖Ax − b‖`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    if n == 0 || a.nrows() == 0 {
        return x;
    }
    let tol = 10.0 * f64::EPSILON * a.amax().max(1.0) * b.amax().max(1.0) * (a.nrows().max(n) as f64);
    let mut iters = 0;
    loop {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            iters += 1;
            if iters > MAX_ITERS {
                log::warn!("nnls stopped at the iteration cap");
                return x;
            }
            let s = passive_solve(a, b, &passive);
            if (0..n).all(|k| !passive[k] || s[k] > 0.0) {
                x = s;
                break;
            }
            let alpha = (0..n)
                .filter(|&k| passive[k] && s[k] <= 0.0)
                .map(|k| x[k] / (x[k] - s[k]))
                .fold(f64::INFINITY, f64::min);
            x += (s - &x) * alpha;
            for k in 0..n {
                if passive[k] && x[k] <= tol {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    x
}
