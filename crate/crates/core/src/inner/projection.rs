//! Euclidean projections onto the polyhedral blocks of `X`.
//!
//! `box ∩ {eᵀx = 1}` is projected exactly by a breakpoint sweep over the
//! shift `θ` in `clamp(p + θe, l, u)`. The return floor `μᵀx ≥ ρ₀` is added
//! through its scalar multiplier `τ ≥ 0`: `x(τ) = Π_C(p + τμ)` has `μᵀx(τ)`
//! nondecreasing in `τ`, and the projection is `x(τ*)` at the smallest root
//! of `μᵀx(τ) = ρ₀`.

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::model::{BoxBounds, ConvexSetX, ReturnFloor};

use super::InnerSolverOpts;

pub fn project_box(x: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim("box lower bound", x.len(), lower.len())?;
    check_dim("box upper bound", x.len(), upper.len())?;
    if (0..x.len()).any(|i| lower[i] > upper[i]) {
        return Err(Error::EmptySet("box with lower > upper".into()));
    }
    Ok(clamp(x, lower, upper))
}

fn clamp(x: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| x[i].max(lower[i]).min(upper[i]))
}

fn total_tolerance(n: usize, total: f64) -> f64 {
    1e-12 * (n as f64) * total.abs().max(1.0)
}

/// Projects `p` onto `{x : l ≤ x ≤ u, eᵀx = total}` (no box when `bounds` is `None`).
pub(crate) fn project_box_budget(p: &DVector<f64>, bounds: Option<&BoxBounds>, total: f64) -> Result<DVector<f64>> {
    let n = p.len();
    let Some(bx) = bounds else {
        let shift = (total - p.sum()) / n as f64;
        return Ok(p.add_scalar(shift));
    };
    let (l, u) = (&bx.lower, &bx.upper);

    // Slope of s(θ) = Σ clamp(pᵢ + θ, lᵢ, uᵢ) changes by +1 at lᵢ − pᵢ and by −1 at uᵢ − pᵢ.
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * n);
    let mut slope: i64 = 0;
    for i in 0..n {
        if l[i].is_finite() {
            events.push((l[i] - p[i], 1));
        } else {
            slope += 1;
        }
        if u[i].is_finite() {
            events.push((u[i] - p[i], -1));
        }
    }
    let shifted = |theta: f64| clamp(&p.add_scalar(theta), l, u);
    if events.is_empty() {
        let shift = (total - p.sum()) / n as f64;
        return Ok(p.add_scalar(shift));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let tol = total_tolerance(n, total);
    let mut cur_t = events[0].0;
    let mut cur_s = shifted(cur_t).sum();
    if total <= cur_s {
        if slope > 0 {
            return Ok(shifted(cur_t - (cur_s - total) / slope as f64));
        }
        if total < cur_s - tol {
            return Err(Error::EmptySet(format!(
                "budget {total} is below the box lower sum {cur_s}"
            )));
        }
        return Ok(shifted(cur_t));
    }
    for &(t, delta) in &events {
        if t > cur_t {
            let next_s = cur_s + slope as f64 * (t - cur_t);
            if next_s >= total {
                let theta = if slope > 0 {
                    cur_t + (total - cur_s) / slope as f64
                } else {
                    cur_t
                };
                return Ok(shifted(theta.min(t)));
            }
            cur_s = next_s;
            cur_t = t;
        }
        slope += delta as i64;
    }
    if slope > 0 {
        return Ok(shifted(cur_t + (total - cur_s) / slope as f64));
    }
    if total > cur_s + tol {
        return Err(Error::EmptySet(format!(
            "budget {total} exceeds the box upper sum {cur_s}"
        )));
    }
    Ok(shifted(cur_t))
}

/// Projection onto the box and budget blocks only.
fn project_base(p: &DVector<f64>, x_set: &ConvexSetX) -> Result<DVector<f64>> {
    if x_set.budget {
        project_box_budget(p, x_set.bounds.as_ref(), 1.0)
    } else if let Some(bx) = &x_set.bounds {
        Ok(clamp(p, &bx.lower, &bx.upper))
    } else {
        Ok(p.clone())
    }
}

/// `max μᵀx` over the box and budget blocks (the greedy fractional knapsack).
pub(crate) fn max_return(x_set: &ConvexSetX, mu: &DVector<f64>) -> f64 {
    let n = mu.len();
    match (&x_set.bounds, x_set.budget) {
        (None, false) => {
            if mu.iter().all(|&m| m == 0.0) {
                0.0
            } else {
                f64::INFINITY
            }
        }
        (None, true) => {
            let first = mu[0];
            if mu.iter().all(|&m| m == first) {
                first
            } else {
                f64::INFINITY
            }
        }
        (Some(bx), false) => (0..n)
            .map(|i| {
                if mu[i] > 0.0 {
                    mu[i] * bx.upper[i]
                } else if mu[i] < 0.0 {
                    mu[i] * bx.lower[i]
                } else {
                    0.0
                }
            })
            .sum(),
        (Some(bx), true) => {
            if bx.lower.iter().any(|v| !v.is_finite()) {
                return f64::INFINITY;
            }
            let mut x = bx.lower.clone();
            let mut remaining = 1.0 - x.sum();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| mu[j].total_cmp(&mu[i]));
            for i in order {
                if remaining <= 0.0 {
                    break;
                }
                let room = bx.upper[i] - bx.lower[i];
                if !room.is_finite() {
                    if mu[i] > 0.0 {
                        return f64::INFINITY;
                    }
                    x[i] += remaining;
                    break;
                }
                let add = room.min(remaining);
                x[i] += add;
                remaining -= add;
            }
            mu.dot(&x)
        }
    }
}

fn project_with_floor(
    p: &DVector<f64>,
    x_set: &ConvexSetX,
    floor: &ReturnFloor,
    opts: &InnerSolverOpts,
) -> Result<DVector<f64>> {
    let mu = &floor.mu;
    let at = |tau: f64| project_base(&(p + mu * tau), x_set);
    let base = at(0.0)?;
    let gap0 = mu.dot(&base) - floor.rho0;
    if gap0 >= 0.0 {
        return Ok(base);
    }
    let mu_norm2 = mu.norm_squared();
    if mu_norm2 == 0.0 || max_return(x_set, mu) < floor.rho0 - 1e-14 * floor.rho0.abs().max(1.0) {
        return Err(Error::EmptySet("return floor is unreachable".into()));
    }
    let accuracy = opts.projection_tol * mu_norm2.sqrt();

    // Bracket the root.
    let (mut lo, mut f_lo) = (0.0, gap0);
    let mut hi = -gap0 / mu_norm2;
    let mut x_hi = at(hi)?;
    let mut f_hi = mu.dot(&x_hi) - floor.rho0;
    let mut doublings = 0;
    while f_hi < 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        x_hi = at(hi)?;
        f_hi = mu.dot(&x_hi) - floor.rho0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::EmptySet("return floor is unreachable".into()));
        }
    }

    // Illinois regula falsi on weighted end values; `f_hi` stays the true gap at `hi`.
    let (mut w_lo, mut w_hi) = (f_lo, f_hi);
    let mut side = 0i8;
    for _ in 0..opts.projection_iters {
        if f_hi <= accuracy || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(x_hi);
        }
        let mut tau = (lo * w_hi - hi * w_lo) / (w_hi - w_lo);
        if !(tau > lo && tau < hi) {
            tau = 0.5 * (lo + hi);
        }
        let x_mid = at(tau)?;
        let f_mid = mu.dot(&x_mid) - floor.rho0;
        if f_mid >= 0.0 {
            hi = tau;
            f_hi = f_mid;
            w_hi = f_mid;
            x_hi = x_mid;
            if side == 1 {
                w_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = tau;
            w_lo = f_mid;
            if side == -1 {
                w_hi *= 0.5;
            }
            side = -1;
        }
    }
    let f_true = mu.dot(&x_hi) - floor.rho0;
    if f_true <= accuracy.max(1e-8) {
        return Ok(x_hi);
    }
    Err(Error::ProjectionNotConverged { residual: f_true })
}

/// Euclidean projection onto the polyhedral part of `X` (box, budget and
/// return floor). The quadratic risk block is ignored here; it is handled by
/// the penalty loop of the inner solver.
pub fn project_polytope(x: &DVector<f64>, x_set: &ConvexSetX, opts: &InnerSolverOpts) -> Result<DVector<f64>> {
    if let Some(bx) = &x_set.bounds {
        check_dim("projection point", bx.lower.len(), x.len())?;
        if (0..x.len()).any(|i| bx.lower[i] > bx.upper[i]) {
            return Err(Error::EmptySet("box with lower > upper".into()));
        }
    }
    match &x_set.return_floor {
        Some(floor) => {
            check_dim("projection point", floor.mu.len(), x.len())?;
            project_with_floor(x, x_set, floor, opts)
        }
        None => project_base(x, x_set),
    }
}
