//! Exact Euclidean projection onto the semicontinuous cardinality set
//! `Y = {y : ‖y‖₀ ≤ K, yᵢ ∈ {0} ∪ [aᵢ, bᵢ]}`.
//!
//! Each coordinate has two branches: switched off (`yᵢ = 0`, cost `qᵢ = wᵢ²`)
//! or switched on (`yᵢ` clamped into `[aᵢ, bᵢ]`, cost `rᵢ`). The total cost
//! splits as `Σ qᵢ + Σ (rᵢ − qᵢ) zᵢ`, so the best support under `eᵀz ≤ K`
//! takes the `K` most negative entries of `v = r − q` and nothing with
//! `vᵢ > 0`.

use nalgebra::DVector;

use crate::error::{check_dim, Result};
use crate::model::SemicontinuousSet;

/// Per-coordinate costs of the zero and active branches for target `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCosts {
    pub w: DVector<f64>,
    /// Zero-branch cost `wᵢ²`.
    pub q: DVector<f64>,
    /// Active-branch cost `(y_onᵢ − wᵢ)²`.
    pub r: DVector<f64>,
    /// Minimizer of the active branch, `min(bᵢ, max(wᵢ, aᵢ))`.
    pub y_on: DVector<f64>,
}

/// The selected support and the quantities that drove the choice.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSelection {
    /// 0/1 indicator of the active coordinates.
    pub z: Vec<u8>,
    /// `v = r − q`.
    pub v: DVector<f64>,
    /// Indices sorted by ascending `v`, ties by index.
    pub order: Vec<usize>,
}

impl SupportSelection {
    pub fn support(&self) -> Vec<usize> {
        (0..self.z.len()).filter(|&i| self.z[i] == 1).collect()
    }
}

pub fn branch_costs(w: &DVector<f64>, y_set: &SemicontinuousSet) -> Result<BranchCosts> {
    check_dim("projection target", y_set.dim(), w.len())?;
    let (a, b) = (y_set.lower(), y_set.upper());
    let q = w.map(|wi| wi * wi);
    let y_on = DVector::from_fn(w.len(), |i, _| w[i].max(a[i]).min(b[i]));
    let r = DVector::from_fn(w.len(), |i, _| {
        let d = y_on[i] - w[i];
        d * d
    });
    Ok(BranchCosts {
        w: w.clone(),
        q,
        r,
        y_on,
    })
}

/// Chooses the active coordinates: the (at most) `k` smallest entries of
/// `v = r − q` that are `≤ 0`.
pub fn select_support(costs: &BranchCosts, k: usize) -> SupportSelection {
    let v = &costs.r - &costs.q;
    let mut order: Vec<usize> = (0..v.len()).collect();
    // Stable sort keeps ties in index order.
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut z = vec![0u8; v.len()];
    for &i in order.iter().take(k) {
        if v[i] <= 0.0 {
            z[i] = 1;
        }
    }
    SupportSelection { z, v, order }
}

/// Projects `w` onto `Y`, returning the projection and its support indicator.
pub fn project_semicard(w: &DVector<f64>, y_set: &SemicontinuousSet) -> Result<(DVector<f64>, Vec<u8>)> {
    let costs = branch_costs(w, y_set)?;
    let selection = select_support(&costs, y_set.cardinality());
    let y = DVector::from_fn(w.len(), |i, _| {
        if selection.z[i] == 1 {
            costs.y_on[i]
        } else {
            0.0
        }
    });
    Ok((y, selection.z))
}
