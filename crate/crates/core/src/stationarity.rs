//! First-order stationarity certificate.
//!
//! A point `x` with support `J = {i : |xᵢ| > zero_tol}` is stationary when
//!
//! ```text
//! 0 ∈ ∇f(x) + ν − η + κ + N_X(x)
//! ```
//!
//! with `ν, η ≥ 0` the multipliers of `xᵢ ≤ bᵢ` and `xᵢ ≥ aᵢ` on `J`, and
//! `κ` free on the complement of `J`. Since `κ` absorbs every row outside
//! `J`, only the rows in `J` are fitted. The normal cone of `X` is spanned by
//! the active blocks: box faces, the budget direction `e` (free sign), `−μ`
//! for a tight return floor and `2Dx` for a tight risk cap. Multipliers of
//! inactive constraints are fixed at zero, so complementarity holds by
//! construction.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::model::ProblemSpec;
use crate::nnls::nnls;

/// Default threshold separating zero coordinates from the support.
pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

/// Points farther than this from `X` are rejected.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Multipliers of the blocks of `X`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct XConeMultipliers {
    pub box_lower: DVector<f64>,
    pub box_upper: DVector<f64>,
    /// Multiplier of `eᵀx = 1` (any sign).
    pub budget: Option<f64>,
    pub return_floor: Option<f64>,
    pub risk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityCertificate {
    pub nu: DVector<f64>,
    pub eta: DVector<f64>,
    pub kappa: DVector<f64>,
    pub xcone: XConeMultipliers,
    /// Euclidean norm of the fitted system residual.
    pub residual: f64,
    pub support: Vec<usize>,
}

#[derive(Clone, Copy)]
enum Column {
    Nu(usize),
    Eta(usize),
    BoxLower(usize),
    BoxUpper(usize),
    BudgetPlus,
    BudgetMinus,
    ReturnFloor,
    Risk,
}

fn near(value: f64, bound: f64, tol: f64) -> bool {
    bound.is_finite() && (value - bound).abs() <= tol * bound.abs().max(1.0)
}

pub fn stationarity_residual(spec: &ProblemSpec, x: &DVector<f64>, zero_tol: f64) -> Result<StationarityCertificate> {
    let n = spec.dim();
    check_dim("stationarity point", n, x.len())?;
    if !(zero_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("zero_tol must be positive, got {zero_tol}")));
    }
    let violation = spec.x_set.violation(x);
    if !(violation <= FEASIBILITY_TOL) {
        return Err(Error::Infeasible { violation });
    }

    let grad = spec.objective.gradient(x);
    let support: Vec<usize> = (0..n).filter(|&i| x[i].abs() > zero_tol).collect();
    let (a, b) = (spec.y_set.lower(), spec.y_set.upper());
    let xs = &spec.x_set;

    // Each column is the gradient of an active constraint, oriented so that
    // its multiplier is nonnegative.
    let mut columns: Vec<(Column, DVector<f64>)> = Vec::new();
    let unit = |i: usize, sign: f64| {
        let mut c = DVector::zeros(n);
        c[i] = sign;
        c
    };
    for &i in &support {
        if x[i] >= b[i] - zero_tol * b[i].abs().max(1.0) {
            columns.push((Column::Nu(i), unit(i, 1.0)));
        }
        if x[i] <= a[i] + zero_tol * a[i].abs().max(1.0) {
            columns.push((Column::Eta(i), unit(i, -1.0)));
        }
        if let Some(bx) = &xs.bounds {
            if near(x[i], bx.lower[i], zero_tol) {
                columns.push((Column::BoxLower(i), unit(i, -1.0)));
            }
            if near(x[i], bx.upper[i], zero_tol) {
                columns.push((Column::BoxUpper(i), unit(i, 1.0)));
            }
        }
    }
    if xs.budget {
        columns.push((Column::BudgetPlus, DVector::from_element(n, 1.0)));
        columns.push((Column::BudgetMinus, DVector::from_element(n, -1.0)));
    }
    if let Some(rf) = &xs.return_floor {
        if rf.mu.dot(x) - rf.rho0 <= zero_tol * rf.rho0.abs().max(1.0) {
            columns.push((Column::ReturnFloor, -&rf.mu));
        }
    }
    if let Some(risk) = &xs.risk {
        if risk.value(x) - risk.sigma0 >= -zero_tol * risk.sigma0.abs().max(1.0) {
            columns.push((Column::Risk, risk.gradient(x)));
        }
    }

    // Fit −∇f on the support rows.
    let rows = support.len();
    let mat = DMatrix::from_fn(rows, columns.len(), |r, c| columns[c].1[support[r]]);
    let rhs = DVector::from_fn(rows, |r, _| -grad[support[r]]);
    let weights = nnls(&mat, &rhs);
    let residual = (&mat * &weights - &rhs).norm();

    let mut nu = DVector::zeros(n);
    let mut eta = DVector::zeros(n);
    let mut xcone = XConeMultipliers {
        box_lower: DVector::zeros(n),
        box_upper: DVector::zeros(n),
        budget: xs.budget.then_some(0.0),
        return_floor: xs.return_floor.as_ref().map(|_| 0.0),
        risk: xs.risk.as_ref().map(|_| 0.0),
    };
    let mut combined = grad.clone();
    for ((kind, col), &w) in columns.iter().zip(weights.iter()) {
        combined += col * w;
        match *kind {
            Column::Nu(i) => nu[i] += w,
            Column::Eta(i) => eta[i] += w,
            Column::BoxLower(i) => xcone.box_lower[i] += w,
            Column::BoxUpper(i) => xcone.box_upper[i] += w,
            Column::BudgetPlus => *xcone.budget.get_or_insert(0.0) += w,
            Column::BudgetMinus => *xcone.budget.get_or_insert(0.0) -= w,
            Column::ReturnFloor => *xcone.return_floor.get_or_insert(0.0) += w,
            Column::Risk => *xcone.risk.get_or_insert(0.0) += w,
        }
    }
    let mut kappa = DVector::zeros(n);
    let mut on = vec![false; n];
    for &i in &support {
        on[i] = true;
    }
    for i in 0..n {
        if !on[i] {
            kappa[i] = -combined[i];
        }
    }

    Ok(StationarityCertificate {
        nu,
        eta,
        kappa,
        xcone,
        residual,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConvexSetX, ObjectiveKind, ReturnFloor, RiskCap, SemicontinuousSet};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    /// f = ½‖x − c‖².
    fn shifted(c: &[f64], x_set: ConvexSetX, a: f64, b: f64, k: usize) -> ProblemSpec {
        let n = c.len();
        ProblemSpec::new(
            ObjectiveKind::LeastSquares {
                a: DMatrix::identity(n, n),
                b_obs: v(c),
            },
            x_set,
            SemicontinuousSet::uniform(n, a, b, k).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn interior_minimizer_has_zero_residual() {
        let c = [0.3, 0.0, 0.7];
        let spec = shifted(&c, ConvexSetX::uniform_box(3, -10.0, 10.0), 0.1, 1.0, 2);
        let cert = stationarity_residual(&spec, &v(&c), DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(cert.residual, 0.0);
        assert_eq!(cert.support, vec![0, 2]);
        assert!(cert.nu.iter().chain(cert.eta.iter()).all(|&m| m == 0.0));
    }

    #[test]
    fn wrong_side_of_lower_bound_is_not_stationary() {
        // ∇f(0.1) = −0.4 points into Y: η would have to be −0.4.
        let spec = shifted(&[0.5], ConvexSetX::uniform_box(1, 0.0, 1.0), 0.1, 1.0, 1);
        let cert = stationarity_residual(&spec, &v(&[0.1]), DEFAULT_ZERO_TOL).unwrap();
        assert_abs_diff_eq!(cert.residual, 0.4, epsilon = 1e-15);
        assert_eq!(cert.eta[0], 0.0);
    }

    #[test]
    fn lower_bound_multiplier_is_fitted() {
        // ∇f(0.1) = 0.06 is balanced by η = 0.06.
        let spec = shifted(&[0.04], ConvexSetX::uniform_box(1, 0.0, 1.0), 0.1, 1.0, 1);
        let cert = stationarity_residual(&spec, &v(&[0.1]), DEFAULT_ZERO_TOL).unwrap();
        assert!(cert.residual <= 1e-15);
        assert_abs_diff_eq!(cert.eta[0], 0.06, epsilon = 1e-15);
        assert_eq!(cert.nu[0], 0.0);
    }

    #[test]
    fn unconstrained_interior_point_reports_gradient_norm() {
        let spec = shifted(&[0.5, 0.5], ConvexSetX::uniform_box(2, -10.0, 10.0), 0.01, 5.0, 2);
        let x = v(&[0.2, 0.9]);
        let cert = stationarity_residual(&spec, &x, DEFAULT_ZERO_TOL).unwrap();
        assert_abs_diff_eq!(cert.residual, (0.09f64 + 0.16).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn zero_coordinates_are_absorbed_by_kappa() {
        let spec = shifted(&[0.5, 0.8], ConvexSetX::uniform_box(2, 0.0, 1.0), 0.1, 1.0, 1);
        let cert = stationarity_residual(&spec, &v(&[0.5, 0.0]), DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(cert.residual, 0.0);
        assert_abs_diff_eq!(cert.kappa[1], 0.8);
        assert_eq!(cert.kappa[0], 0.0);
    }

    #[test]
    fn budget_multiplier_takes_either_sign() {
        let mut x_set = ConvexSetX::uniform_box(2, 0.0, 1.0);
        x_set.budget = true;
        // Minimizer of ½‖x − c‖² on eᵀx = 1 is c + θe with θ = (1 − eᵀc)/2.
        for c in [[0.2, 0.4], [0.9, 0.7]] {
            let spec = shifted(&c, x_set.clone(), 0.01, 1.0, 2);
            let theta = (1.0 - c[0] - c[1]) / 2.0;
            let x = v(&[c[0] + theta, c[1] + theta]);
            let cert = stationarity_residual(&spec, &x, DEFAULT_ZERO_TOL).unwrap();
            assert!(cert.residual <= 1e-14);
            // ∇f = θe is cancelled by the budget direction.
            assert_abs_diff_eq!(cert.xcone.budget.unwrap(), -theta, epsilon = 1e-14);
        }
    }

    #[test]
    fn return_floor_and_risk_columns() {
        // min ½‖x − 0‖² s.t. x₁ + x₂ ≥ 1: optimum (½, ½), multiplier ½.
        let x_set = ConvexSetX {
            return_floor: Some(ReturnFloor { mu: v(&[1.0, 1.0]), rho0: 1.0 }),
            ..ConvexSetX::uniform_box(2, 0.0, 1.0)
        };
        let spec = shifted(&[0.0, 0.0], x_set, 0.01, 1.0, 2);
        let cert = stationarity_residual(&spec, &v(&[0.5, 0.5]), DEFAULT_ZERO_TOL).unwrap();
        assert!(cert.residual <= 1e-15);
        assert_abs_diff_eq!(cert.xcone.return_floor.unwrap(), 0.5, epsilon = 1e-15);

        // min ½‖x − (1, 1)‖² s.t. ‖x‖² ≤ 0.5: optimum (½, ½), γ·2x = c − x gives γ = ½.
        let x_set = ConvexSetX {
            risk: Some(RiskCap { d: v(&[1.0, 1.0]), sigma0: 0.5 }),
            ..ConvexSetX::uniform_box(2, 0.0, 1.0)
        };
        let spec = shifted(&[1.0, 1.0], x_set, 0.01, 1.0, 2);
        let cert = stationarity_residual(&spec, &v(&[0.5, 0.5]), DEFAULT_ZERO_TOL).unwrap();
        assert!(cert.residual <= 1e-15);
        assert_abs_diff_eq!(cert.xcone.risk.unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rejects_points_outside_x() {
        let spec = shifted(&[0.5], ConvexSetX::uniform_box(1, 0.0, 1.0), 0.1, 1.0, 1);
        assert!(matches!(
            stationarity_residual(&spec, &v(&[1.1]), DEFAULT_ZERO_TOL),
            Err(Error::Infeasible { .. })
        ));
        assert!(stationarity_residual(&spec, &v(&[0.5]), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn residual_is_homogeneous_in_the_objective(
            c in prop::collection::vec(-1.0f64..2.0, 4),
            x in prop::collection::vec(0.0f64..1.0, 4),
            t in 0.1f64..10.0,
        ) {
            let mut x_set = ConvexSetX::uniform_box(4, 0.0, 1.0);
            x_set.budget = true;
            let x = v(&x) / x.iter().sum::<f64>().max(1e-3);
            prop_assume!(x.iter().all(|&xi| xi <= 1.0));
            let base = shifted(&c, x_set.clone(), 0.05, 1.0, 4);
            let m = DMatrix::identity(4, 4) * t.sqrt();
            let scaled = ProblemSpec::new(
                ObjectiveKind::LeastSquares { a: m, b_obs: v(&c) * t.sqrt() },
                x_set,
                base.y_set.clone(),
            ).unwrap();
            let r0 = stationarity_residual(&base, &x, DEFAULT_ZERO_TOL).unwrap().residual;
            let r1 = stationarity_residual(&scaled, &x, DEFAULT_ZERO_TOL).unwrap().residual;
            prop_assert!((r1 - t * r0).abs() <= 1e-9 * (1.0 + t * r0));
        }

        #[test]
        fn multipliers_respect_signs_and_complementarity(
            c in prop::collection::vec(-1.0f64..2.0, 5),
            x in prop::collection::vec(0.0f64..1.0, 5),
        ) {
            let spec = shifted(&c, ConvexSetX::uniform_box(5, 0.0, 1.0), 0.2, 0.8, 3);
            let x = v(&x).map(|xi| if xi < 0.2 { 0.0 } else { xi.min(0.8) });
            let cert = stationarity_residual(&spec, &x, DEFAULT_ZERO_TOL).unwrap();
            for i in 0..5 {
                prop_assert!(cert.nu[i] >= 0.0 && cert.eta[i] >= 0.0);
                prop_assert!((cert.nu[i] * (x[i] - 0.8)).abs() <= 1e-8);
                prop_assert!((cert.eta[i] * (x[i] - 0.2)).abs() <= 1e-8);
                if cert.support.contains(&i) {
                    prop_assert_eq!(cert.kappa[i], 0.0);
                }
            }
        }
    }
}
