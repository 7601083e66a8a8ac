//! JSON interchange format for problem instances.
//!
//! ```json
//! {
//!   "instance_id": "cs-p8-n12-K3-s0",
//!   "n": 12,
//!   "objective": { "kind": "least_squares", "A": [[...], ...], "b": [...] },
//!   "x_set": {
//!     "box": { "lower": [...], "upper": [...] },
//!     "simplex": true,
//!     "return_halfspace": { "mu": [...], "rho0": 0.002 },
//!     "quad_risk": { "D": [...], "sigma0": 0.001 }
//!   },
//!   "y_set": { "a": [...], "b": [...], "K": 3 },
//!   "f_true": [...]
//! }
//! ```
//!
//! A quadratic objective is `{"kind": "quadratic_form", "M": [[...], ...]}`.
//! Matrices are row-major nested lists. `quad_risk.D` may be given either as
//! the list of diagonal entries or as a full (diagonal) matrix. Infinite box
//! bounds are written as `null`. Every block of `x_set` is optional; `instance_id`
//! and `f_true` are optional.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoxBounds, ConvexSetX, ObjectiveKind, ProblemSpec, ReturnFloor, RiskCap, SemicontinuousSet};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveJson {
    QuadraticForm {
        #[serde(rename = "M")]
        m: Vec<Vec<f64>>,
    },
    LeastSquares {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxJson {
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfspaceJson {
    pub mu: Vec<f64>,
    pub rho0: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiagonalJson {
    Diagonal(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskJson {
    #[serde(rename = "D")]
    pub d: DiagonalJson,
    pub sigma0: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct XSetJson {
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoxJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub simplex: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub return_halfspace: Option<HalfspaceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_risk: Option<RiskJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YSetJson {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "K")]
    pub k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_id: Option<String>,
    pub n: usize,
    pub objective: ObjectiveJson,
    pub x_set: XSetJson,
    pub y_set: YSetJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_true: Option<Vec<f64>>,
}

/// A parsed instance: the problem plus optional metadata.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: Option<String>,
    pub spec: ProblemSpec,
    pub f_true: Option<DVector<f64>>,
}

impl Instance {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: InstanceJson = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&InstanceJson::from(self))?)
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidArgument(format!("{what}: ragged rows")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn bound_vector(values: &[Option<f64>], missing: f64) -> DVector<f64> {
    DVector::from_iterator(values.len(), values.iter().map(|v| v.unwrap_or(missing)))
}

fn bound_list(values: &DVector<f64>) -> Vec<Option<f64>> {
    values.iter().map(|&v| v.is_finite().then_some(v)).collect()
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Error;

    fn try_from(raw: InstanceJson) -> Result<Self> {
        let objective = match &raw.objective {
            ObjectiveJson::QuadraticForm { m } => ObjectiveKind::QuadraticForm {
                m: matrix_from_rows(m, "M")?,
            },
            ObjectiveJson::LeastSquares { a, b } => ObjectiveKind::LeastSquares {
                a: matrix_from_rows(a, "A")?,
                b_obs: DVector::from_vec(b.clone()),
            },
        };
        if objective.dim() != raw.n {
            return Err(Error::Dimension {
                context: "instance objective",
                expected: raw.n,
                got: objective.dim(),
            });
        }
        let xs = &raw.x_set;
        let risk = match &xs.quad_risk {
            None => None,
            Some(r) => {
                let d = match &r.d {
                    DiagonalJson::Diagonal(v) => DVector::from_vec(v.clone()),
                    DiagonalJson::Matrix(rows) => {
                        let m = matrix_from_rows(rows, "D")?;
                        if !m.is_square() {
                            return Err(Error::InvalidArgument("D must be square".into()));
                        }
                        for i in 0..m.nrows() {
                            for j in 0..m.ncols() {
                                if i != j && m[(i, j)] != 0.0 {
                                    return Err(Error::InvalidArgument("D must be diagonal".into()));
                                }
                            }
                        }
                        m.diagonal()
                    }
                };
                Some(RiskCap { d, sigma0: r.sigma0 })
            }
        };
        let x_set = ConvexSetX {
            bounds: xs.bounds.as_ref().map(|b| BoxBounds {
                lower: bound_vector(&b.lower, f64::NEG_INFINITY),
                upper: bound_vector(&b.upper, f64::INFINITY),
            }),
            budget: xs.simplex,
            return_floor: xs.return_halfspace.as_ref().map(|h| ReturnFloor {
                mu: DVector::from_vec(h.mu.clone()),
                rho0: h.rho0,
            }),
            risk,
        };
        let y_set = SemicontinuousSet::new(
            DVector::from_vec(raw.y_set.a.clone()),
            DVector::from_vec(raw.y_set.b.clone()),
            raw.y_set.k,
        )?;
        let spec = ProblemSpec::new(objective, x_set, y_set)?;
        let f_true = match raw.f_true {
            Some(f) if f.len() != raw.n => {
                return Err(Error::Dimension {
                    context: "f_true",
                    expected: raw.n,
                    got: f.len(),
                })
            }
            other => other.map(DVector::from_vec),
        };
        Ok(Instance {
            id: raw.instance_id,
            spec,
            f_true,
        })
    }
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        let spec = &inst.spec;
        let objective = match &spec.objective {
            ObjectiveKind::QuadraticForm { m } => ObjectiveJson::QuadraticForm { m: rows_from_matrix(m) },
            ObjectiveKind::LeastSquares { a, b_obs } => ObjectiveJson::LeastSquares {
                a: rows_from_matrix(a),
                b: b_obs.iter().copied().collect(),
            },
        };
        let xs = &spec.x_set;
        InstanceJson {
            instance_id: inst.id.clone(),
            n: spec.dim(),
            objective,
            x_set: XSetJson {
                bounds: xs.bounds.as_ref().map(|b| BoxJson {
                    lower: bound_list(&b.lower),
                    upper: bound_list(&b.upper),
                }),
                simplex: xs.budget,
                return_halfspace: xs.return_floor.as_ref().map(|h| HalfspaceJson {
                    mu: h.mu.iter().copied().collect(),
                    rho0: h.rho0,
                }),
                quad_risk: xs.risk.as_ref().map(|r| RiskJson {
                    d: DiagonalJson::Diagonal(r.d.iter().copied().collect()),
                    sigma0: r.sigma0,
                }),
            },
            y_set: YSetJson {
                a: spec.y_set.lower().iter().copied().collect(),
                b: spec.y_set.upper().iter().copied().collect(),
                k: spec.y_set.cardinality(),
            },
            f_true: inst.f_true.as_ref().map(|f| f.iter().copied().collect()),
        }
    }
}
