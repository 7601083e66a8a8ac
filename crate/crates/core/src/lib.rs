//! Sparse semicontinuous optimization by splitting and successive augmented
//! Lagrangian steps.
//!
//! Solves `min f(x)` over `x ∈ X`, `‖x‖₀ ≤ K`, `xᵢ ∈ {0} ∪ [aᵢ, bᵢ]` for a
//! smooth convex `f` and a convex polyhedral `X` (optionally with a diagonal
//! quadratic risk cap).

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod inner;
pub mod instance;
pub mod model;
mod nnls;
pub mod oracle;
pub mod problems;
pub mod semiproj;
pub mod ssal;
pub mod stationarity;

pub use error::{Error, Result};
pub use model::{ConvexSetX, ObjectiveKind, ProblemSpec, SemicontinuousSet};
