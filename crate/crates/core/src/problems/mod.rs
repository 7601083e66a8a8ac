//! Seeded instance generators for the portfolio and compressed-sensing
//! experiments, the sensing error metric and a hard-thresholding baseline.

mod cs;
mod portfolio;
pub mod rng;

pub use cs::{baseline_hard_threshold, gen_cs, hard_threshold, mse, CsInstance, CS_CAP, CS_FLOOR};
pub use portfolio::{gen_portfolio, PortfolioInstance, PortfolioParams, FACTOR_SERIES_LEN};
