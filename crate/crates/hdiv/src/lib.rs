//! Penalized two-stage least squares for high-dimensional linear
//! instrumental-variable models.
//!
//! The crate estimates `Y = X'beta + u` when `E[u|X] != 0` but
//! instruments `Z` with `E[u|Z] = 0` are available and both stages may be
//! high dimensional. Each first-stage equation is fitted with a penalized
//! regression (BRIDGE or LASSO), the conditional means `D = Z alpha` are
//! predicted, and the second stage regresses `Y` on the predicted means
//! with an OLS, LASSO, BRIDGE, or adaptive-LASSO penalty, followed by
//! standard errors for the selected coefficients.
//!
//! Modules:
//!
//! * [`dgp`] — simulated data generation and dataset normalization,
//! * [`solvers`] — the penalized least-squares solvers,
//! * [`tuning`] — k-fold cross-validation over a geometric lambda grid,
//! * [`two_stage`] — the composed pipeline and standard errors,
//! * [`diagnostics`] — computable assumption checks,
//! * [`metrics`] — scoring of fits against a known truth,
//! * [`harness`] — scenario configs, the Monte Carlo runner, and table
//!   emission behind the `hdiv` CLI.

pub mod dgp;
pub mod diagnostics;
mod error;
pub mod harness;
pub mod metrics;
pub mod solvers;
pub mod tuning;
pub mod two_stage;

pub use error::{Error, Result};
