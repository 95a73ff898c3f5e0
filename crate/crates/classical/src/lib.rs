//! Baseline forecasters: bagged CART regression trees, Gaussian process
//! regression with a squared-exponential kernel, and ARIMA estimated by
//! conditional sum of squares.
//!
//! Trees and GPR are single-output learners, so multi-month horizons use one
//! independent model per horizon step. ARIMA is univariate and forecasts
//! multiple steps by iterating its recursion.

pub mod arima;
pub mod bagging;
mod error;
pub mod gpr;
mod linalg;
mod optim;
mod seed;
pub mod tree;

pub use arima::{arima_fit, arima_select_order, ArimaForecaster, ArimaModel, ArimaOrder, OrderSearch};
pub use bagging::{BaggedTreesModel, BaggingConfig};
pub use error::{ClassicalError, Result};
pub use gpr::{
    gpr_fit, gpr_optimize, gpr_optimize_many, log_marginal_likelihood, GprForecaster, GprGrid, GprModel, GprSearch,
    KernelHyper,
};
pub use tree::{tree_fit, TreeNode};
