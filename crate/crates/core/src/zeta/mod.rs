//! Selberg zeta function: Euler product, transfer-operator determinant and zeros.

mod euler;
mod tail;
mod transfer;
mod zeros;

pub use euler::{dlog_z_euler, log_z_euler, EulerConfig, EulerProduct, EulerValue, CONVERGENCE_MARGIN};
pub use tail::{CostZeta, WindowCosts, DEFAULT_WINDOW_DEPTH};
pub use transfer::{
    fredholm_det, fredholm_det_checked, fredholm_det_grid, FredholmEstimate, TransferOperator, DEFAULT_NODES, MIN_NODES,
};
pub use zeros::{find_zeros, winding_number, Rect, ZeroRecord, ZeroSearch};
