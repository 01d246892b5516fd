//! Ising network estimation by nodewise L1-penalized logistic regression
//! with EBIC neighborhood selection.

pub mod ebic;
pub mod lasso;
pub mod network;
pub mod nodewise;

pub use ebic::ebic;
pub use lasso::{fit_l1_logistic, lambda_max, lambda_path, LogisticFit, SolverOptions};
pub use network::IsingNetwork;
pub use nodewise::{
    combine_coefficients, estimate_network, estimate_network_detailed, select_neighborhood,
    EdgeRule, EstimationConfig, NetworkEstimate, NodewiseFit, PathPoint,
};
