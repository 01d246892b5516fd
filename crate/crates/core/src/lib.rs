//! Ising attitude networks estimated from survey data: nodewise
//! L1-penalized logistic estimation, weighted path-length connectivity,
//! group-level strength statistics and simulation from known networks.

pub mod data;
pub mod error;
pub mod estimation;
pub mod metrics;
pub mod replicate;
pub mod simulation;
pub mod stats;

pub use data::{BinaryDataset, Schema, SurveyDataset};
pub use error::{Error, ErrorClass, Result};
pub use estimation::{estimate_network, EdgeRule, EstimationConfig, IsingNetwork};
pub use metrics::{aspl, NetworkMetrics};
