//! Sampling from known Ising networks.

pub mod exact;
pub mod gibbs;
pub mod perturbation;

pub use exact::{apply_sweep, empirical_distribution, exact_distribution, ExactDistribution, EXACT_MAX_NODES};
pub use gibbs::{gibbs_sample, GibbsChain, GibbsConfig};
pub use perturbation::{
    dense_network, field_sweep, perturbation_experiment, ring_network, write_sweep_csv, PerturbationConfig,
    PerturbationReport, SweepPoint,
};
