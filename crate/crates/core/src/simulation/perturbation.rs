//! In-silico perturbation experiments.
//!
//! Three illustrative proxies for how resistant a network's state is to
//! change:
//!
//! * alignment: mean over equilibrium samples of `|2·(fraction of 1s) − 1|`;
//! * clamp-flip spread: one node is clamped to the minority state of the
//!   others, and the clamped chain and a free copy are run on common random
//!   numbers; the spread is their mean Hamming distance over the remaining
//!   nodes;
//! * field sweep: a uniform field added to every threshold is raised and
//!   then lowered along a grid, carrying one chain across steps, and the
//!   mean node state is recorded at each step.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::IsingNetwork;
use crate::metrics::aspl;
use crate::simulation::gibbs::{gibbs_sample, GibbsChain, GibbsConfig, DEFAULT_BURN_IN, DEFAULT_THINNING};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    /// Equilibrium samples used for alignment and as clamp starting points.
    pub samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub trials: usize,
    /// Sweeps run after clamping.
    pub resample_sweeps: usize,
    pub field_min: f64,
    pub field_max: f64,
    pub field_steps: usize,
    pub sweeps_per_step: usize,
    pub seed: u64,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        PerturbationConfig {
            samples: 5000,
            burn_in: DEFAULT_BURN_IN,
            thinning: DEFAULT_THINNING,
            trials: 500,
            resample_sweeps: 20,
            field_min: -3.0,
            field_max: 3.0,
            field_steps: 13,
            sweeps_per_step: 200,
            seed: crate::simulation::gibbs::DEFAULT_SEED,
        }
    }
}

impl PerturbationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("samples", self.samples),
            ("thinning", self.thinning),
            ("trials", self.trials),
            ("resample_sweeps", self.resample_sweeps),
            ("sweeps_per_step", self.sweeps_per_step),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
        }
        if self.field_steps < 2 {
            return Err(Error::InvalidConfig("field sweep needs at least 2 steps".into()));
        }
        if !(self.field_min.is_finite() && self.field_max.is_finite() && self.field_min < self.field_max) {
            return Err(Error::InvalidConfig(format!(
                "field range [{}, {}] is not a finite increasing interval",
                self.field_min, self.field_max
            )));
        }
        Ok(())
    }

    pub fn field_grid(&self) -> Vec<f64> {
        let step = (self.field_max - self.field_min) / (self.field_steps - 1) as f64;
        (0..self.field_steps)
            .map(|i| {
                if i + 1 == self.field_steps {
                    self.field_max
                } else {
                    self.field_min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub field: f64,
    pub direction: SweepDirection,
    pub mean_state: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub network_id: String,
    pub p: usize,
    /// ASPL of the network; absent when it has no edges.
    pub connectivity: Option<f64>,
    pub alignment: f64,
    /// Alignment of an edgeless network with the same thresholds.
    pub alignment_baseline: f64,
    pub flip_response: f64,
    pub field_sweep: Vec<SweepPoint>,
    pub note: String,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean of `|2·(fraction of 1s) − 1|` over rows.
pub fn alignment(data: &crate::data::BinaryDataset) -> f64 {
    let p = data.p() as f64;
    let sum: f64 = (0..data.n())
        .map(|r| {
            let ones = data.columns().iter().filter(|c| c[r] == 1).count() as f64;
            (2.0 * ones / p - 1.0).abs()
        })
        .sum();
    sum / data.n() as f64
}

/// Value of `node` opposite to the majority of the other nodes; on a tie,
/// opposite to its current value.
fn minority_state(state: &[u8], node: usize) -> u8 {
    let others = state.len() - 1;
    let ones = state.iter().enumerate().filter(|&(i, &x)| i != node && x == 1).count();
    match (2 * ones).cmp(&others) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => 1 - state[node],
    }
}

/// Mean Hamming distance between a clamped and a free chain started from
/// `start`, over `sweeps` sweeps, excluding the clamped node.
fn clamp_spread(network: &IsingNetwork, start: &[u8], node: usize, sweeps: usize, rng: &mut ChaCha8Rng) -> f64 {
    let p = network.p();
    let mut free = start.to_vec();
    let mut clamped = start.to_vec();
    clamped[node] = minority_state(start, node);
    let mut total = 0usize;
    for _ in 0..sweeps {
        for i in 0..p {
            let u: f64 = rng.random();
            free[i] = u8::from(u < network.conditional_one(i, &free));
            if i != node {
                clamped[i] = u8::from(u < network.conditional_one(i, &clamped));
            }
        }
        total += (0..p).filter(|&i| i != node && free[i] != clamped[i]).count();
    }
    total as f64 / sweeps as f64
}

/// Mean state along an up-then-down field sweep carried by one chain.
pub fn field_sweep(network: &IsingNetwork, config: &PerturbationConfig) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    let grid = config.field_grid();
    let p = network.p() as f64;
    let start = network.with_field(grid[0]);
    let mut chain = GibbsChain::new(&start, stream_rng(config.seed, 2));
    for _ in 0..config.burn_in {
        chain.sweep();
    }
    let mut state = chain.state().to_vec();
    let mut rng = stream_rng(config.seed, 3);
    let mut out = Vec::with_capacity(2 * grid.len());
    let down: Vec<f64> = grid.iter().rev().copied().collect();
    for (direction, fields) in [(SweepDirection::Up, &grid), (SweepDirection::Down, &down)] {
        for &field in fields {
            let shifted = network.with_field(field);
            let mut chain = GibbsChain::from_state(&shifted, state, ChaCha8Rng::seed_from_u64(rng.random()));
            let mut ones = 0usize;
            for _ in 0..config.sweeps_per_step {
                chain.sweep();
                ones += chain.state().iter().filter(|&&x| x == 1).count();
            }
            state = chain.state().to_vec();
            out.push(SweepPoint {
                field,
                direction,
                mean_state: ones as f64 / (p * config.sweeps_per_step as f64),
            });
        }
    }
    Ok(out)
}

pub fn perturbation_experiment(
    network: &IsingNetwork,
    network_id: &str,
    config: &PerturbationConfig,
) -> Result<PerturbationReport> {
    config.validate()?;
    let p = network.p();
    if p < 2 {
        return Err(Error::InvalidNetwork("perturbation needs at least two nodes".into()));
    }
    let gibbs = GibbsConfig {
        n: config.samples,
        burn_in: config.burn_in,
        thinning: config.thinning,
        seed: config.seed,
    };
    let samples = gibbs_sample(network, &gibbs)?;
    let edgeless = IsingNetwork::new(network.names().to_vec(), network.thresholds().to_vec(), vec![vec![0.0; p]; p])?;
    let baseline = gibbs_sample(&edgeless, &gibbs)?;

    let spreads: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let start = samples.row(t % samples.n());
            let mut rng = stream_rng(config.seed, 1_000 + t as u64);
            clamp_spread(network, &start, t % p, config.resample_sweeps, &mut rng)
        })
        .collect();

    let connectivity = match aspl(network) {
        Ok(r) => Some(r.aspl),
        Err(Error::NoConnectedPairs { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(PerturbationReport {
        network_id: network_id.to_string(),
        p,
        connectivity,
        alignment: alignment(&samples),
        alignment_baseline: alignment(&baseline),
        flip_response: spreads.iter().sum::<f64>() / spreads.len() as f64,
        field_sweep: field_sweep(network, config)?,
        note: "alignment, clamp-flip spread and field sweep are illustrative simulation proxies, not estimates from survey data".into(),
    })
}

/// `field,mean_state` rows, up sweep first.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["field", "mean_state"])?;
    for pt in points {
        wtr.write_record([format!("{:?}", pt.field), format!("{:?}", pt.mean_state)])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// Complete graph with every weight `w`; thresholds `−(p−1)·w/2` make the
/// all-0 and all-1 states equally likely.
pub fn dense_network(p: usize, w: f64) -> Result<IsingNetwork> {
    let edges: Vec<_> = (0..p).flat_map(|i| ((i + 1)..p).map(move |j| (i, j, w))).collect();
    IsingNetwork::from_edges(vec![-((p - 1) as f64) * w / 2.0; p], &edges)
}

/// Cycle with every weight `w`, thresholds `−w`.
pub fn ring_network(p: usize, w: f64) -> Result<IsingNetwork> {
    if p < 3 {
        return Err(Error::InvalidConfig("a ring needs at least 3 nodes".into()));
    }
    let edges: Vec<_> = (0..p).map(|i| (i, (i + 1) % p, w)).collect();
    IsingNetwork::from_edges(vec![-w; p], &edges)
}
