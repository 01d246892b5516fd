//! Exact enumeration of the Ising distribution over `{0,1}^p`.
//!
//! States are indexed by integers whose bit `i` is the value of node `i`.

use crate::error::{Error, Result};
use crate::estimation::IsingNetwork;

pub const EXACT_MAX_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    p: usize,
    probabilities: Vec<f64>,
}

pub fn state_of(index: usize, p: usize) -> Vec<u8> {
    (0..p).map(|i| ((index >> i) & 1) as u8).collect()
}

pub fn index_of(state: &[u8]) -> usize {
    state
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &x)| acc | (usize::from(x) << i))
}

/// Normalized table of all `2^p` state probabilities.
pub fn exact_distribution(network: &IsingNetwork) -> Result<ExactDistribution> {
    let p = network.p();
    if p > EXACT_MAX_NODES {
        return Err(Error::ExactLimit {
            p,
            max: EXACT_MAX_NODES,
        });
    }
    let log_pot: Vec<f64> = (0..1usize << p)
        .map(|s| network.log_potential(&state_of(s, p)))
        .collect();
    let max = log_pot.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probabilities: Vec<f64> = log_pot.iter().map(|v| (v - max).exp()).collect();
    let z: f64 = probabilities.iter().sum();
    for v in &mut probabilities {
        *v /= z;
    }
    Ok(ExactDistribution { p, probabilities })
}

impl ExactDistribution {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, state: &[u8]) -> f64 {
        self.probabilities[index_of(state)]
    }

    /// P(x_i = 1 | all other nodes as in `state`), read off the table.
    pub fn conditional_one(&self, i: usize, state: &[u8]) -> f64 {
        let base = index_of(state) & !(1 << i);
        let p0 = self.probabilities[base];
        let p1 = self.probabilities[base | (1 << i)];
        p1 / (p0 + p1)
    }

    /// P(x_i = 1) for every node.
    pub fn marginals(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.p];
        for (s, &pr) in self.probabilities.iter().enumerate() {
            for (i, mi) in m.iter_mut().enumerate() {
                if s >> i & 1 == 1 {
                    *mi += pr;
                }
            }
        }
        m
    }

    /// Total-variation distance to another distribution over the same
    /// state indexing.
    pub fn total_variation(&self, other: &[f64]) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Pushes a distribution over states through one systematic-scan Gibbs
/// sweep (nodes updated in index order).
pub fn apply_sweep(network: &IsingNetwork, dist: &[f64]) -> Vec<f64> {
    let p = network.p();
    let mut cur = dist.to_vec();
    for i in 0..p {
        let bit = 1usize << i;
        let mut next = vec![0.0; cur.len()];
        for base in (0..cur.len()).filter(|s| s & bit == 0) {
            let mass = cur[base] + cur[base | bit];
            let q = network.conditional_one(i, &state_of(base, p));
            next[base] = mass * (1.0 - q);
            next[base | bit] = mass * q;
        }
        cur = next;
    }
    cur
}

/// Empirical state frequencies of a dataset, indexed like
/// [`ExactDistribution::probabilities`].
pub fn empirical_distribution(data: &crate::data::BinaryDataset) -> Result<Vec<f64>> {
    let p = data.p();
    if p > EXACT_MAX_NODES {
        return Err(Error::ExactLimit {
            p,
            max: EXACT_MAX_NODES,
        });
    }
    let mut counts = vec![0.0; 1 << p];
    for r in 0..data.n() {
        let idx = (0..p).fold(0, |acc, j| acc | (usize::from(data.column(j)[r]) << j));
        counts[idx] += 1.0;
    }
    let n = data.n() as f64;
    counts.iter_mut().for_each(|c| *c /= n);
    Ok(counts)
}
