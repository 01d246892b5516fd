//! Weighted connectivity: shortest paths over inverse absolute edge weights
//! and the average shortest path length (ASPL).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::IsingNetwork;

/// Undirected graph with edge length `1/|w|` for every nonzero weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceGraph {
    /// Neighbor lists sorted by node index.
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl DistanceGraph {
    pub fn from_network(network: &IsingNetwork) -> Self {
        let p = network.p();
        let adjacency = (0..p)
            .map(|i| {
                (0..p)
                    .filter(|&j| j != i && network.weight(i, j) != 0.0)
                    .map(|j| (j, 1.0 / network.weight(i, j).abs()))
                    .collect()
            })
            .collect();
        DistanceGraph { adjacency }
    }

    pub fn p(&self) -> usize {
        self.adjacency.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Direct edge length between `i` and `j`, if any.
    pub fn length(&self, i: usize, j: usize) -> Option<f64> {
        self.adjacency[i]
            .iter()
            .find(|(k, _)| *k == j)
            .map(|&(_, d)| d)
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }
}

pub fn to_distance_graph(network: &IsingNetwork) -> DistanceGraph {
    DistanceGraph::from_network(network)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // min-heap on distance; equal distances pop lowest node index first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths; unreachable nodes get `+∞`.
pub fn dijkstra(graph: &DistanceGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.p()];
    let mut done = vec![false; graph.p()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier {
        dist: 0.0,
        node: source,
    });
    while let Some(Frontier { dist: d, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        for &(next, len) in graph.neighbors(node) {
            let candidate = d + len;
            if candidate < dist[next] {
                dist[next] = candidate;
                heap.push(Frontier {
                    dist: candidate,
                    node: next,
                });
            }
        }
    }
    dist
}

/// Symmetric all-pairs distance matrix. Entry `(u, v)` for `u < v` comes
/// from the search rooted at `u` and is mirrored.
pub fn all_pairs(graph: &DistanceGraph) -> Vec<Vec<f64>> {
    let p = graph.p();
    let mut d: Vec<Vec<f64>> = (0..p).map(|s| dijkstra(graph, s)).collect();
    for u in 0..p {
        for v in 0..u {
            d[u][v] = d[v][u];
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsplResult {
    pub aspl: f64,
    /// Shortest path lengths before replacement (`+∞` when disconnected).
    pub distances: Vec<Vec<f64>>,
    /// Unordered pairs with no connecting path.
    pub disconnected_pairs: usize,
    /// Largest finite pairwise distance, substituted for infinite ones.
    pub replacement_value: Option<f64>,
}

/// Mean shortest path length over unordered node pairs.
///
/// Infinite distances between disconnected nodes are replaced by the
/// largest finite pairwise distance in the same network.
pub fn aspl(network: &IsingNetwork) -> Result<AsplResult> {
    if network.p() < 2 {
        return Err(Error::InsufficientData(
            "ASPL needs at least two nodes".into(),
        ));
    }
    let graph = DistanceGraph::from_network(network);
    aspl_of_graph(&graph)
}

pub fn aspl_of_graph(graph: &DistanceGraph) -> Result<AsplResult> {
    let p = graph.p();
    let distances = all_pairs(graph);
    let pairs = || (0..p).flat_map(|u| ((u + 1)..p).map(move |v| (u, v)));
    let max_finite = pairs()
        .map(|(u, v)| distances[u][v])
        .filter(|d| d.is_finite())
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    let Some(max_finite) = max_finite else {
        return Err(Error::NoConnectedPairs { network: None });
    };
    let disconnected = pairs().filter(|&(u, v)| distances[u][v].is_infinite()).count();
    let total: f64 = pairs()
        .map(|(u, v)| {
            let d = distances[u][v];
            if d.is_finite() {
                d
            } else {
                max_finite
            }
        })
        .sum();
    let n_pairs = p * (p - 1) / 2;
    Ok(AsplResult {
        aspl: total / n_pairs as f64,
        distances,
        disconnected_pairs: disconnected,
        replacement_value: (disconnected > 0).then_some(max_finite),
    })
}

/// Serializable connectivity summary of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub aspl: f64,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub disconnected_pairs: usize,
    pub replacement_value: Option<f64>,
}

impl NetworkMetrics {
    pub fn compute(network: &IsingNetwork) -> Result<(Self, AsplResult)> {
        let result = aspl(network)?;
        let metrics = NetworkMetrics {
            aspl: result.aspl,
            n_nodes: network.p(),
            n_edges: network.n_edges(),
            disconnected_pairs: result.disconnected_pairs,
            replacement_value: result.replacement_value,
        };
        Ok((metrics, result))
    }
}

/// Writes a distance matrix as CSV with node names as header; infinite
/// entries are written as `inf`.
pub fn write_distance_csv<W: Write>(names: &[String], distances: &[Vec<f64>], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    wtr.write_record(&header)?;
    for (name, row) in names.iter().zip(distances) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(|d| {
            if d.is_finite() {
                format!("{d:?}")
            } else {
                "inf".to_string()
            }
        }));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// z-scores `(x − mean) / sd` with the sample (n − 1) standard deviation.
pub fn standardize(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(
            "standardization needs at least two values".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) || sd <= 1e-12 * mean.abs() {
        return Err(Error::ZeroVariance("values to standardize are constant".into()));
    }
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}
