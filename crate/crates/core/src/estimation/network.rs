use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairwise binary Markov random field over {0,1}^p:
/// P(x) ∝ exp(Σ_i τ_i x_i + Σ_{i<j} W_ij x_i x_j).
///
/// Weights are symmetric with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingNetwork {
    names: Vec<String>,
    thresholds: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct NetworkRepr {
    names: Vec<String>,
    thresholds: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

impl<'de> Deserialize<'de> for IsingNetwork {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = NetworkRepr::deserialize(d)?;
        IsingNetwork::new(r.names, r.thresholds, r.weights).map_err(serde::de::Error::custom)
    }
}

impl IsingNetwork {
    pub fn new(names: Vec<String>, thresholds: Vec<f64>, weights: Vec<Vec<f64>>) -> Result<Self> {
        let p = names.len();
        if p == 0 {
            return Err(Error::InvalidNetwork("network has no nodes".into()));
        }
        if thresholds.len() != p || weights.len() != p || weights.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidNetwork(format!(
                "dimension mismatch: {p} names, {} thresholds, weights not {p}x{p}",
                thresholds.len()
            )));
        }
        if let Some(t) = thresholds.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidNetwork(format!("non-finite threshold {t}")));
        }
        for i in 0..p {
            if weights[i][i] != 0.0 {
                return Err(Error::InvalidNetwork(format!("nonzero diagonal at node {i}")));
            }
            for j in 0..i {
                let (a, b) = (weights[i][j], weights[j][i]);
                if !a.is_finite() {
                    return Err(Error::InvalidNetwork(format!("non-finite weight at ({i}, {j})")));
                }
                if a != b {
                    return Err(Error::InvalidNetwork(format!(
                        "asymmetric weights at ({j}, {i}): {b} vs {a}"
                    )));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidNetwork(format!("duplicate node name {dup:?}")));
        }
        // normalise -0.0 entries so serialized output does not depend on
        // the sign of a zero
        let weights = weights
            .into_iter()
            .map(|r| r.into_iter().map(|w| w + 0.0).collect())
            .collect();
        Ok(IsingNetwork {
            names,
            thresholds,
            weights,
        })
    }

    /// Network with default names `V1..Vp`.
    pub fn unnamed(thresholds: Vec<f64>, weights: Vec<Vec<f64>>) -> Result<Self> {
        let names = (1..=thresholds.len()).map(|i| format!("V{i}")).collect();
        Self::new(names, thresholds, weights)
    }

    /// Builds from an edge list `(i, j, w)`; unlisted pairs are zero.
    pub fn from_edges(thresholds: Vec<f64>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let p = thresholds.len();
        let mut weights = vec![vec![0.0; p]; p];
        for &(i, j, w) in edges {
            if i >= p || j >= p || i == j {
                return Err(Error::InvalidNetwork(format!("bad edge ({i}, {j})")));
            }
            weights[i][j] = w;
            weights[j][i] = w;
        }
        Self::unnamed(thresholds, weights)
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i][j]
    }

    /// Nonzero edges `(i, j, w)` with `i < j`, in row order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let p = self.p();
        (0..p)
            .flat_map(|i| ((i + 1)..p).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let w = self.weights[i][j];
                (w != 0.0).then_some((i, j, w))
            })
            .collect()
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    /// Local field τ_i + Σ_j W_ij x_j of node `i` in `state`.
    pub fn local_field(&self, i: usize, state: &[u8]) -> f64 {
        let row = &self.weights[i];
        self.thresholds[i]
            + state
                .iter()
                .zip(row)
                .filter(|(&x, _)| x == 1)
                .map(|(_, w)| w)
                .sum::<f64>()
    }

    /// P(x_i = 1 | rest) under the model.
    pub fn conditional_one(&self, i: usize, state: &[u8]) -> f64 {
        logistic(self.local_field(i, state))
    }

    /// Unnormalized log-probability Σ τ_i x_i + Σ_{i<j} W_ij x_i x_j.
    pub fn log_potential(&self, state: &[u8]) -> f64 {
        let p = self.p();
        let mut e = 0.0;
        for i in 0..p {
            if state[i] == 1 {
                e += self.thresholds[i];
                for j in (i + 1)..p {
                    if state[j] == 1 {
                        e += self.weights[i][j];
                    }
                }
            }
        }
        e
    }

    /// Same network with `delta` added to every threshold.
    pub fn with_field(&self, delta: f64) -> Self {
        IsingNetwork {
            names: self.names.clone(),
            thresholds: self.thresholds.iter().map(|t| t + delta).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serialization is infallible")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| {
            if e.is_data() {
                Error::InvalidNetwork(e.to_string())
            } else {
                Error::Json(format!("network: {e}"))
            }
        })
    }

    /// Edge list CSV `i,j,weight` for nonzero edges with `i < j` (0-based).
    pub fn write_edge_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["i", "j", "weight"])?;
        for (i, j, w) in self.edges() {
            wtr.write_record([i.to_string(), j.to_string(), format!("{w:?}")])?;
        }
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn to_edge_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
