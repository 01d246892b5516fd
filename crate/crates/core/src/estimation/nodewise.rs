//! Neighborhood selection: one penalized logistic regression per node,
//! EBIC choice along the penalty path, and symmetric edge combination.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::BinaryDataset;
use crate::error::{Error, Result};
use crate::estimation::ebic::ebic;
use crate::estimation::lasso::{
    fit_l1_logistic, lambda_path, log_likelihood, LogisticFit, SolverOptions,
};
use crate::estimation::network::IsingNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRule {
    /// Edge present only if both directed coefficients are nonzero.
    And,
    /// Edge present if either directed coefficient is nonzero.
    Or,
}

impl std::str::FromStr for EdgeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(EdgeRule::And),
            "or" => Ok(EdgeRule::Or),
            other => Err(Error::InvalidConfig(format!("unknown edge rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub gamma: f64,
    pub n_lambda: usize,
    pub lambda_ratio: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub edge_rule: EdgeRule,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            gamma: 0.25,
            n_lambda: 100,
            lambda_ratio: 0.01,
            tolerance: 1e-7,
            max_iterations: 10_000,
            edge_rule: EdgeRule::And,
        }
    }
}

impl EstimationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma {} must be >= 0", self.gamma)));
        }
        if self.n_lambda < 2 {
            return Err(Error::InvalidConfig(format!(
                "lambda count {} must be >= 2",
                self.n_lambda
            )));
        }
        if !(self.lambda_ratio > 0.0 && self.lambda_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda ratio {} outside (0, 1)",
                self.lambda_ratio
            )));
        }
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "tolerance and iteration limit must be positive".into(),
            ));
        }
        Ok(())
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPoint {
    pub lambda: f64,
    pub intercept: f64,
    /// One entry per predictor, in [`NodewiseFit::predictors`] order.
    pub coefficients: Vec<f64>,
    pub log_likelihood: f64,
    pub active: usize,
    pub ebic: f64,
}

/// Penalty path of one node's regression on all other nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodewiseFit {
    pub node: usize,
    /// Dataset column of each coefficient.
    pub predictors: Vec<usize>,
    pub path: Vec<PathPoint>,
    pub selected: usize,
}

impl NodewiseFit {
    pub fn selected_point(&self) -> &PathPoint {
        &self.path[self.selected]
    }

    /// Selected coefficient of dataset column `j` (zero for `j == node`).
    pub fn coefficient_of(&self, j: usize) -> f64 {
        self.predictors
            .iter()
            .position(|&k| k == j)
            .map_or(0.0, |pos| self.selected_point().coefficients[pos])
    }
}

fn as_f64(col: &[u8]) -> Vec<f64> {
    col.iter().map(|&v| f64::from(v)).collect()
}

/// Regresses column `node` on every other column along the penalty path,
/// with warm starts from larger to smaller penalties, and selects the path
/// point minimizing EBIC (ties go to the larger penalty).
///
/// When no predictor is correlated with the response (`λ_max = 0`) the path
/// collapses to a single unpenalized point, which is then the null model.
pub fn select_neighborhood(
    dataset: &BinaryDataset,
    node: usize,
    config: &EstimationConfig,
) -> Result<NodewiseFit> {
    config.validate()?;
    if node >= dataset.p() {
        return Err(Error::InvalidConfig(format!(
            "node {node} out of range for {} variables",
            dataset.p()
        )));
    }
    let y = as_f64(dataset.column(node));
    // coordinate order follows the names so a column permutation cannot
    // change the arithmetic
    let mut predictors: Vec<usize> = (0..dataset.p()).filter(|&j| j != node).collect();
    predictors.sort_by(|&a, &b| dataset.names()[a].cmp(&dataset.names()[b]));
    let x: Vec<Vec<f64>> = predictors.iter().map(|&j| as_f64(dataset.column(j))).collect();
    let n = y.len();
    let candidates = predictors.len();

    let with_node = |e: Error| match e {
        Error::NonConvergence {
            lambda, iterations, ..
        } => Error::NonConvergence {
            node: Some(node),
            lambda,
            iterations,
        },
        other => other,
    };

    let lambdas = match lambda_path(&x, &y, config.n_lambda, config.lambda_ratio) {
        Ok(path) => path,
        Err(Error::ZeroLambdaMax) => vec![0.0],
        Err(e) => return Err(with_node(e)),
    };

    let solver = config.solver();
    let mut path = Vec::with_capacity(lambdas.len());
    let mut warm: Option<LogisticFit> = None;
    for &lambda in &lambdas {
        let fit = fit_l1_logistic(&x, &y, lambda, warm.as_ref(), &solver).map_err(with_node)?;
        let ll = log_likelihood(&x, &y, fit.intercept, &fit.coefficients);
        let active = fit.active_count();
        path.push(PathPoint {
            lambda,
            intercept: fit.intercept,
            coefficients: fit.coefficients.clone(),
            log_likelihood: ll,
            active,
            ebic: ebic(ll, active, n, candidates, config.gamma),
        });
        warm = Some(fit);
    }

    let mut selected = 0;
    for (k, point) in path.iter().enumerate() {
        if point.ebic < path[selected].ebic {
            selected = k;
        }
    }
    Ok(NodewiseFit {
        node,
        predictors,
        path,
        selected,
    })
}

/// Symmetrizes directed coefficients: `directed[i][j]` is the coefficient of
/// node `j` in node `i`'s selected regression. Kept edges carry the mean of
/// the nonzero directed coefficients.
pub fn combine_coefficients(directed: &[Vec<f64>], rule: EdgeRule) -> Vec<Vec<f64>> {
    let p = directed.len();
    let mut w = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in (i + 1)..p {
            let (a, b) = (directed[i][j], directed[j][i]);
            let value = match (rule, a != 0.0, b != 0.0) {
                (_, true, true) => 0.5 * (a + b),
                (EdgeRule::Or, true, false) => a,
                (EdgeRule::Or, false, true) => b,
                _ => 0.0,
            };
            w[i][j] = value;
            w[j][i] = value;
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkEstimate {
    pub network: IsingNetwork,
    pub fits: Vec<NodewiseFit>,
}

/// Full nodewise estimation, keeping every node's path.
///
/// Nodes are fitted in parallel; the result does not depend on the number
/// of threads. If several nodes fail, the lowest-indexed failure is
/// reported.
pub fn estimate_network_detailed(
    dataset: &BinaryDataset,
    config: &EstimationConfig,
) -> Result<NetworkEstimate> {
    config.validate()?;
    dataset.check_estimable()?;
    let results: Vec<Result<NodewiseFit>> = (0..dataset.p())
        .into_par_iter()
        .map(|node| select_neighborhood(dataset, node, config))
        .collect();
    let fits = results.into_iter().collect::<Result<Vec<_>>>()?;

    let p = dataset.p();
    let directed: Vec<Vec<f64>> = fits
        .iter()
        .map(|f| (0..p).map(|j| f.coefficient_of(j)).collect())
        .collect();
    let weights = combine_coefficients(&directed, config.edge_rule);
    let thresholds = fits.iter().map(|f| f.selected_point().intercept).collect();
    let network = IsingNetwork::new(dataset.names().to_vec(), thresholds, weights)?;
    Ok(NetworkEstimate { network, fits })
}

pub fn estimate_network(dataset: &BinaryDataset, config: &EstimationConfig) -> Result<IsingNetwork> {
    estimate_network_detailed(dataset, config).map(|e| e.network)
}
