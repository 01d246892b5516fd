//! L1-penalized logistic regression by iteratively reweighted coordinate
//! descent.
//!
//! The objective maximized is
//!
//! ```text
//! Σ_i [y_i η_i − log(1 + e^{η_i})] − λ n Σ_j |β_j|,   η_i = β_0 + Σ_j β_j x_ij
//! ```
//!
//! with an unpenalized intercept. Scaling the penalty by `n` makes
//! `λ_max = max_j |Σ_i x_ij (y_i − ȳ)| / n` independent of sample size.
//! Predictors are used as given (no standardization).

use crate::error::{Error, Result};
use crate::estimation::network::logistic;

/// Floor on IRLS weights; the fixed point does not depend on it.
const MIN_WEIGHT: f64 = 1e-5;
/// Coefficients beyond this are treated as diverging (separation).
const DIVERGENCE_BOUND: f64 = 1e6;
const MAX_INNER_SWEEPS: usize = 1_000;
const MAX_BACKTRACK: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the largest change in any coefficient (intercept included)
    /// over an outer iteration falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-7,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub iterations: usize,
}

impl LogisticFit {
    /// Intercept-only model at the marginal log-odds.
    pub fn null(y: &[f64], n_predictors: usize) -> Self {
        let ybar = mean(y);
        LogisticFit {
            intercept: (ybar / (1.0 - ybar)).ln(),
            coefficients: vec![0.0; n_predictors],
            iterations: 0,
        }
    }

    pub fn active_count(&self) -> usize {
        self.coefficients.iter().filter(|&&b| b != 0.0).count()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_shapes(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    let n = y.len();
    if let Some(j) = x.iter().position(|c| c.len() != n) {
        return Err(Error::InvalidConfig(format!(
            "predictor {j} has {} rows, response has {n}",
            x[j].len()
        )));
    }
    Ok(n)
}

fn check_response(y: &[f64]) -> Result<()> {
    if y.len() < 2 {
        return Err(Error::InsufficientCases {
            group: None,
            n: y.len(),
            min: 2,
        });
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidConfig("response must be 0/1".into()));
    }
    if ones == 0 || ones == y.len() {
        return Err(Error::DegenerateResponse);
    }
    Ok(())
}

/// Smallest penalty at which every coefficient is zero.
pub fn lambda_max(x: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    let n = check_shapes(x, y)?;
    check_response(y)?;
    let ybar = mean(y);
    Ok(x.iter()
        .map(|col| {
            col.iter()
                .zip(y)
                .map(|(xi, yi)| xi * (yi - ybar))
                .sum::<f64>()
                .abs()
                / n as f64
        })
        .fold(0.0, f64::max))
}

/// `count` log-spaced penalties from `λ_max` down to `ratio · λ_max`.
pub fn lambda_path(x: &[Vec<f64>], y: &[f64], count: usize, ratio: f64) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidConfig(format!("path length {count} < 2")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!("path ratio {ratio} outside (0, 1)")));
    }
    let max = lambda_max(x, y)?;
    if max <= 0.0 {
        return Err(Error::ZeroLambdaMax);
    }
    let step = ratio.ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            if k == 0 {
                max
            } else if k == count - 1 {
                max * ratio
            } else {
                max * (step * k as f64).exp()
            }
        })
        .collect())
}

fn log1p_exp(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn linear_predictor(x: &[Vec<f64>], n: usize, intercept: f64, beta: &[f64]) -> Vec<f64> {
    let mut eta = vec![intercept; n];
    for (col, &b) in x.iter().zip(beta) {
        if b != 0.0 {
            for (e, &xi) in eta.iter_mut().zip(col) {
                *e += b * xi;
            }
        }
    }
    eta
}

/// Unpenalized log-likelihood Σ_i [y_i η_i − log(1 + e^{η_i})].
pub fn log_likelihood(x: &[Vec<f64>], y: &[f64], intercept: f64, beta: &[f64]) -> f64 {
    let eta = linear_predictor(x, y.len(), intercept, beta);
    eta.iter().zip(y).map(|(&e, &yi)| yi * e - log1p_exp(e)).sum()
}

/// Gradient of the log-likelihood in each coefficient, Σ_i x_ij (y_i − μ_i).
pub fn score(x: &[Vec<f64>], y: &[f64], intercept: f64, beta: &[f64]) -> Vec<f64> {
    let eta = linear_predictor(x, y.len(), intercept, beta);
    let resid: Vec<f64> = eta.iter().zip(y).map(|(&e, &yi)| yi - logistic(e)).collect();
    x.iter()
        .map(|col| col.iter().zip(&resid).map(|(a, b)| a * b).sum())
        .collect()
}

fn objective(eta: &[f64], y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let n = y.len() as f64;
    let nll: f64 = eta.iter().zip(y).map(|(&e, &yi)| log1p_exp(e) - yi * e).sum();
    nll / n + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Fits the penalized model at `lambda`, starting from `warm` when given.
///
/// Each outer iteration minimizes the penalized quadratic approximation of
/// the log-likelihood by cyclic coordinate descent, then backtracks along
/// the step until the true penalized objective does not increase.
pub fn fit_l1_logistic(
    x: &[Vec<f64>],
    y: &[f64],
    lambda: f64,
    warm: Option<&LogisticFit>,
    options: &SolverOptions,
) -> Result<LogisticFit> {
    let n = check_shapes(x, y)?;
    check_response(y)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("penalty {lambda} must be finite and >= 0")));
    }
    let m = x.len();
    // the null model satisfies the optimality conditions exactly here;
    // iterating would only leave rounding-level coefficients behind
    if lambda > 0.0 && lambda >= lambda_max(x, y)? {
        return Ok(LogisticFit::null(y, m));
    }
    let (mut b0, mut beta) = match warm {
        Some(w) if w.coefficients.len() == m => (w.intercept, w.coefficients.clone()),
        _ => {
            let null = LogisticFit::null(y, m);
            (null.intercept, null.coefficients)
        }
    };
    let nf = n as f64;
    let mut eta = linear_predictor(x, n, b0, &beta);
    let mut obj = objective(&eta, y, &beta, lambda);
    let inner_tol = options.tolerance * 0.1;

    let mut w = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut xw2 = vec![0.0; m];
    for iter in 1..=options.max_iterations {
        for i in 0..n {
            let mu = logistic(eta[i]);
            w[i] = (mu * (1.0 - mu)).max(MIN_WEIGHT);
            r[i] = (y[i] - mu) / w[i];
        }
        let sum_w: f64 = w.iter().sum();
        for (j, col) in x.iter().enumerate() {
            xw2[j] = col.iter().zip(&w).map(|(xi, wi)| wi * xi * xi).sum::<f64>() / nf;
        }

        // coordinate descent on the weighted least-squares surrogate
        let mut nb0 = b0;
        let mut nbeta = beta.clone();
        for _ in 0..MAX_INNER_SWEEPS {
            let mut max_delta: f64 = 0.0;
            let d0 = w.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() / sum_w;
            if d0 != 0.0 {
                nb0 += d0;
                r.iter_mut().for_each(|ri| *ri -= d0);
                max_delta = max_delta.max(d0.abs());
            }
            for (j, col) in x.iter().enumerate() {
                if xw2[j] == 0.0 {
                    nbeta[j] = 0.0;
                    continue;
                }
                let grad = col
                    .iter()
                    .zip(&w)
                    .zip(&r)
                    .map(|((xi, wi), ri)| xi * wi * ri)
                    .sum::<f64>()
                    / nf;
                let old = nbeta[j];
                let new = soft_threshold(grad + xw2[j] * old, lambda) / xw2[j];
                let delta = new - old;
                if delta != 0.0 {
                    nbeta[j] = new;
                    for (ri, xi) in r.iter_mut().zip(col) {
                        *ri -= delta * xi;
                    }
                    max_delta = max_delta.max(delta.abs());
                }
            }
            if max_delta < inner_tol {
                break;
            }
        }

        // backtrack on the true objective
        let mut t = 1.0;
        let mut cand_b0 = nb0;
        let mut cand_beta = nbeta.clone();
        let mut cand_eta = linear_predictor(x, n, cand_b0, &cand_beta);
        let mut cand_obj = objective(&cand_eta, y, &cand_beta, lambda);
        let slack = 1e-14 * obj.abs().max(1.0);
        let mut backtracks = 0;
        while cand_obj > obj + slack && backtracks < MAX_BACKTRACK {
            t *= 0.5;
            backtracks += 1;
            cand_b0 = b0 + t * (nb0 - b0);
            cand_beta = beta
                .iter()
                .zip(&nbeta)
                .map(|(&old, &new)| old + t * (new - old))
                .collect();
            cand_eta = linear_predictor(x, n, cand_b0, &cand_beta);
            cand_obj = objective(&cand_eta, y, &cand_beta, lambda);
        }

        let change = beta
            .iter()
            .zip(&cand_beta)
            .map(|(a, b)| (a - b).abs())
            .fold((b0 - cand_b0).abs(), f64::max);
        b0 = cand_b0;
        beta = cand_beta;
        eta = cand_eta;
        obj = cand_obj.min(obj);

        if !b0.is_finite() || beta.iter().any(|b| !b.is_finite() || b.abs() > DIVERGENCE_BOUND) {
            return Err(Error::NonConvergence {
                node: None,
                lambda,
                iterations: iter,
            });
        }
        if change < options.tolerance {
            return Ok(LogisticFit {
                intercept: b0,
                coefficients: beta,
                iterations: iter,
            });
        }
    }
    Err(Error::NonConvergence {
        node: None,
        lambda,
        iterations: options.max_iterations,
    })
}
