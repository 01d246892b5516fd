/// Extended BIC: `−2·logL + s·ln(n) + 2·γ·s·ln(p_cand)`.
///
/// `log_likelihood` is the unpenalized log-likelihood at the penalized
/// estimates, `active` the number of nonzero coefficients and `candidates`
/// the number of candidate predictors.
pub fn ebic(log_likelihood: f64, active: usize, n: usize, candidates: usize, gamma: f64) -> f64 {
    let s = active as f64;
    let mut value = -2.0 * log_likelihood;
    if active > 0 {
        value += s * (n as f64).ln();
        if gamma != 0.0 {
            value += 2.0 * gamma * s * (candidates as f64).ln();
        }
    }
    value
}
