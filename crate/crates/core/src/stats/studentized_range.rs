//! Studentized range distribution by numerical double integration.
//!
//! For `k` means and `df` error degrees of freedom,
//!
//! ```text
//! P(Q ≤ q) = ∫_0^∞ f_df(s) · W_k(q·s) ds
//! W_k(w)   = k ∫ φ(z) [Φ(z) − Φ(z − w)]^{k−1} dz
//! ```
//!
//! where `W_k` is the distribution of the range of `k` standard normals and
//! `f_df` the density of `sqrt(χ²_df / df)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::stats::distributions::{normal_interval, normal_pdf};
use crate::stats::quadrature::integrate;

const INNER_TOL: f64 = 1e-11;
const OUTER_TOL: f64 = 1e-10;
/// Beyond this many degrees of freedom the scale factor is treated as 1.
const DF_INFINITE: f64 = 1e7;

/// CDF of the range of `k` independent standard normals.
pub fn range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let integrand = |z: f64| {
        let phi = normal_pdf(z);
        if phi == 0.0 {
            return 0.0;
        }
        phi * normal_interval(z, z - w).powi(km1)
    };
    // φ(z) < 1e-18 outside ±9; the bracket difference vanishes below z = -9
    let value = k as f64 * integrate(integrand, -9.0, 9.0 + w.min(9.0), INNER_TOL, 8);
    value.clamp(0.0, 1.0)
}

fn scale_log_density(s: f64, df: f64, log_norm: f64) -> f64 {
    log_norm + (df - 1.0) * s.ln() - 0.5 * df * s * s
}

/// `P(Q ≤ q)` for the studentized range with `k ≥ 2` groups and `df > 0`.
pub fn ptukey(q: f64, k: usize, df: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("studentized range needs k >= 2, got {k}")));
    }
    if !(df > 0.0) {
        return Err(Error::InvalidConfig(format!("degrees of freedom {df} must be positive")));
    }
    if q <= 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(1.0);
    }
    if df >= DF_INFINITE {
        return Ok(range_cdf(q, k));
    }
    let log_norm = 0.5 * df * df.ln() - ln_gamma(0.5 * df) - (0.5 * df - 1.0) * 2f64.ln();
    let (lo, hi) = if df >= 10.0 {
        let spread = 12.0 / (2.0 * df).sqrt();
        ((1.0 - spread).max(0.0), 1.0 + spread)
    } else {
        (0.0, 1.0 + 12.0 / df.sqrt())
    };
    let integrand = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let log_f = scale_log_density(s, df, log_norm);
        if log_f < -745.0 {
            return 0.0;
        }
        log_f.exp() * range_cdf(q * s, k)
    };
    Ok(integrate(integrand, lo, hi, OUTER_TOL, 12).clamp(0.0, 1.0))
}

/// Quantile: the `q` with `P(Q ≤ q) = prob`.
///
/// Results are memoised per `(prob, k, df)`; one analysis asks for the
/// same critical value many times.
pub fn qtukey(prob: f64, k: usize, df: f64) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize, u64), f64>>> = OnceLock::new();
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidConfig(format!("probability {prob} outside (0, 1)")));
    }
    let key = (prob.to_bits(), k, df.to_bits());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&q) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(q);
    }
    let q = solve_quantile(prob, k, df)?;
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, q);
    Ok(q)
}

// bracket by doubling, then Illinois-modified regula falsi
fn solve_quantile(prob: f64, k: usize, df: f64) -> Result<f64> {
    let g = |q: f64| ptukey(q, k, df).map(|p| p - prob);
    let (mut lo, mut hi) = (0.0, 4.0);
    let mut f_lo = -prob;
    let mut f_hi = g(hi)?;
    while f_hi < 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical("studentized range quantile did not bracket".into()));
        }
        f_hi = g(hi)?;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let f_mid = g(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if hi - lo < 1e-10 * hi || f_mid.abs() < 1e-13 {
            return Ok(mid);
        }
    }
    Err(Error::Numerical("studentized range quantile did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::distributions::t_cdf;

    #[test]
    fn two_groups_reduce_to_t() {
        // Q = √2 |T| when k = 2
        for &(q, df) in &[(1.0, 5.0), (2.5, 12.0), (4.0, 50.0), (0.3, 3.0)] {
            let expected = 2.0 * t_cdf(q / std::f64::consts::SQRT_2, df) - 1.0;
            let got = ptukey(q, 2, df).unwrap();
            assert!((got - expected).abs() < 1e-8, "q={q} df={df}: {got} vs {expected}");
        }
    }

    #[test]
    fn range_of_two_normals() {
        // range of two N(0,1) is √2·|N(0,1)|
        let w = 1.7;
        let expected = 2.0 * crate::stats::distributions::normal_cdf(w / std::f64::consts::SQRT_2) - 1.0;
        assert!((range_cdf(w, 2) - expected).abs() < 1e-10);
    }

    #[test]
    fn tabled_critical_values() {
        // upper 5% points of the studentized range
        let cases = [(3, 50.0, 3.416), (3, 10.0, 3.877), (4, 20.0, 3.958), (5, 30.0, 4.102), (3, 1e9, 3.314)];
        for (k, df, table) in cases {
            let q = qtukey(0.95, k, df).unwrap();
            assert!((q - table).abs() < 0.005, "k={k} df={df}: {q} vs {table}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(ptukey(1.0, 1, 10.0).is_err());
        assert!(ptukey(1.0, 3, 0.0).is_err());
        assert_eq!(ptukey(-1.0, 3, 10.0).unwrap(), 0.0);
        assert!(qtukey(1.0, 3, 10.0).is_err());
    }
}
