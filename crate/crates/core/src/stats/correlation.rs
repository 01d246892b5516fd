use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::distributions::{normal_pdf, normal_quantile, t_two_sided};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_finite(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig(format!("{name} contains non-finite values")));
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidConfig(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "correlation needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance(format!(
            "{} has zero variance",
            if sxx == 0.0 { "x" } else { "y" }
        )));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biserial {
    pub r: f64,
    /// Proportion of 1s in the dichotomy.
    pub proportion: f64,
    pub n0: usize,
    pub n1: usize,
    /// Set when a class has fewer than five members or holds less than 5%
    /// of the cases; the normal-ordinate correction is then poorly
    /// determined.
    pub unstable: bool,
}

fn split_classes(y: &[f64], d: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if y.len() != d.len() {
        return Err(Error::InvalidConfig(format!(
            "length mismatch: {} vs {}",
            y.len(),
            d.len()
        )));
    }
    check_finite("y", y)?;
    let mut zeros = Vec::new();
    let mut ones = Vec::new();
    for (&yi, &di) in y.iter().zip(d) {
        match di {
            v if v == 0.0 => zeros.push(yi),
            v if v == 1.0 => ones.push(yi),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "dichotomous variable has value {other}"
                )))
            }
        }
    }
    if zeros.is_empty() || ones.is_empty() {
        return Err(Error::InsufficientData(
            "dichotomous variable needs both classes present".into(),
        ));
    }
    Ok((zeros, ones))
}

fn population_sd(y: &[f64]) -> Result<f64> {
    let m = mean(y);
    let sd = (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64).sqrt();
    if sd == 0.0 {
        return Err(Error::ZeroVariance("continuous variable is constant".into()));
    }
    Ok(sd)
}

/// Biserial correlation between a continuous `y` and the latent normal
/// variable assumed to underlie the 0/1 variable `d`:
/// `((ȳ₁ − ȳ₀)/s_y) · p·q / φ(z_p)`, `s_y` with divisor n.
///
/// The estimate is not bounded by ±1 in finite samples.
pub fn biserial(y: &[f64], d: &[f64]) -> Result<Biserial> {
    let (zeros, ones) = split_classes(y, d)?;
    let sd = population_sd(y)?;
    let n = y.len() as f64;
    let p = ones.len() as f64 / n;
    let q = 1.0 - p;
    let z = normal_quantile(q);
    let r = (mean(&ones) - mean(&zeros)) / sd * p * q / normal_pdf(z);
    let min_class = zeros.len().min(ones.len());
    Ok(Biserial {
        r,
        proportion: p,
        n0: zeros.len(),
        n1: ones.len(),
        unstable: min_class < 5 || p < 0.05 || p > 0.95,
    })
}

/// Point-biserial correlation `((ȳ₁ − ȳ₀)/s_y)·√(pq)`; equal to Pearson's r
/// with the 0/1 variable.
pub fn point_biserial(y: &[f64], d: &[f64]) -> Result<f64> {
    let (zeros, ones) = split_classes(y, d)?;
    let sd = population_sd(y)?;
    let p = ones.len() as f64 / y.len() as f64;
    Ok(((mean(&ones) - mean(&zeros)) / sd * (p * (1.0 - p)).sqrt()).clamp(-1.0, 1.0))
}

/// First-order partial correlation of `x` and `y` controlling for `z`.
pub fn partial_correlation(x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    if x.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "partial correlation needs at least 4 observations, got {}",
            x.len()
        )));
    }
    let rxy = pearson(x, y)?;
    let rxz = pearson(x, z)?;
    let ryz = pearson(y, z)?;
    let denom = (1.0 - rxz * rxz) * (1.0 - ryz * ryz);
    if denom <= 1e-14 {
        return Err(Error::Collinear(
            "control variable is perfectly correlated with an analysed variable".into(),
        ));
    }
    Ok(((rxy - rxz * ryz) / denom.sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided p-value for a (partial) correlation from `n` observations with
/// `controls` variables partialled out: `t = r √(df / (1 − r²))`,
/// `df = n − 2 − controls`.
pub fn correlation_p_value(r: f64, n: usize, controls: usize) -> Result<(f64, f64)> {
    let df = n as f64 - 2.0 - controls as f64;
    if df < 1.0 {
        return Err(Error::InsufficientData(format!(
            "{n} observations leave no residual degrees of freedom"
        )));
    }
    let t = if r.abs() >= 1.0 {
        f64::INFINITY.copysign(r)
    } else {
        r * (df / (1.0 - r * r)).sqrt()
    };
    Ok((t, t_two_sided(t, df)?))
}
