//! Thin wrappers over `statrs` for the reference distributions used by the
//! inferential layer.

use statrs::distribution::{Continuous, ContinuousCDF, FisherSnedecor, Normal, StudentsT};
use libm::erfc;

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Φ(a) − Φ(b) for a ≥ b, computed from whichever tail avoids cancellation.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if a + b > 0.0 {
        0.5 * (erfc(b / SQRT_2) - erfc(a / SQRT_2))
    } else {
        0.5 * (erfc(-a / SQRT_2) - erfc(-b / SQRT_2))
    }
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(Error::InsufficientData(format!("t test with {df} degrees of freedom")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).clamp(0.0, 1.0))
}

pub fn t_cdf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .cdf(t)
}

pub fn t_quantile(p: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .inverse_cdf(p)
}

/// Upper-tail probability of an F statistic.
pub fn f_sf(f: f64, df1: f64, df2: f64) -> Result<f64> {
    let dist = FisherSnedecor::new(df1, df2).map_err(|e| Error::Numerical(e.to_string()))?;
    if f.is_infinite() {
        return Ok(0.0);
    }
    Ok(dist.sf(f.max(0.0)).clamp(0.0, 1.0))
}

/// Density of the F distribution; used only by tests and diagnostics.
pub fn f_pdf(f: f64, df1: f64, df2: f64) -> f64 {
    FisherSnedecor::new(df1, df2).expect("positive degrees of freedom").pdf(f)
}
