//! One-factor ANCOVA with a single covariate, and Tukey-adjusted pairwise
//! comparisons of the covariate-adjusted group means.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::distributions::f_sf;
use crate::stats::studentized_range::{ptukey, qtukey};

const RANK_TOL: f64 = 1e-10;

struct LeastSquares {
    coefficients: DVector<f64>,
    sse: f64,
    /// (X'X)^{-1}
    unscaled_cov: DMatrix<f64>,
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<LeastSquares> {
    let svd = x.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    if s.iter().any(|&v| v <= RANK_TOL * smax) {
        return None;
    }
    let u = svd.u.as_ref()?;
    let vt = svd.v_t.as_ref()?;
    let uty = u.transpose() * y;
    let scaled = DVector::from_iterator(s.len(), uty.iter().zip(s.iter()).map(|(a, b)| a / b));
    let coefficients = vt.transpose() * scaled;
    let resid = y - x * &coefficients;
    let inv_s2 = DMatrix::from_diagonal(&s.map(|v| 1.0 / (v * v)));
    let unscaled_cov = vt.transpose() * inv_s2 * vt;
    Some(LeastSquares {
        coefficients,
        sse: resid.norm_squared(),
        unscaled_cov,
    })
}

/// Fitted model `y ~ 1 + group + covariate` with treatment coding (first
/// level is the baseline).
#[derive(Debug, Clone)]
pub struct AncovaFit {
    pub levels: Vec<String>,
    pub counts: Vec<usize>,
    pub raw_means: Vec<f64>,
    pub adjusted_means: Vec<f64>,
    pub covariate_coefficient: f64,
    pub covariate_mean: f64,
    pub ss_factor: f64,
    pub ss_residual: f64,
    pub df_factor: usize,
    pub df_residual: usize,
    /// (X'X)^{-1} of the full model.
    unscaled_cov: DMatrix<f64>,
}

impl AncovaFit {
    pub fn mse(&self) -> f64 {
        self.ss_residual / self.df_residual as f64
    }

    /// Standard error of `adjusted_means[a] − adjusted_means[b]`.
    ///
    /// The covariate term cancels in the difference, so the variance is
    /// `MSE · cᵀ(XᵀX)⁻¹c` with `c` picking the two group dummies.
    pub fn difference_se(&self, a: usize, b: usize) -> f64 {
        let m = self.unscaled_cov.nrows();
        let mut c = DVector::zeros(m);
        if a > 0 {
            c[a] += 1.0;
        }
        if b > 0 {
            c[b] -= 1.0;
        }
        let var = (c.transpose() * &self.unscaled_cov * &c)[(0, 0)];
        (self.mse() * var).sqrt()
    }
}

/// Fits the model. `groups[i]` indexes `levels`.
pub fn fit_ancova(y: &[f64], groups: &[usize], covariate: &[f64], levels: &[String]) -> Result<AncovaFit> {
    let n = y.len();
    let k = levels.len();
    if groups.len() != n || covariate.len() != n {
        return Err(Error::InvalidConfig("ANCOVA inputs differ in length".into()));
    }
    if k < 2 {
        return Err(Error::InsufficientData("ANCOVA needs at least two group levels".into()));
    }
    if n < k + 2 {
        return Err(Error::InsufficientData(format!(
            "{n} records for {k} groups plus a covariate; at least {} needed",
            k + 2
        )));
    }
    if y.iter().chain(covariate).any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("ANCOVA inputs contain non-finite values".into()));
    }
    if let Some(&g) = groups.iter().find(|&&g| g >= k) {
        return Err(Error::InvalidConfig(format!("group index {g} out of range")));
    }
    let counts: Vec<usize> = (0..k).map(|g| groups.iter().filter(|&&v| v == g).count()).collect();
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::Collinear(format!("group level {:?} has no records", levels[empty])));
    }
    let cmean = covariate.iter().sum::<f64>() / n as f64;
    if covariate.iter().all(|&c| c == covariate[0]) {
        return Err(Error::Collinear("covariate is constant (collinear with the intercept)".into()));
    }

    let full = DMatrix::from_fn(n, k + 1, |i, j| match j {
        0 => 1.0,
        j if j < k => f64::from(u8::from(groups[i] == j)),
        _ => covariate[i],
    });
    let reduced = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { covariate[i] });
    let yv = DVector::from_column_slice(y);
    let fit = least_squares(&full, &yv).ok_or_else(|| {
        Error::Collinear("covariate is collinear with the group factor".into())
    })?;
    let base = least_squares(&reduced, &yv)
        .ok_or_else(|| Error::Collinear("covariate is collinear with the intercept".into()))?;

    let b = &fit.coefficients;
    let slope = b[k];
    let adjusted_means = (0..k)
        .map(|g| b[0] + if g > 0 { b[g] } else { 0.0 } + slope * cmean)
        .collect();
    let raw_means = (0..k)
        .map(|g| {
            groups
                .iter()
                .zip(y)
                .filter(|(&gi, _)| gi == g)
                .map(|(_, v)| v)
                .sum::<f64>()
                / counts[g] as f64
        })
        .collect();
    Ok(AncovaFit {
        levels: levels.to_vec(),
        counts,
        raw_means,
        adjusted_means,
        covariate_coefficient: slope,
        covariate_mean: cmean,
        ss_factor: (base.sse - fit.sse).max(0.0),
        ss_residual: fit.sse,
        df_factor: k - 1,
        df_residual: n - k - 1,
        unscaled_cov: fit.unscaled_cov,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeyContrast {
    pub first: String,
    pub second: String,
    /// Adjusted mean of `first` minus adjusted mean of `second`.
    pub difference: f64,
    pub standard_error: f64,
    pub t: f64,
    pub p_adjusted: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub cohens_d: f64,
}

/// All pairwise comparisons of adjusted means, in level order.
///
/// `p` comes from the studentized range with `(k, df_residual)` evaluated at
/// `|t|·√2`; intervals are simultaneous at `confidence`. Cohen's d divides
/// the adjusted difference by the root residual mean square.
pub fn tukey_contrasts(fit: &AncovaFit, confidence: f64) -> Result<Vec<TukeyContrast>> {
    let k = fit.levels.len();
    let df = fit.df_residual as f64;
    let mse = fit.mse();
    if !(mse > 0.0) {
        return Err(Error::ZeroVariance("residual variance is zero".into()));
    }
    let q_crit = qtukey(confidence, k, df)?;
    let half_width = q_crit / std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in (a + 1)..k {
            let difference = fit.adjusted_means[a] - fit.adjusted_means[b];
            let se = fit.difference_se(a, b);
            let t = difference / se;
            let p = 1.0 - ptukey(t.abs() * std::f64::consts::SQRT_2, k, df)?;
            out.push(TukeyContrast {
                first: fit.levels[a].clone(),
                second: fit.levels[b].clone(),
                difference,
                standard_error: se,
                t,
                p_adjusted: p.clamp(0.0, 1.0),
                ci_lower: difference - half_width * se,
                ci_upper: difference + half_width * se,
                cohens_d: difference / mse.sqrt(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub level: String,
    pub n: usize,
    pub mean: f64,
    pub adjusted_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AncovaResult {
    pub f: f64,
    pub df: (usize, usize),
    pub p: f64,
    pub partial_eta_sq: f64,
    pub ss_factor: f64,
    pub ss_residual: f64,
    pub mse: f64,
    pub covariate_coefficient: f64,
    pub groups: Vec<GroupSummary>,
    pub contrasts: Vec<TukeyContrast>,
}

/// Group-factor test from the comparison of the full model against the
/// covariate-only model, plus 95% Tukey contrasts.
pub fn ancova(y: &[f64], groups: &[usize], covariate: &[f64], levels: &[String]) -> Result<AncovaResult> {
    let fit = fit_ancova(y, groups, covariate, levels)?;
    let mse = fit.mse();
    if !(mse > 0.0) {
        return Err(Error::ZeroVariance("residual variance is zero".into()));
    }
    let f = (fit.ss_factor / fit.df_factor as f64) / mse;
    let p = f_sf(f, fit.df_factor as f64, fit.df_residual as f64)?;
    let contrasts = tukey_contrasts(&fit, 0.95)?;
    let groups = (0..levels.len())
        .map(|g| GroupSummary {
            level: fit.levels[g].clone(),
            n: fit.counts[g],
            mean: fit.raw_means[g],
            adjusted_mean: fit.adjusted_means[g],
        })
        .collect();
    Ok(AncovaResult {
        f,
        df: (fit.df_factor, fit.df_residual),
        p,
        partial_eta_sq: fit.ss_factor / (fit.ss_factor + fit.ss_residual),
        ss_factor: fit.ss_factor,
        ss_residual: fit.ss_residual,
        mse,
        covariate_coefficient: fit.covariate_coefficient,
        groups,
        contrasts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("g{i}")).collect()
    }

    #[test]
    fn residual_df_for_54_records() {
        let n = 54;
        let groups: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let cov: Vec<f64> = (0..n).map(|i| 8.0 + ((i * 7) % 5) as f64).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 2.0 + 0.3 * groups[i] as f64 + 0.01 * cov[i] + ((i * 13) % 7) as f64 * 0.05)
            .collect();
        let r = ancova(&y, &groups, &cov, &levels(3)).unwrap();
        assert_eq!(r.df, (2, 50));
        assert!(r.f >= 0.0 && (0.0..=1.0).contains(&r.p));
        assert!((0.0..=1.0).contains(&r.partial_eta_sq));
        assert_eq!(r.contrasts.len(), 3);
    }

    #[test]
    fn identical_groups() {
        // the same values in both groups, covariate identical too
        let y = [1.0, 2.0, 4.0, 1.0, 2.0, 4.0];
        let cov = [3.0, 5.0, 4.0, 3.0, 5.0, 4.0];
        let groups = [0, 0, 0, 1, 1, 1];
        let r = ancova(&y, &groups, &cov, &levels(2)).unwrap();
        assert!(r.f.abs() < 1e-10);
        let c = &r.contrasts[0];
        assert!(c.difference.abs() < 1e-12);
        assert!((c.p_adjusted - 1.0).abs() < 1e-6);
        assert!(c.ci_lower < 0.0 && c.ci_upper > 0.0);
    }

    #[test]
    fn rank_deficiency_named() {
        let y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let groups = [0, 0, 0, 1, 1, 1];
        // covariate constant within groups: collinear with the dummies
        let cov = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        let err = ancova(&y, &groups, &cov, &levels(2)).unwrap_err();
        assert!(matches!(err, Error::Collinear(ref m) if m.contains("group factor")), "{err}");
        let err = ancova(&y, &groups, &[2.0; 6], &levels(2)).unwrap_err();
        assert!(matches!(err, Error::Collinear(ref m) if m.contains("constant")));
        let err = ancova(&y, &[0, 0, 0, 0, 0, 0], &[1.0, 2.0, 3.0, 1.0, 2.0, 4.0], &levels(2)).unwrap_err();
        assert!(matches!(err, Error::Collinear(ref m) if m.contains("no records")));
        assert!(ancova(&y[..3], &groups[..3], &cov[..3], &levels(2)).is_err());
    }
}
