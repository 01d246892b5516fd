//! Group-level strength analysis over a table of [`GroupRecord`]s.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::standardize;
use crate::stats::ancova::{ancova, AncovaResult};
use crate::stats::correlation::{correlation_p_value, partial_correlation, pearson};
use crate::stats::records::GroupRecord;

/// `p < .001` below one in a thousand, otherwise four decimals.
pub fn format_p(p: f64) -> String {
    if p < 0.001 {
        "p < .001".to_string()
    } else {
        format!("p = {p:.4}")
    }
}

/// Residuals of the least-squares regression of `x` on `z` with intercept.
pub fn residualize(x: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    let n = x.len() as f64;
    let (mx, mz) = (x.iter().sum::<f64>() / n, z.iter().sum::<f64>() / n);
    let szz: f64 = z.iter().map(|v| (v - mz).powi(2)).sum();
    if szz == 0.0 {
        return Err(Error::ZeroVariance("control variable is constant".into()));
    }
    let sxz: f64 = x.iter().zip(z).map(|(a, b)| (a - mx) * (b - mz)).sum();
    let slope = sxz / szz;
    Ok(x.iter().zip(z).map(|(a, b)| (a - mx) - slope * (b - mz)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthMeasure {
    BehaviorImpact,
    Stability,
}

impl StrengthMeasure {
    pub fn name(self) -> &'static str {
        match self {
            StrengthMeasure::BehaviorImpact => "behavior_impact",
            StrengthMeasure::Stability => "stability",
        }
    }

    fn get(self, r: &GroupRecord) -> Option<f64> {
        match self {
            StrengthMeasure::BehaviorImpact => r.behavior_impact,
            StrengthMeasure::Stability => r.stability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub cohort: String,
    pub group: String,
    pub aspl_residual: f64,
    pub strength_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthCorrelation {
    pub measure: StrengthMeasure,
    pub n: usize,
    pub r: f64,
    pub t: f64,
    pub df: usize,
    pub p: f64,
    /// False when the node count did not vary and a zero-order correlation
    /// was reported instead.
    pub size_controlled: bool,
    pub scatter: Vec<ScatterPoint>,
}

/// Correlation of ASPL with one strength measure, with `n_nodes`
/// partialled out. Records lacking the measure are skipped.
pub fn strength_correlation(records: &[GroupRecord], measure: StrengthMeasure) -> Result<StrengthCorrelation> {
    let rows: Vec<&GroupRecord> = records.iter().filter(|r| measure.get(r).is_some()).collect();
    let n = rows.len();
    if n < 4 {
        return Err(Error::InsufficientData(format!(
            "{} available for {n} records, at least 4 needed",
            measure.name()
        )));
    }
    let x: Vec<f64> = rows.iter().map(|r| r.aspl).collect();
    let y: Vec<f64> = rows.iter().map(|r| measure.get(r).unwrap_or(f64::NAN)).collect();
    let z: Vec<f64> = rows.iter().map(|r| r.n_nodes as f64).collect();
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::ZeroVariance(format!("{} is constant", measure.name())));
    }
    let size_controlled = z.iter().any(|&v| v != z[0]);
    let (r, controls, xs, ys) = if size_controlled {
        let r = partial_correlation(&x, &y, &z)?;
        (r, 1, residualize(&x, &z)?, residualize(&y, &z)?)
    } else {
        let r = pearson(&x, &y)?;
        let center = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|a| a - m).collect::<Vec<_>>()
        };
        (r, 0, center(&x), center(&y))
    };
    let (t, p) = correlation_p_value(r, n, controls)?;
    let scatter = rows
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(rec, (&a, &b))| ScatterPoint {
            cohort: rec.cohort.clone(),
            group: rec.group.clone(),
            aspl_residual: a,
            strength_residual: b,
        })
        .collect();
    Ok(StrengthCorrelation {
        measure,
        n,
        r,
        t,
        df: n - 2 - controls,
        p,
        size_controlled,
        scatter,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityStrength {
    pub behavior_impact: Option<StrengthCorrelation>,
    pub stability: Option<StrengthCorrelation>,
}

/// Both strength correlations; a measure absent from every record is
/// reported as `None`, but at least one must be present.
pub fn connectivity_strength_analysis(records: &[GroupRecord]) -> Result<ConnectivityStrength> {
    let run = |m: StrengthMeasure| -> Result<Option<StrengthCorrelation>> {
        if records.iter().all(|r| m.get(r).is_none()) {
            Ok(None)
        } else {
            strength_correlation(records, m).map(Some)
        }
    };
    let out = ConnectivityStrength {
        behavior_impact: run(StrengthMeasure::BehaviorImpact)?,
        stability: run(StrengthMeasure::Stability)?,
    };
    if out.behavior_impact.is_none() && out.stability.is_none() {
        return Err(Error::InsufficientData("no strength measure present in the records".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedAspl {
    pub cohort: String,
    pub group: String,
    pub aspl: f64,
    /// z-score within the cohort; absent for single-group cohorts.
    pub z: Option<f64>,
}

/// Within-cohort z-scores of ASPL, cohorts in sorted order and groups in
/// record order.
pub fn standardized_aspl(records: &[GroupRecord]) -> Vec<StandardizedAspl> {
    let mut cohorts: BTreeMap<&str, Vec<&GroupRecord>> = BTreeMap::new();
    for r in records {
        cohorts.entry(&r.cohort).or_default().push(r);
    }
    let mut out = Vec::with_capacity(records.len());
    for rows in cohorts.values() {
        let values: Vec<f64> = rows.iter().map(|r| r.aspl).collect();
        let z = standardize(&values).ok();
        for (i, r) in rows.iter().enumerate() {
            out.push(StandardizedAspl {
                cohort: r.cohort.clone(),
                group: r.group.clone(),
                aspl: r.aspl,
                z: z.as_ref().map(|z| z[i]),
            });
        }
    }
    out
}

/// Group levels in order of first appearance.
pub fn levels_in_order(records: &[GroupRecord]) -> Vec<String> {
    let mut levels: Vec<String> = Vec::new();
    for r in records {
        if !levels.contains(&r.group) {
            levels.push(r.group.clone());
        }
    }
    levels
}

/// ANCOVA of ASPL on group with node count as covariate.
pub fn group_ancova(records: &[GroupRecord], levels: &[String]) -> Result<AncovaResult> {
    let mut groups = Vec::with_capacity(records.len());
    for r in records {
        let Some(g) = levels.iter().position(|l| *l == r.group) else {
            return Err(Error::InvalidConfig(format!(
                "group {:?} is not among the declared levels {levels:?}",
                r.group
            )));
        };
        groups.push(g);
    }
    let y: Vec<f64> = records.iter().map(|r| r.aspl).collect();
    let cov: Vec<f64> = records.iter().map(|r| r.n_nodes as f64).collect();
    ancova(&y, &groups, &cov, levels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthReport {
    pub n_records: usize,
    pub levels: Vec<String>,
    pub ancova: AncovaResult,
    pub connectivity_strength: ConnectivityStrength,
    pub standardized_aspl: Vec<StandardizedAspl>,
    pub notes: Vec<String>,
}

/// Full analysis. `levels` fixes the factor order; by default levels
/// appear in record order.
pub fn strength_report(records: &[GroupRecord], levels: Option<&[String]>) -> Result<StrengthReport> {
    let levels = levels.map_or_else(|| levels_in_order(records), <[String]>::to_vec);
    let ancova = group_ancova(records, &levels)?;
    let connectivity_strength = connectivity_strength_analysis(records)?;
    let mut notes = vec!["pairwise contrasts compare covariate-adjusted means".to_string()];
    for c in [&connectivity_strength.behavior_impact, &connectivity_strength.stability]
        .into_iter()
        .flatten()
    {
        if !c.size_controlled {
            notes.push(format!(
                "n_nodes is constant among records with {}; zero-order correlation reported",
                c.measure.name()
            ));
        }
    }
    Ok(StrengthReport {
        n_records: records.len(),
        levels,
        ancova,
        connectivity_strength,
        standardized_aspl: standardized_aspl(records),
        notes,
    })
}

pub fn scatter_csv(points: &[ScatterPoint]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for p in points {
        wtr.serialize(p)?;
    }
    into_string(wtr)
}

pub fn standardized_csv(rows: &[StandardizedAspl]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["cohort", "group", "aspl", "z"])?;
    for r in rows {
        let z = r.z.map(|z| format!("{z:?}")).unwrap_or_default();
        wtr.write_record([r.cohort.as_str(), r.group.as_str(), &format!("{:?}", r.aspl), &z])?;
    }
    into_string(wtr)
}

fn into_string(wtr: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::io("<csv writer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
