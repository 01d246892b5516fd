//! End-to-end group-level analysis driven by a cohort manifest.
//!
//! A manifest lists cohorts (one election year and candidate each). A cohort
//! supplies either one CSV plus a grouping spec, or one CSV per group. Every
//! group yields one estimated network, one ASPL value and the two strength
//! measures; the resulting record table feeds the strength analysis, and
//! the headline statistics are set against a table of reference values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::pipeline::{prepare_groups, split_by_group, ExclusionReport, GroupingSpec, PipelineConfig};
use crate::data::{load_csv, Schema, SurveyDataset};
use crate::error::{Error, Result};
use crate::estimation::{estimate_network, EstimationConfig, IsingNetwork};
use crate::metrics::NetworkMetrics;
use crate::stats::analysis::{strength_report, StrengthReport};
use crate::stats::correlation::{biserial, pearson, point_biserial};
use crate::stats::records::GroupRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortEntry {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub year: Option<u32>,
    #[serde(default)]
    pub candidate: Option<String>,
    pub schema: PathBuf,
    /// Single file split by `grouping`.
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub grouping: Option<PathBuf>,
    /// One file per group label.
    #[serde(default)]
    pub groups: Option<BTreeMap<String, PathBuf>>,
    pub attitude_pre: String,
    #[serde(default)]
    pub attitude_post: Option<String>,
    #[serde(default)]
    pub vote: Option<String>,
}

impl CohortEntry {
    pub fn cohort_id(&self) -> Result<String> {
        match (&self.id, self.year, &self.candidate) {
            (Some(id), _, _) => Ok(id.clone()),
            (None, Some(y), Some(c)) => Ok(format!("{y}-{c}")),
            _ => Err(Error::Schema("cohort needs an id or both year and candidate".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub cohorts: Vec<CohortEntry>,
    /// Group levels from lowest to highest interest.
    #[serde(default)]
    pub levels: Option<Vec<String>>,
    #[serde(default)]
    pub missing_threshold: Option<f64>,
    #[serde(default)]
    pub min_cases: Option<usize>,
    #[serde(default)]
    pub split_first: Option<bool>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(s).map_err(|e| {
            if e.is_data() {
                Error::Schema(format!("manifest: {e}"))
            } else {
                Error::from(e)
            }
        })?;
        m.validate()?;
        Ok(m)
    }

    /// Reads a manifest; relative paths inside it resolve against its
    /// directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::NotFound {
                    what: "manifest",
                    path: path.to_path_buf(),
                }
            } else {
                Error::io(path, e)
            }
        })?;
        let mut m = Self::from_json_str(&text)?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.cohorts.is_empty() {
            return Err(Error::Schema("manifest lists no cohorts".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.cohorts {
            let id = c.cohort_id()?;
            if !seen.insert(id.clone()) {
                return Err(Error::Schema(format!("cohort {id:?} listed twice")));
            }
            match (&c.data, &c.grouping, &c.groups) {
                (Some(_), Some(_), None) | (None, None, Some(_)) => {}
                _ => {
                    return Err(Error::Schema(format!(
                        "cohort {id:?}: give either data and grouping, or groups"
                    )))
                }
            }
        }
        if let Some(levels) = &self.levels {
            if levels.len() < 2 {
                return Err(Error::Schema("levels must list at least two groups".into()));
            }
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImpactMeasure {
    #[default]
    Biserial,
    PointBiserial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationConfig {
    pub estimation: EstimationConfig,
    pub pipeline: PipelineConfig,
    pub impact: ImpactMeasure,
    pub levels: Option<Vec<String>>,
}

impl Default for ReplicationConfig {
    fn default() -> Self {
        ReplicationConfig {
            estimation: EstimationConfig::default(),
            pipeline: PipelineConfig::default(),
            impact: ImpactMeasure::default(),
            levels: None,
        }
    }
}

impl ReplicationConfig {
    /// Fills settings the manifest declares; explicit values already set by
    /// the caller are passed in as `overrides` and win.
    pub fn from_manifest(manifest: &Manifest, mut base: ReplicationConfig, overrides: &ConfigOverrides) -> Self {
        if !overrides.missing_threshold {
            if let Some(t) = manifest.missing_threshold {
                base.pipeline.missing_threshold = t;
            }
        }
        if !overrides.min_cases {
            if let Some(m) = manifest.min_cases {
                base.pipeline.min_cases = m;
            }
        }
        if !overrides.split_first {
            if let Some(s) = manifest.split_first {
                base.pipeline.split_first = s;
            }
        }
        if !overrides.levels && manifest.levels.is_some() {
            base.levels = manifest.levels.clone();
        }
        base
    }
}

/// Which settings were given explicitly by the caller.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConfigOverrides {
    pub missing_threshold: bool,
    pub min_cases: bool,
    pub split_first: bool,
    pub levels: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupNetwork {
    pub cohort: String,
    pub group: String,
    pub network: IsingNetwork,
    pub metrics: NetworkMetrics,
    pub exclusions: ExclusionReport,
    /// Rows entering the stability and behavior-impact estimates.
    pub stability_n: usize,
    pub impact_n: usize,
    pub impact_unstable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub reference: f64,
    pub obtained: Option<f64>,
    /// Absent for rows shown for information only.
    pub tolerance: Option<f64>,
    pub within: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub networks: Vec<GroupNetwork>,
    pub records: Vec<GroupRecord>,
    pub analysis: StrengthReport,
    pub comparison: Vec<ComparisonRow>,
    pub notes: Vec<String>,
}

/// Reference values: (quantity, value, tolerance).
pub const REFERENCE_F: (f64, f64) = (17.59, 2.0);
pub const REFERENCE_DF: (usize, usize) = (2, 50);
pub const REFERENCE_ETA_SQ: f64 = 0.41;
/// Mean ASPL per level, lowest interest first.
pub const REFERENCE_MEANS: [f64; 3] = [2.44, 2.07, 1.80];
pub const MEAN_TOLERANCE: f64 = 0.10;
/// Cohen's d for level pairs (0,1), (0,2), (1,2).
pub const REFERENCE_D: [f64; 3] = [1.62, 2.78, 1.17];
pub const D_TOLERANCE: f64 = 0.15;
pub const REFERENCE_R_IMPACT: f64 = -0.71;
pub const REFERENCE_R_STABILITY: f64 = -0.66;
pub const R_TOLERANCE: f64 = 0.05;

fn column_values(ds: &SurveyDataset, name: &str) -> Result<Vec<Option<f64>>> {
    ds.column(name)
        .map(|c| c.values.clone())
        .ok_or_else(|| Error::Schema(format!("column {name:?} not found")))
}

fn paired(a: &[Option<f64>], b: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip()
}

struct Strength {
    stability: Option<f64>,
    stability_n: usize,
    impact: Option<f64>,
    impact_n: usize,
    impact_unstable: bool,
}

fn strength_measures(ds: &SurveyDataset, entry: &CohortEntry, impact: ImpactMeasure) -> Result<Strength> {
    let pre = column_values(ds, &entry.attitude_pre)?;
    let mut out = Strength {
        stability: None,
        stability_n: 0,
        impact: None,
        impact_n: 0,
        impact_unstable: false,
    };
    if let Some(post) = &entry.attitude_post {
        let (x, y) = paired(&pre, &column_values(ds, post)?);
        out.stability_n = x.len();
        out.stability = Some(pearson(&x, &y)?);
    }
    if let Some(vote) = &entry.vote {
        let (y, d) = paired(&pre, &column_values(ds, vote)?);
        out.impact_n = y.len();
        out.impact = Some(match impact {
            ImpactMeasure::Biserial => {
                let b = biserial(&y, &d)?;
                out.impact_unstable = b.unstable;
                b.r
            }
            ImpactMeasure::PointBiserial => point_biserial(&y, &d)?,
        });
    }
    Ok(out)
}

fn load_schema(path: &Path) -> Result<Schema> {
    Schema::from_path(path)
}

/// Raw per-group datasets of one cohort, sorted by label.
fn cohort_groups(manifest: &Manifest, entry: &CohortEntry, schema: &Schema) -> Result<Vec<(String, SurveyDataset, Option<GroupingSpec>)>> {
    if let Some(files) = &entry.groups {
        return files
            .iter()
            .map(|(label, file)| Ok((label.clone(), load_csv(&manifest.resolve(file), schema)?, None)))
            .collect();
    }
    let (Some(data), Some(grouping)) = (&entry.data, &entry.grouping) else {
        unreachable!("validated manifest")
    };
    let ds = load_csv(&manifest.resolve(data), schema)?;
    let spec = GroupingSpec::from_path(&manifest.resolve(grouping))?;
    Ok(vec![(String::new(), ds, Some(spec))])
}

fn run_cohort(manifest: &Manifest, entry: &CohortEntry, config: &ReplicationConfig) -> Result<Vec<(GroupNetwork, GroupRecord)>> {
    let cohort = entry.cohort_id()?;
    let schema = load_schema(&manifest.resolve(&entry.schema))?;
    let mut prepared = Vec::new();
    for (label, ds, spec) in cohort_groups(manifest, entry, &schema)? {
        match spec {
            None => {
                let pipeline = PipelineConfig {
                    grouping: None,
                    ..config.pipeline.clone()
                };
                let mut g = prepare_groups(&ds, &pipeline).map_err(|e| e.in_group(&label))?;
                let g = g.remove(0);
                prepared.push((label, g.data, g.report, ds));
            }
            Some(spec) => {
                let pipeline = PipelineConfig {
                    grouping: Some(spec.clone()),
                    ..config.pipeline.clone()
                };
                let groups = prepare_groups(&ds, &pipeline)?;
                let mut raw = split_by_group(&ds, &spec)?.groups;
                for g in groups {
                    let raw_group = raw.remove(&g.label).expect("pipeline labels come from the spec");
                    prepared.push((g.label, g.data, g.report, raw_group));
                }
            }
        }
    }
    prepared
        .into_iter()
        .map(|(group, data, exclusions, raw)| {
            let tag = format!("{cohort}/{group}");
            let network = estimate_network(&data, &config.estimation).map_err(|e| e.in_group(&tag))?;
            let (metrics, _) = NetworkMetrics::compute(&network).map_err(|e| e.in_group(&tag))?;
            let s = strength_measures(&raw, entry, config.impact).map_err(|e| e.in_group(&tag))?;
            let record = GroupRecord {
                cohort: cohort.clone(),
                group: group.clone(),
                aspl: metrics.aspl,
                n_nodes: metrics.n_nodes,
                stability: s.stability,
                behavior_impact: s.impact,
            };
            Ok((
                GroupNetwork {
                    cohort: cohort.clone(),
                    group,
                    network,
                    metrics,
                    exclusions,
                    stability_n: s.stability_n,
                    impact_n: s.impact_n,
                    impact_unstable: s.impact_unstable,
                },
                record,
            ))
        })
        .collect()
}

fn row(quantity: impl Into<String>, reference: f64, obtained: Option<f64>, tolerance: Option<f64>) -> ComparisonRow {
    let within = match (obtained, tolerance) {
        (Some(o), Some(t)) => Some((o - reference).abs() <= t),
        (None, Some(_)) => Some(false),
        _ => None,
    };
    ComparisonRow {
        quantity: quantity.into(),
        reference,
        obtained,
        tolerance,
        within,
    }
}

/// Rows comparing an analysis to the reference values. Level-specific rows
/// need exactly three levels, taken as lowest to highest interest.
pub fn comparison_table(analysis: &StrengthReport) -> Vec<ComparisonRow> {
    let a = &analysis.ancova;
    let mut rows = vec![
        row("F (group factor)", REFERENCE_F.0, Some(a.f), Some(REFERENCE_F.1)),
        row("numerator df", REFERENCE_DF.0 as f64, Some(a.df.0 as f64), None),
        row("denominator df", REFERENCE_DF.1 as f64, Some(a.df.1 as f64), None),
        row("partial eta squared", REFERENCE_ETA_SQ, Some(a.partial_eta_sq), None),
    ];
    if analysis.levels.len() == 3 {
        for (g, reference) in a.groups.iter().zip(REFERENCE_MEANS) {
            rows.push(row(format!("mean ASPL, {}", g.level), reference, Some(g.mean), Some(MEAN_TOLERANCE)));
        }
        for (c, reference) in a.contrasts.iter().zip(REFERENCE_D) {
            rows.push(row(
                format!("Cohen's d, {} vs {}", c.first, c.second),
                reference,
                Some(c.cohens_d),
                Some(D_TOLERANCE),
            ));
        }
    }
    let cs = &analysis.connectivity_strength;
    rows.push(row(
        "partial r, ASPL and behavior impact",
        REFERENCE_R_IMPACT,
        cs.behavior_impact.as_ref().map(|c| c.r),
        Some(R_TOLERANCE),
    ));
    rows.push(row(
        "partial r, ASPL and stability",
        REFERENCE_R_STABILITY,
        cs.stability.as_ref().map(|c| c.r),
        Some(R_TOLERANCE),
    ));
    rows
}

pub fn replicate(manifest: &Manifest, config: &ReplicationConfig) -> Result<ReplicationReport> {
    config.estimation.validate()?;
    let mut entries: Vec<&CohortEntry> = manifest.cohorts.iter().collect();
    entries.sort_by_key(|e| e.cohort_id().unwrap_or_default());
    let mut networks = Vec::new();
    let mut records = Vec::new();
    for entry in entries {
        for (n, r) in run_cohort(manifest, entry, config)? {
            networks.push(n);
            records.push(r);
        }
    }
    let levels = match &config.levels {
        Some(l) => l.clone(),
        None => {
            let mut l: Vec<String> = records.iter().map(|r| r.group.clone()).collect();
            l.sort();
            l.dedup();
            l
        }
    };
    let analysis = strength_report(&records, Some(&levels))?;
    let comparison = comparison_table(&analysis);
    let mut notes = vec![
        "group means are unadjusted; pairwise contrasts and Cohen's d use covariate-adjusted means".to_string(),
    ];
    if config.levels.is_none() {
        notes.push("levels not declared; sorted labels used, so level-specific rows assume that order".into());
    }
    if config.impact == ImpactMeasure::PointBiserial {
        notes.push("behavior impact computed as point-biserial correlation".into());
    }
    let unstable: Vec<String> = networks
        .iter()
        .filter(|n| n.impact_unstable)
        .map(|n| format!("{}/{}", n.cohort, n.group))
        .collect();
    if !unstable.is_empty() {
        notes.push(format!("biserial estimate flagged unstable for {}", unstable.join(", ")));
    }
    Ok(ReplicationReport {
        networks,
        records,
        analysis,
        comparison,
        notes,
    })
}
