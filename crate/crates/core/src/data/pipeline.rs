//! Survey cleaning: dichotomization, variable exclusion, casewise deletion
//! and interest-group splitting.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::binary::BinaryDataset;
use crate::data::schema::ColumnKind;
use crate::data::survey::{Column, SurveyDataset};
use crate::error::{Error, Result};

pub const DEFAULT_MISSING_THRESHOLD: f64 = 0.10;
pub const DEFAULT_MIN_CASES: usize = 50;

/// Maps ordinal responses onto {0,1}.
///
/// 4-point items split {1,2} against {3,4}; 5-point items split {1,2,3}
/// against {4,5}. Binary and non-ordinal columns pass through unchanged.
pub fn dichotomize(dataset: SurveyDataset) -> SurveyDataset {
    dataset.map_columns(|col| {
        let cut = match col.kind {
            ColumnKind::Ordinal4 => 3.0,
            ColumnKind::Ordinal5 => 4.0,
            _ => return col,
        };
        Column {
            name: col.name,
            kind: ColumnKind::Binary,
            values: col
                .values
                .into_iter()
                .map(|v| v.map(|x| if x >= cut { 1.0 } else { 0.0 }))
                .collect(),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedVariable {
    pub name: String,
    pub missing_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExclusionReport {
    pub dropped: Vec<DroppedVariable>,
    pub rows_removed: usize,
    pub rows_kept: usize,
}

/// Drops every column whose missing fraction strictly exceeds `threshold`.
pub fn filter_missing_variables(
    dataset: &SurveyDataset,
    threshold: f64,
) -> Result<(SurveyDataset, ExclusionReport)> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidConfig(format!(
            "missing-value threshold {threshold} outside [0, 1]"
        )));
    }
    let dropped: Vec<DroppedVariable> = dataset
        .columns()
        .iter()
        .filter(|c| c.missing_fraction() > threshold)
        .map(|c| DroppedVariable {
            name: c.name.clone(),
            missing_fraction: c.missing_fraction(),
        })
        .collect();
    if dropped.len() == dataset.n_cols() {
        return Err(Error::NoVariablesRemain);
    }
    let names: Vec<&str> = dropped.iter().map(|d| d.name.as_str()).collect();
    let kept = dataset.drop_columns(&names);
    let report = ExclusionReport {
        dropped,
        rows_removed: 0,
        rows_kept: dataset.n_rows(),
    };
    Ok((kept, report))
}

/// Removes every row with a missing cell and converts to a [`BinaryDataset`].
///
/// Returns the dataset and the number of rows removed. Fails when fewer than
/// `min_cases` rows remain or when a column ends up constant.
pub fn casewise_delete(dataset: &SurveyDataset, min_cases: usize) -> Result<(BinaryDataset, usize)> {
    if let Some(col) = dataset.columns().iter().find(|c| c.kind != ColumnKind::Binary) {
        return Err(Error::NotBinary {
            column: col.name.clone(),
            kind: col.kind.to_string(),
        });
    }
    let rows = dataset.complete_rows();
    let removed = dataset.n_rows() - rows.len();
    if rows.len() < min_cases.max(2) {
        return Err(Error::InsufficientCases {
            group: None,
            n: rows.len(),
            min: min_cases.max(2),
        });
    }
    let names = dataset.names().into_iter().map(String::from).collect();
    let columns = dataset
        .columns()
        .iter()
        .map(|c| {
            rows.iter()
                .map(|&r| c.values[r].map_or(0, |v| v as u8))
                .collect()
        })
        .collect();
    let data = BinaryDataset::new(names, columns)?;
    data.check_estimable()?;
    Ok((data, removed))
}

/// Assignment of group-variable responses to group labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingSpec {
    #[serde(alias = "group_variable")]
    pub variable: String,
    pub mapping: BTreeMap<String, String>,
}

impl GroupingSpec {
    pub fn new(variable: impl Into<String>, mapping: impl IntoIterator<Item = (f64, String)>) -> Result<Self> {
        let spec = GroupingSpec {
            variable: variable.into(),
            mapping: mapping
                .into_iter()
                .map(|(k, v)| (format_code(k), v))
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        for key in self.mapping.keys() {
            if key.trim().parse::<f64>().map_or(true, |v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "grouping key {key:?} is not a numeric response code"
                )));
            }
        }
        let labels: BTreeSet<&str> = self.mapping.values().map(String::as_str).collect();
        if labels.len() < 2 {
            return Err(Error::InvalidConfig(
                "grouping needs at least two distinct group labels".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: GroupingSpec =
            serde_json::from_str(s).map_err(|e| Error::Json(format!("grouping: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::NotFound {
                what: "grouping",
                path: path.to_path_buf(),
            });
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Distinct labels in sorted order.
    pub fn labels(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.mapping.values().collect();
        set.into_iter().cloned().collect()
    }

    fn label_for(&self, value: f64) -> Option<&str> {
        self.mapping
            .iter()
            .find(|(k, _)| k.trim().parse::<f64>().ok() == Some(value))
            .map(|(_, v)| v.as_str())
    }
}

fn format_code(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSplit {
    /// Every label of the spec, including those with no rows.
    pub groups: BTreeMap<String, SurveyDataset>,
    /// Rows whose group value was missing.
    pub excluded_missing: usize,
}

/// Partitions rows by group label; the group column is removed from the
/// outputs and rows with a missing group value are excluded and counted.
pub fn split_by_group(dataset: &SurveyDataset, spec: &GroupingSpec) -> Result<GroupSplit> {
    let col = dataset.column(&spec.variable).ok_or_else(|| {
        Error::Schema(format!("group variable {:?} not found", spec.variable))
    })?;
    let mut members: BTreeMap<String, Vec<usize>> =
        spec.labels().into_iter().map(|l| (l, Vec::new())).collect();
    let mut unmapped = BTreeSet::new();
    let mut excluded = 0;
    for (row, value) in col.values.iter().enumerate() {
        match value {
            None => excluded += 1,
            Some(v) => match spec.label_for(*v) {
                Some(label) => members.get_mut(label).expect("label listed").push(row),
                None => {
                    unmapped.insert(format_code(*v));
                }
            },
        }
    }
    if !unmapped.is_empty() {
        return Err(Error::UnmappedGroupValue {
            variable: spec.variable.clone(),
            values: unmapped.into_iter().collect(),
        });
    }
    let without_group = dataset.drop_columns(&[spec.variable.as_str()]);
    let groups = members
        .into_iter()
        .map(|(label, rows)| (label, without_group.select_rows(&rows)))
        .collect();
    Ok(GroupSplit {
        groups,
        excluded_missing: excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub grouping: Option<GroupingSpec>,
    pub missing_threshold: f64,
    pub min_cases: usize,
    /// Split into groups before computing variable exclusions (per-group
    /// exclusion) rather than after (exclusions shared by all groups).
    pub split_first: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            grouping: None,
            missing_threshold: DEFAULT_MISSING_THRESHOLD,
            min_cases: DEFAULT_MIN_CASES,
            split_first: true,
        }
    }
}

/// Label used when no grouping is configured.
pub const UNGROUPED_LABEL: &str = "all";

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedGroup {
    pub label: String,
    pub data: BinaryDataset,
    pub report: ExclusionReport,
}

/// Runs the full cleaning chain and returns one estimation-ready dataset per
/// group, sorted by label.
///
/// Network nodes are the ordinal and binary columns (other than the group
/// variable); continuous and categorical columns are ignored here.
pub fn prepare_groups(dataset: &SurveyDataset, config: &PipelineConfig) -> Result<Vec<PreparedGroup>> {
    let group_var = config.grouping.as_ref().map(|g| g.variable.as_str());
    let is_node = |c: &Column| c.kind.is_node_kind() && Some(c.name.as_str()) != group_var;

    let finish = |label: &str, nodes: &SurveyDataset, mut report: ExclusionReport| {
        let (data, removed) =
            casewise_delete(nodes, config.min_cases).map_err(|e| e.in_group(label))?;
        report.rows_removed = removed;
        report.rows_kept = data.n();
        Ok::<_, Error>(PreparedGroup {
            label: label.to_string(),
            data,
            report,
        })
    };

    let Some(grouping) = &config.grouping else {
        let nodes = dichotomize(dataset.retain_columns(is_node));
        let (nodes, report) = filter_missing_variables(&nodes, config.missing_threshold)?;
        return Ok(vec![finish(UNGROUPED_LABEL, &nodes, report)?]);
    };

    if config.split_first {
        let split = split_by_group(dataset, grouping)?;
        split
            .groups
            .iter()
            .map(|(label, ds)| {
                let nodes = dichotomize(ds.retain_columns(is_node));
                let (nodes, report) = filter_missing_variables(&nodes, config.missing_threshold)
                    .map_err(|e| e.in_group(label))?;
                finish(label, &nodes, report)
            })
            .collect()
    } else {
        let nodes = dichotomize(dataset.retain_columns(is_node));
        let (kept, report) = filter_missing_variables(&nodes, config.missing_threshold)?;
        let kept_names: Vec<String> = kept.names().into_iter().map(String::from).collect();
        let split = split_by_group(dataset, grouping)?;
        split
            .groups
            .iter()
            .map(|(label, ds)| {
                let nodes = dichotomize(ds.retain_columns(|c| kept_names.contains(&c.name)));
                finish(label, &nodes, report.clone())
            })
            .collect()
    }
}
