use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared measurement level of a survey column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColumnKind {
    #[serde(rename = "ordinal-4", alias = "ordinal4")]
    Ordinal4,
    #[serde(rename = "ordinal-5", alias = "ordinal5")]
    Ordinal5,
    #[serde(rename = "binary")]
    Binary,
    #[serde(rename = "continuous")]
    Continuous,
    #[serde(rename = "categorical")]
    Categorical,
}

impl ColumnKind {
    /// Whether `value` belongs to the kind's value set.
    pub fn admits(self, value: f64) -> bool {
        let integral = value.is_finite() && value.fract() == 0.0;
        match self {
            ColumnKind::Ordinal4 => integral && (1.0..=4.0).contains(&value),
            ColumnKind::Ordinal5 => integral && (1.0..=5.0).contains(&value),
            ColumnKind::Binary => value == 0.0 || value == 1.0,
            ColumnKind::Continuous => value.is_finite(),
            ColumnKind::Categorical => integral,
        }
    }

    pub fn is_ordinal(self) -> bool {
        matches!(self, ColumnKind::Ordinal4 | ColumnKind::Ordinal5)
    }

    /// Kinds that can enter a network as nodes once dichotomized.
    pub fn is_node_kind(self) -> bool {
        matches!(
            self,
            ColumnKind::Ordinal4 | ColumnKind::Ordinal5 | ColumnKind::Binary
        )
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::Ordinal4 => "ordinal-4",
            ColumnKind::Ordinal5 => "ordinal-5",
            ColumnKind::Binary => "binary",
            ColumnKind::Continuous => "continuous",
            ColumnKind::Categorical => "categorical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum CodeRepr {
    Int(i64),
    Float(f64),
    Text(String),
}

/// Column-kind declarations plus the codes read as missing.
///
/// Accepted JSON forms are a bare object mapping column name to kind, or
/// `{"columns": {...}, "missing_codes": [...]}` where codes may be strings
/// or numbers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schema {
    pub columns: BTreeMap<String, ColumnKind>,
    pub missing_codes: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SchemaRepr {
    Full {
        columns: BTreeMap<String, ColumnKind>,
        #[serde(default)]
        missing_codes: Vec<CodeRepr>,
    },
    Bare(BTreeMap<String, ColumnKind>),
}

#[derive(Serialize)]
struct SchemaOut<'a> {
    columns: &'a BTreeMap<String, ColumnKind>,
    missing_codes: &'a [String],
}

impl Schema {
    pub fn new(columns: impl IntoIterator<Item = (String, ColumnKind)>) -> Self {
        Schema {
            columns: columns.into_iter().collect(),
            missing_codes: Vec::new(),
        }
    }

    pub fn with_missing_codes(mut self, codes: impl IntoIterator<Item = String>) -> Self {
        self.missing_codes = codes.into_iter().collect();
        self
    }

    pub fn kind(&self, column: &str) -> Option<ColumnKind> {
        self.columns.get(column).copied()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let repr: SchemaRepr = serde_json::from_str(s).map_err(|e| {
            Error::Json(format!("schema: {e}"))
        })?;
        let (columns, codes) = match repr {
            SchemaRepr::Full {
                columns,
                missing_codes,
            } => (columns, missing_codes),
            SchemaRepr::Bare(columns) => (columns, Vec::new()),
        };
        if columns.is_empty() {
            return Err(Error::Schema("schema declares no columns".into()));
        }
        let missing_codes = codes
            .into_iter()
            .map(|c| match c {
                CodeRepr::Int(i) => i.to_string(),
                CodeRepr::Float(f) => f.to_string(),
                CodeRepr::Text(t) => t.trim().to_string(),
            })
            .collect();
        Ok(Schema {
            columns,
            missing_codes,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::NotFound {
                what: "schema",
                path: path.to_path_buf(),
            });
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SchemaOut {
            columns: &self.columns,
            missing_codes: &self.missing_codes,
        })
        .expect("schema serialization is infallible")
    }

    /// Whether a trimmed raw cell denotes a missing value.
    pub fn is_missing_code(&self, cell: &str) -> bool {
        if cell.is_empty() {
            return true;
        }
        let numeric = cell.parse::<f64>().ok();
        self.missing_codes.iter().any(|code| {
            code == cell
                || match (numeric, code.parse::<f64>().ok()) {
                    (Some(a), Some(b)) => a == b,
                    _ => false,
                }
        })
    }
}
