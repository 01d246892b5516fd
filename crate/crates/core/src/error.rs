use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure classes. The CLI maps each to its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Unreadable, malformed or out-of-contract input files.
    Input,
    /// Well-formed input that violates a data requirement of the analysis.
    DataContract,
    /// An estimation or statistics routine could not produce a result.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{what} not found: {path}")]
    NotFound { what: &'static str, path: PathBuf },

    #[error("malformed CSV{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Csv { line: Option<u64>, message: String },

    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),

    #[error("value out of range: column {column:?}, row {row}: {value:?} is not a valid {kind} value")]
    ValueOutOfRange {
        column: String,
        row: usize,
        value: String,
        kind: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("no variables remain after excluding variables with too many missing values")]
    NoVariablesRemain,

    #[error("insufficient cases{}: {n} complete rows, at least {min} required", group.as_ref().map(|g| format!(" in group {g:?}")).unwrap_or_default())]
    InsufficientCases {
        group: Option<String>,
        n: usize,
        min: usize,
    },

    #[error("constant column {column:?}{}: estimation needs both values present", group.as_ref().map(|g| format!(" in group {g:?}")).unwrap_or_default())]
    ConstantColumn {
        column: String,
        group: Option<String>,
    },

    #[error("column {column:?} is {kind}, expected binary")]
    NotBinary { column: String, kind: String },

    #[error("unmapped values in group variable {variable:?}: {}", values.join(", "))]
    UnmappedGroupValue { variable: String, values: Vec<String> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate response: outcome is constant")]
    DegenerateResponse,

    #[error("lambda_max is zero: no predictor is correlated with the response")]
    ZeroLambdaMax,

    #[error("no convergence{} at lambda = {lambda} after {iterations} iterations", node.map(|n| format!(" for node {n}")).unwrap_or_default())]
    NonConvergence {
        node: Option<usize>,
        lambda: f64,
        iterations: usize,
    },

    #[error("network{} has no connected pairs", network.as_ref().map(|g| format!(" {g:?}")).unwrap_or_default())]
    NoConnectedPairs { network: Option<String> },

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("rank-deficient design: {0}")]
    Collinear(String),

    #[error("exact mode limit: {p} nodes exceeds the maximum of {max}")]
    ExactLimit { p: usize, max: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Io { .. } | NotFound { .. } | Csv { .. } | Json(_) | Schema(_) | DuplicateColumn(_)
            | ValueOutOfRange { .. } | InvalidConfig(_) | InvalidNetwork(_) | ExactLimit { .. } => {
                ErrorClass::Input
            }
            NoVariablesRemain
            | InsufficientCases { .. }
            | ConstantColumn { .. }
            | NotBinary { .. }
            | UnmappedGroupValue { .. }
            | InsufficientData(_)
            | DegenerateResponse => ErrorClass::DataContract,
            ZeroLambdaMax | NonConvergence { .. } | NoConnectedPairs { .. } | ZeroVariance(_)
            | Collinear(_) | Numerical(_) => ErrorClass::Numerical,
        }
    }

    /// Stable machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            Io { .. } => "io",
            NotFound { what, .. } => match *what {
                "schema" => "schema_not_found",
                "grouping" => "grouping_not_found",
                "manifest" => "manifest_not_found",
                _ => "file_not_found",
            },
            Csv { .. } => "malformed_csv",
            Json(_) => "malformed_json",
            Schema(_) => "schema_mismatch",
            DuplicateColumn(_) => "duplicate_column",
            ValueOutOfRange { .. } => "value_out_of_range",
            InvalidConfig(_) => "invalid_config",
            InvalidNetwork(_) => "invalid_network",
            NoVariablesRemain => "no_variables_remain",
            InsufficientCases { .. } => "insufficient_cases",
            ConstantColumn { .. } => "constant_column",
            NotBinary { .. } => "not_binary",
            UnmappedGroupValue { .. } => "unmapped_group_value",
            InsufficientData(_) => "insufficient_data",
            DegenerateResponse => "degenerate_response",
            ZeroLambdaMax => "zero_lambda_max",
            NonConvergence { .. } => "non_convergence",
            NoConnectedPairs { .. } => "no_connected_pairs",
            ZeroVariance(_) => "zero_variance",
            Collinear(_) => "collinear",
            ExactLimit { .. } => "exact_limit",
            Numerical(_) => "numerical",
        }
    }

    /// Attaches a group or network label to errors that carry one.
    pub fn in_group(self, label: &str) -> Self {
        match self {
            Error::InsufficientCases { n, min, .. } => Error::InsufficientCases {
                group: Some(label.to_string()),
                n,
                min,
            },
            Error::ConstantColumn { column, .. } => Error::ConstantColumn {
                column,
                group: Some(label.to_string()),
            },
            Error::NoConnectedPairs { .. } => Error::NoConnectedPairs {
                network: Some(label.to_string()),
            },
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line());
        let message = match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => format!("malformed row: expected {expected_len} fields, found {len}"),
            _ => e.to_string(),
        };
        Error::Csv { line, message }
    }
}
