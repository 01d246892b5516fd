use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use crate::data::schema::{ColumnKind, Schema};
use crate::error::{Error, Result};

/// One named survey variable. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub values: Vec<Option<f64>>,
}

impl Column {
    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn missing_fraction(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.missing_count() as f64 / self.values.len() as f64
        }
    }
}

/// Typed survey table, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyDataset {
    columns: Vec<Column>,
    n_rows: usize,
}

impl SurveyDataset {
    /// Builds a dataset, checking unique names, equal lengths and that every
    /// present value is admitted by its column kind.
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.values.len());
        let mut seen = HashSet::new();
        for col in &columns {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::DuplicateColumn(col.name.clone()));
            }
            if col.values.len() != n_rows {
                return Err(Error::Schema(format!(
                    "column {:?} has {} rows, expected {n_rows}",
                    col.name,
                    col.values.len()
                )));
            }
            for (row, v) in col.values.iter().enumerate() {
                if let Some(v) = v {
                    if !col.kind.admits(*v) {
                        return Err(Error::ValueOutOfRange {
                            column: col.name.clone(),
                            row: row + 1,
                            value: v.to_string(),
                            kind: col.kind.to_string(),
                        });
                    }
                }
            }
        }
        Ok(SurveyDataset { columns, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn missing_cells(&self) -> usize {
        self.columns.iter().map(Column::missing_count).sum()
    }

    pub(crate) fn map_columns(self, f: impl FnMut(Column) -> Column) -> Self {
        SurveyDataset {
            columns: self.columns.into_iter().map(f).collect(),
            n_rows: self.n_rows,
        }
    }

    /// Keeps the columns for which `keep` returns true, preserving order.
    pub fn retain_columns(&self, mut keep: impl FnMut(&Column) -> bool) -> Self {
        SurveyDataset {
            columns: self.columns.iter().filter(|c| keep(c)).cloned().collect(),
            n_rows: self.n_rows,
        }
    }

    pub fn drop_columns(&self, names: &[&str]) -> Self {
        self.retain_columns(|c| !names.contains(&c.name.as_str()))
    }

    /// Rows at the given indices, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                kind: c.kind,
                values: rows.iter().map(|&r| c.values[r]).collect(),
            })
            .collect();
        SurveyDataset {
            columns,
            n_rows: rows.len(),
        }
    }

    /// Indices of rows with no missing cell.
    pub fn complete_rows(&self) -> Vec<usize> {
        (0..self.n_rows)
            .filter(|&r| self.columns.iter().all(|c| c.values[r].is_some()))
            .collect()
    }

    /// Parses a UTF-8, comma-separated file with a header row.
    pub fn from_csv_reader<R: Read>(reader: R, schema: &Schema) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();

        let mut seen = HashSet::new();
        for h in &headers {
            if !seen.insert(h.as_str()) {
                return Err(Error::DuplicateColumn(h.clone()));
            }
            if schema.kind(h).is_none() {
                return Err(Error::Schema(format!("column {h:?} is not declared in the schema")));
            }
        }
        let undeclared: Vec<&str> = schema
            .columns
            .keys()
            .filter(|k| !seen.contains(k.as_str()))
            .map(String::as_str)
            .collect();
        if !undeclared.is_empty() {
            return Err(Error::Schema(format!(
                "schema columns missing from header: {}",
                undeclared.join(", ")
            )));
        }

        let kinds: Vec<ColumnKind> = headers.iter().map(|h| schema.columns[h]).collect();
        let mut values: Vec<Vec<Option<f64>>> = vec![Vec::new(); headers.len()];
        for (row_idx, record) in rdr.records().enumerate() {
            let record = record?;
            for (j, raw) in record.iter().enumerate() {
                let cell = raw.trim();
                let parsed = if schema.is_missing_code(cell) {
                    None
                } else {
                    let v = cell.parse::<f64>().ok().filter(|v| kinds[j].admits(*v));
                    match v {
                        // normalise -0.0 so downstream equality tests are exact
                        Some(v) => Some(v + 0.0),
                        None => {
                            return Err(Error::ValueOutOfRange {
                                column: headers[j].clone(),
                                row: row_idx + 1,
                                value: cell.to_string(),
                                kind: kinds[j].to_string(),
                            })
                        }
                    }
                };
                values[j].push(parsed);
            }
        }

        let columns = headers
            .into_iter()
            .zip(kinds)
            .zip(values)
            .map(|((name, kind), values)| Column { name, kind, values })
            .collect();
        SurveyDataset::new(columns)
    }

    pub fn from_csv_str(s: &str, schema: &Schema) -> Result<Self> {
        Self::from_csv_reader(s.as_bytes(), schema)
    }
}

/// Reads a survey CSV from disk against `schema`.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<SurveyDataset> {
    if !path.exists() {
        return Err(Error::NotFound {
            what: "input",
            path: path.to_path_buf(),
        });
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    SurveyDataset::from_csv_reader(std::io::BufReader::new(file), schema)
}
