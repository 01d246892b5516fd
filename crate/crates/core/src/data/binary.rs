use std::collections::HashSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Complete n×p table of {0,1} responses, stored column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    names: Vec<String>,
    columns: Vec<Vec<u8>>,
    n: usize,
}

impl BinaryDataset {
    /// Checks shape, uniqueness of names and that every entry is 0 or 1.
    ///
    /// Non-constancy is not required here (a short simulated chain may
    /// legitimately produce a constant column); [`check_estimable`] enforces
    /// it where estimation needs it.
    ///
    /// [`check_estimable`]: BinaryDataset::check_estimable
    pub fn new(names: Vec<String>, columns: Vec<Vec<u8>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Schema(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if names.is_empty() {
            return Err(Error::Schema("binary dataset needs at least one column".into()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        let n = columns[0].len();
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::Schema(format!(
                    "column {name:?} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(pos) = col.iter().position(|&v| v > 1) {
                return Err(Error::ValueOutOfRange {
                    column: name.clone(),
                    row: pos + 1,
                    value: col[pos].to_string(),
                    kind: "binary".into(),
                });
            }
        }
        Ok(BinaryDataset { names, columns, n })
    }

    /// Builds from row-major records.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<u8>]) -> Result<Self> {
        let p = names.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::Schema(format!(
                "row {} has {} values, expected {p}",
                bad + 1,
                rows[bad].len()
            )));
        }
        let columns = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::new(names, columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[u8] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<u8>] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> Vec<u8> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Requirements for network estimation: at least two nodes, at least two
    /// rows and both values present in every column.
    pub fn check_estimable(&self) -> Result<()> {
        if self.p() < 2 {
            return Err(Error::InsufficientData(format!(
                "network estimation needs at least 2 variables, found {}",
                self.p()
            )));
        }
        if self.n < 2 {
            return Err(Error::InsufficientCases {
                group: None,
                n: self.n,
                min: 2,
            });
        }
        for (name, col) in self.names.iter().zip(&self.columns) {
            let ones = col.iter().filter(|&&v| v == 1).count();
            if ones == 0 || ones == col.len() {
                return Err(Error::ConstantColumn {
                    column: name.clone(),
                    group: None,
                });
            }
        }
        Ok(())
    }

    /// Columns reordered by `order` (a permutation of `0..p`).
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.p()).collect::<Vec<_>>() {
            return Err(Error::InvalidConfig("column order is not a permutation".into()));
        }
        Ok(BinaryDataset {
            names: order.iter().map(|&j| self.names[j].clone()).collect(),
            columns: order.iter().map(|&j| self.columns[j].clone()).collect(),
            n: self.n,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.names)?;
        let mut line = vec![""; self.p()];
        for i in 0..self.n {
            for (slot, col) in line.iter_mut().zip(&self.columns) {
                *slot = if col[i] == 1 { "1" } else { "0" };
            }
            wtr.write_record(&line)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Reads the format produced by [`write_csv`](BinaryDataset::write_csv):
    /// header of names, then rows of `0`/`1`. Missing cells are rejected.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut columns = vec![Vec::new(); names.len()];
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            for (j, cell) in record.iter().enumerate() {
                let v = match cell.trim() {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(Error::ValueOutOfRange {
                            column: names[j].clone(),
                            row: row + 1,
                            value: other.to_string(),
                            kind: "binary".into(),
                        })
                    }
                };
                columns[j].push(v);
            }
        }
        Self::new(names, columns)
    }
}
