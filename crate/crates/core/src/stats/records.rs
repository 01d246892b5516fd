//! Group-level analysis table: one row per estimated network.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    /// Election year and candidate, e.g. `1996-clinton`.
    pub cohort: String,
    pub group: String,
    pub aspl: f64,
    pub n_nodes: usize,
    /// Pre/post attitude correlation.
    pub stability: Option<f64>,
    /// Biserial correlation of the pre-election attitude with the vote.
    pub behavior_impact: Option<f64>,
}

impl GroupRecord {
    pub fn validate(&self, row: usize) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::ValueOutOfRange {
                column: what.to_string(),
                row,
                value: match what {
                    "aspl" => self.aspl.to_string(),
                    "n_nodes" => self.n_nodes.to_string(),
                    "stability" => format!("{:?}", self.stability),
                    _ => format!("{:?}", self.behavior_impact),
                },
                kind: what.to_string(),
            })
        };
        if self.cohort.is_empty() || self.group.is_empty() {
            return Err(Error::Schema(format!("row {row}: empty cohort or group label")));
        }
        if !(self.aspl.is_finite() && self.aspl > 0.0) {
            return bad("aspl");
        }
        if self.n_nodes < 2 {
            return bad("n_nodes");
        }
        if let Some(s) = self.stability {
            if !(-1.0..=1.0).contains(&s) {
                return bad("stability");
            }
        }
        // biserial estimates may leave [-1, 1] in small samples
        if let Some(b) = self.behavior_impact {
            if !b.is_finite() {
                return bad("behavior_impact");
            }
        }
        Ok(())
    }
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<GroupRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for required in ["cohort", "group", "aspl", "n_nodes"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Schema(format!("record table lacks column {required:?}")));
        }
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<GroupRecord>().enumerate() {
        let rec = rec?;
        rec.validate(i + 1)?;
        out.push(rec);
    }
    if out.is_empty() {
        return Err(Error::InsufficientData("record table has no rows".into()));
    }
    Ok(out)
}

pub fn read_records_str(text: &str) -> Result<Vec<GroupRecord>> {
    read_records(text.as_bytes())
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<GroupRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound {
                what: "records",
                path: path.to_path_buf(),
            }
        } else {
            Error::io(path, e)
        }
    })?;
    read_records(std::io::BufReader::new(file))
}

pub fn write_records<W: Write>(records: &[GroupRecord], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn records_to_csv_string(records: &[GroupRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_records(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
