// Property checks shared by the fuzz targets and the stable corpus replay.
// Parsers may reject input but must never panic; accepted input must
// survive a write/read round trip. Each check reports whether the input
// was accepted.

#![allow(dead_code)]

use attnet::data::{BinaryDataset, GroupingSpec, Schema, SurveyDataset};
use attnet::replicate::Manifest;
use attnet::stats::{read_records, records_to_csv_string};
use attnet::IsingNetwork;

fn text(data: &[u8]) -> Option<&str> {
    std::str::from_utf8(data).ok()
}

pub fn survey_csv(data: &[u8]) -> bool {
    let schema = Schema::from_json_str(
        r#"{"columns": {"a": "ordinal-4", "b": "ordinal-5", "c": "binary", "d": "continuous", "e": "categorical"},
            "missing_codes": [-9, -8, "NA"]}"#,
    )
    .expect("fixed schema parses");
    if let Ok(ds) = SurveyDataset::from_csv_reader(data, &schema) {
        for col in ds.columns() {
            assert_eq!(col.values.len(), ds.n_rows());
            assert!(col.values.iter().flatten().all(|&v| col.kind.admits(v)));
        }
        return true;
    }
    false
}

pub fn schema_json(data: &[u8]) -> bool {
    let Some(s) = text(data) else { return false };
    if let Ok(schema) = Schema::from_json_str(s) {
        let back = Schema::from_json_str(&schema.to_json_string()).expect("schema round trip");
        assert_eq!(back, schema);
        return true;
    }
    false
}

pub fn grouping_json(data: &[u8]) -> bool {
    let Some(s) = text(data) else { return false };
    if let Ok(spec) = GroupingSpec::from_json_str(s) {
        let json = serde_json::to_string(&spec).expect("grouping serializes");
        assert_eq!(GroupingSpec::from_json_str(&json).expect("grouping round trip"), spec);
        return true;
    }
    false
}

pub fn binary_csv(data: &[u8]) -> bool {
    if let Ok(ds) = BinaryDataset::read_csv(data) {
        let back = BinaryDataset::read_csv(ds.to_csv_string().as_bytes()).expect("binary round trip");
        assert_eq!(back, ds);
        return true;
    }
    false
}

pub fn network_json(data: &[u8]) -> bool {
    let Some(s) = text(data) else { return false };
    if let Ok(net) = IsingNetwork::from_json_str(s) {
        let p = net.p();
        for i in 0..p {
            assert_eq!(net.weight(i, i), 0.0);
            for j in 0..p {
                assert_eq!(net.weight(i, j), net.weight(j, i));
            }
        }
        let back = IsingNetwork::from_json_str(&net.to_json_string()).expect("network round trip");
        assert_eq!(back, net);
        return true;
    }
    false
}

pub fn records_csv(data: &[u8]) -> bool {
    if let Ok(records) = read_records(data) {
        assert!(!records.is_empty());
        let csv = records_to_csv_string(&records).expect("records serialize");
        assert_eq!(read_records(csv.as_bytes()).expect("records round trip"), records);
        return true;
    }
    false
}

pub fn manifest_json(data: &[u8]) -> bool {
    let Some(s) = text(data) else { return false };
    if let Ok(m) = Manifest::from_json_str(s) {
        assert!(!m.cohorts.is_empty());
        return true;
    }
    false
}
