#![allow(dead_code)]

use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use attnet::simulation::{gibbs_sample, GibbsConfig};
use attnet::IsingNetwork;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const LABELS: [&str; 3] = ["low", "mid", "high"];
pub const ITEMS: usize = 10;

pub fn attnet<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_attnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Ring over the items plus chords; weights scale with `strength`.
fn group_network(strength: f64) -> IsingNetwork {
    let mut edges: Vec<(usize, usize, f64)> = (0..ITEMS).map(|i| (i, (i + 1) % ITEMS, strength)).collect();
    edges.extend([(0, 5, 0.8 * strength), (2, 7, 0.8 * strength), (3, 8, -0.6 * strength)]);
    let thresholds = vec![-strength; ITEMS];
    IsingNetwork::from_edges(thresholds, &edges).unwrap()
}

/// Writes `data.csv`, `schema.json` and `grouping.json` for one cohort
/// under `dir`. Interest codes 1..=3 map to low, mid, high; higher interest
/// gets a more connected network and more stable, more predictive
/// attitudes. Items carry about 3% missing cells (code -9); with
/// `drop_item` the last item is 25% missing and falls out.
pub fn write_cohort(dir: &Path, seed: u64, sizes: [usize; 3], drop_item: bool) {
    std::fs::create_dir_all(dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for (g, &n) in sizes.iter().enumerate() {
        let strength = [0.9, 1.4, 2.0][g] + rng.random_range(-0.05..0.05);
        let stability = [0.45, 0.65, 0.85][g] + rng.random_range(-0.05..0.05);
        let impact = [0.3, 0.5, 0.7][g] + rng.random_range(-0.05..0.05);
        let data = gibbs_sample(&group_network(strength), &GibbsConfig::new(n, seed * 10 + g as u64)).unwrap();
        for r in 0..n {
            let mut cells: Vec<String> = vec![(g + 1).to_string()];
            for j in 0..ITEMS {
                let missing_rate = if drop_item && j == ITEMS - 1 { 0.25 } else { 0.03 };
                if rng.random::<f64>() < missing_rate {
                    cells.push("-9".into());
                } else {
                    let v = 2 * data.column(j)[r] + 1 + u8::from(rng.random::<bool>());
                    cells.push(v.to_string());
                }
            }
            let pre: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            let post = stability * pre + (1.0 - stability * stability).sqrt() * e;
            let latent: f64 = impact * pre + (1.0 - impact * impact).sqrt() * rng.sample::<f64, _>(StandardNormal);
            cells.push(format!("{pre:.4}"));
            cells.push(if rng.random::<f64>() < 0.02 { "-9".into() } else { format!("{post:.4}") });
            cells.push(u8::from(latent > 0.2).to_string());
            rows.push(cells.join(","));
        }
    }
    let mut header = vec!["interest".to_string()];
    header.extend((0..ITEMS).map(|j| format!("item{j}")));
    header.extend(["pre".into(), "post".into(), "vote".into()]);
    let mut text = header.join(",");
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    std::fs::write(dir.join("data.csv"), text).unwrap();

    let mut columns = serde_json::Map::new();
    columns.insert("interest".into(), "categorical".into());
    for j in 0..ITEMS {
        columns.insert(format!("item{j}"), "ordinal-4".into());
    }
    columns.insert("pre".into(), "continuous".into());
    columns.insert("post".into(), "continuous".into());
    columns.insert("vote".into(), "categorical".into());
    let schema = serde_json::json!({ "columns": columns, "missing_codes": [-9] });
    std::fs::write(dir.join("schema.json"), schema.to_string()).unwrap();
    let grouping = serde_json::json!({
        "variable": "interest",
        "mapping": { "1": LABELS[0], "2": LABELS[1], "3": LABELS[2] }
    });
    std::fs::write(dir.join("grouping.json"), grouping.to_string()).unwrap();
}

/// Three cohorts plus a manifest; returns the manifest path.
pub fn write_replication_fixture(dir: &Path) -> PathBuf {
    let ids = ["1996-a", "2000-b", "2004-c"];
    let mut cohorts = Vec::new();
    for (k, id) in ids.iter().enumerate() {
        write_cohort(&dir.join(id), 100 + k as u64, [520, 480, 500], k == 1);
        cohorts.push(serde_json::json!({
            "id": id,
            "schema": format!("{id}/schema.json"),
            "data": format!("{id}/data.csv"),
            "grouping": format!("{id}/grouping.json"),
            "attitude_pre": "pre",
            "attitude_post": "post",
            "vote": "vote",
        }));
    }
    let manifest = serde_json::json!({ "cohorts": cohorts, "levels": LABELS, "min_cases": 100 });
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    path
}

/// Every file under `dir` with its contents, keyed by relative path.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.push((path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
