use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use attnet::data::pipeline::{prepare_groups, GroupingSpec, PipelineConfig};
use attnet::data::load_csv;
use attnet::metrics::{standardize, write_distance_csv};
use attnet::replicate::{replicate as run_replication, ConfigOverrides, ImpactMeasure, Manifest, ReplicationConfig};
use attnet::simulation::{gibbs_sample, perturbation_experiment, write_sweep_csv, GibbsConfig, PerturbationConfig};
use attnet::stats::analysis::{format_p, scatter_csv, standardized_csv, StrengthReport};
use attnet::stats::records::{load_records, records_to_csv_string};
use attnet::{estimate_network, Error, IsingNetwork, NetworkMetrics, Result, Schema};
use serde::Serialize;

use crate::output::{file_label, Staged};
use crate::{Command, CompareArgs, EstimateArgs, MetricsArgs, PipelineArgs, ReplicateArgs, SimulateArgs};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Estimate(a) => estimate(a),
        Command::Metrics(a) => metrics(a),
        Command::Compare(a) => compare(a),
        Command::Simulate(a) => simulate(a),
        Command::Replicate(a) => replicate(a),
    }
}

fn read_text(path: &Path, what: &'static str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound {
                what,
                path: path.to_path_buf(),
            }
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })
}

fn load_network(path: &Path) -> Result<IsingNetwork> {
    IsingNetwork::from_json_str(&read_text(path, "network")?)
}

fn pipeline_config(args: &PipelineArgs, grouping: Option<GroupingSpec>) -> PipelineConfig {
    PipelineConfig {
        grouping,
        missing_threshold: args.threshold(),
        min_cases: args.min_cases(),
        split_first: !args.global_exclusion,
    }
}

fn finish(staged: Staged, out: &Path) -> Result<()> {
    let names: Vec<String> = staged.names().map(|p| p.display().to_string()).collect();
    staged.commit(out)?;
    for n in names {
        println!("wrote {}", out.join(n).display());
    }
    Ok(())
}

#[derive(Serialize)]
struct GroupSummary<'a> {
    group: &'a str,
    network_file: String,
    edges_file: String,
    n_nodes: usize,
    n_edges: usize,
    exclusions: &'a attnet::data::pipeline::ExclusionReport,
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let config = a.estimation.config();
    config.validate()?;
    let schema = Schema::from_path(&a.schema)?;
    let grouping = a.grouping.as_deref().map(GroupingSpec::from_path).transpose()?;
    let data = load_csv(&a.input, &schema)?;
    let groups = prepare_groups(&data, &pipeline_config(&a.pipeline, grouping))?;

    let mut staged = Staged::default();
    let mut networks = Vec::with_capacity(groups.len());
    for g in &groups {
        let net = estimate_network(&g.data, &config).map_err(|e| e.in_group(&g.label))?;
        networks.push(net);
    }
    let mut summary = Vec::new();
    for (g, net) in groups.iter().zip(&networks) {
        let label = file_label(&g.label);
        let network_file = format!("network_{label}.json");
        let edges_file = format!("edges_{label}.csv");
        staged.add(&network_file, format!("{}\n", net.to_json_string()));
        staged.add(&edges_file, net.to_edge_csv_string());
        summary.push(GroupSummary {
            group: &g.label,
            network_file,
            edges_file,
            n_nodes: net.p(),
            n_edges: net.n_edges(),
            exclusions: &g.report,
        });
    }
    staged.json(
        "estimate_summary.json",
        &serde_json::json!({ "estimation": config, "groups": summary }),
    );
    finish(staged, &a.out)
}

#[derive(Serialize)]
struct MetricsRow {
    network: String,
    cohort: Option<String>,
    #[serde(flatten)]
    metrics: NetworkMetrics,
    z: Option<f64>,
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let mut entries: Vec<(String, Option<String>, PathBuf)> =
        a.input.iter().map(|p| (p.display().to_string(), None, p.clone())).collect();
    if let Some(path) = &a.cohorts {
        let text = read_text(path, "cohorts")?;
        let cohorts: BTreeMap<String, Vec<PathBuf>> = serde_json::from_str(&text).map_err(|e| {
            if e.is_data() {
                Error::Schema(format!("cohorts file: {e}"))
            } else {
                Error::from(e)
            }
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for (cohort, files) in cohorts {
            for f in files {
                entries.push((f.display().to_string(), Some(cohort.clone()), base.join(&f)));
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::InvalidConfig("no network files given".into()));
    }

    let mut rows = Vec::with_capacity(entries.len());
    let mut staged = Staged::default();
    for (i, (name, cohort, path)) in entries.into_iter().enumerate() {
        let net = load_network(&path)?;
        let (m, result) = NetworkMetrics::compute(&net).map_err(|e| e.in_group(&name))?;
        if a.distances {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("network");
            let mut buf = Vec::new();
            write_distance_csv(net.names(), &result.distances, &mut buf)?;
            staged.add(format!("distances_{i:03}_{}.csv", file_label(stem)), buf);
        }
        rows.push(MetricsRow {
            network: name,
            cohort,
            metrics: m,
            z: None,
        });
    }
    let mut by_cohort: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        if let Some(c) = &r.cohort {
            by_cohort.entry(c.clone()).or_default().push(i);
        }
    }
    for idx in by_cohort.values() {
        let values: Vec<f64> = idx.iter().map(|&i| rows[i].metrics.aspl).collect();
        if let Ok(z) = standardize(&values) {
            for (&i, zi) in idx.iter().zip(z) {
                rows[i].z = Some(zi);
            }
        }
    }
    if !by_cohort.is_empty() {
        let mut csv = String::from("cohort,network,aspl,z\n");
        for r in rows.iter().filter(|r| r.cohort.is_some()) {
            let z = r.z.map(|z| format!("{z:?}")).unwrap_or_default();
            csv.push_str(&format!(
                "{},{},{:?},{z}\n",
                csv_field(r.cohort.as_deref().unwrap_or_default()),
                csv_field(&r.network),
                r.metrics.aspl
            ));
        }
        staged.add("standardized_aspl.csv", csv);
    }
    staged.json("metrics.json", &serde_json::json!({ "networks": rows }));
    finish(staged, &a.out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn stage_analysis(staged: &mut Staged, report: &StrengthReport) -> Result<()> {
    let cs = &report.connectivity_strength;
    if let Some(c) = &cs.behavior_impact {
        staged.add("scatter_behavior_impact.csv", scatter_csv(&c.scatter)?);
    }
    if let Some(c) = &cs.stability {
        staged.add("scatter_stability.csv", scatter_csv(&c.scatter)?);
    }
    staged.add("standardized_aspl.csv", standardized_csv(&report.standardized_aspl)?);
    Ok(())
}

fn print_analysis(report: &StrengthReport) {
    let a = &report.ancova;
    println!(
        "group effect: F({}, {}) = {:.2}, {}, partial eta^2 = {:.2}",
        a.df.0,
        a.df.1,
        a.f,
        format_p(a.p),
        a.partial_eta_sq
    );
    for g in &a.groups {
        println!("  {}: n = {}, M = {:.2}, adjusted M = {:.2}", g.level, g.n, g.mean, g.adjusted_mean);
    }
    for c in &a.contrasts {
        println!(
            "  {} vs {}: diff = {:.2}, t({}) = {:.2}, {}, 95% CI [{:.2}; {:.2}], d = {:.2}",
            c.first,
            c.second,
            c.difference,
            a.df.1,
            c.t,
            format_p(c.p_adjusted),
            c.ci_lower,
            c.ci_upper,
            c.cohens_d
        );
    }
    let cs = &report.connectivity_strength;
    for c in [&cs.behavior_impact, &cs.stability].into_iter().flatten() {
        println!(
            "{}: r = {:.2}, t({}) = {:.2}, {} (n = {})",
            c.measure.name(),
            c.r,
            c.df,
            c.t,
            format_p(c.p),
            c.n
        );
    }
}

fn compare(a: CompareArgs) -> Result<()> {
    let records = load_records(&a.input)?;
    let report = attnet::stats::strength_report(&records, a.levels.as_deref())?;
    let mut staged = Staged::default();
    staged.json("report.json", &report);
    stage_analysis(&mut staged, &report)?;
    print_analysis(&report);
    finish(staged, &a.out)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let net = load_network(&a.input)?;
    let gibbs = GibbsConfig {
        n: a.n,
        burn_in: a.burn_in,
        thinning: a.thinning,
        seed: a.seed,
    };
    let data = gibbs_sample(&net, &gibbs)?;
    let mut staged = Staged::default();
    staged.add("simulated.csv", data.to_csv_string());
    if a.perturb {
        let config = PerturbationConfig {
            burn_in: a.burn_in,
            thinning: a.thinning,
            trials: a.trials,
            seed: a.seed,
            ..PerturbationConfig::default()
        };
        let id = a.input.file_stem().and_then(|s| s.to_str()).unwrap_or("network");
        let report = perturbation_experiment(&net, id, &config)?;
        let mut sweep = Vec::new();
        write_sweep_csv(&report.field_sweep, &mut sweep)?;
        staged.json(
            "perturbation.json",
            &serde_json::json!({ "config": config, "report": report }),
        );
        staged.add("field_sweep.csv", sweep);
    }
    println!("seed: {}", a.seed);
    finish(staged, &a.out)
}

fn replicate(a: ReplicateArgs) -> Result<()> {
    let manifest = Manifest::from_path(&a.input)?;
    let config = a.estimation.config();
    config.validate()?;
    let base = ReplicationConfig {
        estimation: config,
        pipeline: pipeline_config(&a.pipeline, None),
        impact: if a.point_biserial {
            ImpactMeasure::PointBiserial
        } else {
            ImpactMeasure::Biserial
        },
        levels: a.levels.clone(),
    };
    let overrides = ConfigOverrides {
        missing_threshold: a.pipeline.missing_threshold.is_some(),
        min_cases: a.pipeline.min_group_size.is_some(),
        split_first: a.pipeline.global_exclusion,
        levels: a.levels.is_some(),
    };
    let config = ReplicationConfig::from_manifest(&manifest, base, &overrides);
    let report = run_replication(&manifest, &config)?;

    let mut staged = Staged::default();
    staged.json("replication.json", &report);
    staged.add("records.csv", records_to_csv_string(&report.records)?);
    let mut table = String::from("quantity,reference,obtained,tolerance,within\n");
    for r in &report.comparison {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        table.push_str(&format!(
            "{},{:?},{},{},{}\n",
            csv_field(&r.quantity),
            r.reference,
            opt(r.obtained),
            opt(r.tolerance),
            r.within.map(|w| w.to_string()).unwrap_or_default()
        ));
    }
    staged.add("comparison.csv", table);
    for n in &report.networks {
        let stem = format!("{}_{}", file_label(&n.cohort), file_label(&n.group));
        staged.add(format!("networks/{stem}.json"), format!("{}\n", n.network.to_json_string()));
        staged.add(format!("networks/{stem}_edges.csv"), n.network.to_edge_csv_string());
    }
    stage_analysis(&mut staged, &report.analysis)?;

    print_analysis(&report.analysis);
    println!();
    println!("{:<42} {:>10} {:>10} {:>10}  status", "quantity", "reference", "obtained", "tolerance");
    for r in &report.comparison {
        let status = match r.within {
            Some(true) => "within",
            Some(false) => "OUTSIDE",
            None => "info",
        };
        println!(
            "{:<42} {:>10.3} {:>10} {:>10}  {status}",
            r.quantity,
            r.reference,
            r.obtained.map_or("-".into(), |v| format!("{v:.3}")),
            r.tolerance.map_or("-".into(), |v| format!("{v:.2}")),
        );
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    finish(staged, &a.out)
}
