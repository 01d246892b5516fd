mod common;

use std::path::Path;

use common::{attnet, path_str, snapshot, write_cohort, write_replication_fixture, LABELS};

fn error_json(stderr: &[u8]) -> serde_json::Value {
    let text = String::from_utf8_lossy(stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn estimate(dir: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    let mut args = vec!["estimate".into()];
    for (flag, file) in [("--input", "data.csv"), ("--schema", "schema.json"), ("--grouping", "grouping.json")] {
        args.push(flag.to_string());
        args.push(dir.join(file).display().to_string());
    }
    args.extend(["--out".into(), out.display().to_string()]);
    args.extend(extra.iter().map(|s| s.to_string()));
    attnet(args)
}

#[test]
fn estimate_fans_out_over_groups() {
    let tmp = tempfile::tempdir().unwrap();
    write_cohort(tmp.path(), 7, [200, 200, 200], false);
    let out = tmp.path().join("out");
    let res = estimate(tmp.path(), &out, &[]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for label in LABELS {
        let net = std::fs::read_to_string(out.join(format!("network_{label}.json"))).unwrap();
        let net = attnet::IsingNetwork::from_json_str(&net).unwrap();
        assert_eq!(net.p(), 10);
        assert!(out.join(format!("edges_{label}.csv")).exists());
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("estimate_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["groups"].as_array().unwrap().len(), 3);
    assert_eq!(summary["estimation"]["gamma"], 0.25);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("wrote ")).count(), 7);
}

#[test]
fn missing_schema_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    write_cohort(tmp.path(), 7, [60, 60, 60], false);
    std::fs::remove_file(tmp.path().join("schema.json")).unwrap();
    let out = tmp.path().join("out");
    let res = estimate(tmp.path(), &out, &[]);
    assert_eq!(res.status.code(), Some(2));
    let err = error_json(&res.stderr);
    assert_eq!(err["error"], "schema_not_found");
    assert_eq!(err["exit_code"], 2);
    assert!(err["message"].as_str().unwrap().contains("schema not found"));
    assert!(!out.exists());
}

#[test]
fn small_group_is_a_data_contract_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    write_cohort(tmp.path(), 8, [200, 40, 200], false);
    let out = tmp.path().join("out");
    let res = estimate(tmp.path(), &out, &["--min-group-size", "100"]);
    assert_eq!(res.status.code(), Some(3));
    let err = error_json(&res.stderr);
    assert_eq!(err["error"], "insufficient_cases");
    assert!(err["message"].as_str().unwrap().contains("mid"), "{err}");
    assert!(!out.exists(), "partial output left behind");
}

#[test]
fn malformed_network_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let net = tmp.path().join("net.json");
    std::fs::write(&net, r#"{"names":["a","b"],"thresholds":[0,0],"weights":[[0,1],[0.5,0]]}"#).unwrap();
    let out = tmp.path().join("out");
    let res = attnet(&["simulate", "--input", path_str(&net), "--n", "10", "--out", path_str(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_json(&res.stderr)["error"], "invalid_network");
    std::fs::write(&net, "{").unwrap();
    let res = attnet(&["simulate", "--input", path_str(&net), "--n", "10", "--out", path_str(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_json(&res.stderr)["error"], "malformed_json");
    assert!(!out.exists());
}

#[test]
fn simulate_is_seeded() {
    let tmp = tempfile::tempdir().unwrap();
    let net = tmp.path().join("net.json");
    std::fs::write(&net, r#"{"names":["a","b","c"],"thresholds":[-0.5,-0.5,0],"weights":[[0,1,0],[1,0,0.5],[0,0.5,0]]}"#)
        .unwrap();
    let run = |out: &str, seed: &str| {
        let out = tmp.path().join(out);
        let res = attnet(&["simulate", "--input", path_str(&net), "--n", "200", "--seed", seed, "--out", path_str(&out)]);
        assert!(res.status.success());
        assert!(String::from_utf8_lossy(&res.stdout).contains(&format!("seed: {seed}")));
        std::fs::read_to_string(out.join("simulated.csv")).unwrap()
    };
    let a = run("a", "5");
    assert_eq!(a, run("b", "5"));
    assert_ne!(a, run("c", "6"));
    assert_eq!(a.lines().count(), 201);
    assert!(a.starts_with("a,b,c\n"));
}

#[test]
fn simulate_perturbation_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let net = tmp.path().join("dense.json");
    std::fs::write(&net, attnet::simulation::dense_network(6, 0.5).unwrap().to_json_string()).unwrap();
    let out = tmp.path().join("out");
    let res = attnet(&[
        "simulate", "--input", path_str(&net), "--n", "100", "--perturb", "--trials", "20", "--out", path_str(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("perturbation.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["network_id"], "dense");
    assert!(report["report"]["note"].as_str().unwrap().contains("proxies"));
    let sweep = std::fs::read_to_string(out.join("field_sweep.csv")).unwrap();
    assert!(sweep.starts_with("field,mean_state\n"));
    assert_eq!(sweep.lines().count(), 1 + 2 * 13);
}

#[test]
fn metrics_with_cohorts() {
    let tmp = tempfile::tempdir().unwrap();
    write_cohort(tmp.path(), 9, [200, 200, 200], false);
    let est = tmp.path().join("est");
    assert!(estimate(tmp.path(), &est, &[]).status.success());
    let files: Vec<String> = LABELS.iter().map(|l| format!("network_{l}.json")).collect();
    let cohorts = serde_json::json!({ "c1": files });
    std::fs::write(est.join("cohorts.json"), cohorts.to_string()).unwrap();
    let out = tmp.path().join("metrics");
    let res = attnet([
        "metrics",
        "--cohorts",
        path_str(&est.join("cohorts.json")),
        "--distances",
        "--out",
        path_str(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    let rows = m["networks"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let z: f64 = rows.iter().map(|r| r["z"].as_f64().unwrap()).sum();
    assert!(z.abs() < 1e-9);
    assert!(out.join("standardized_aspl.csv").exists());
    assert_eq!(snapshot(&out).iter().filter(|(p, _)| p.to_string_lossy().starts_with("distances_")).count(), 3);
}

#[test]
fn replicate_and_compare_on_synthetic_cohorts() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_replication_fixture(tmp.path());
    let out = tmp.path().join("rep");
    let res = attnet(&["replicate", "--input", path_str(&manifest), "--out", path_str(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("replication.json")).unwrap()).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 9);
    // one cohort loses its half-missing item
    let nodes: Vec<u64> = report["records"].as_array().unwrap().iter().map(|r| r["n_nodes"].as_u64().unwrap()).collect();
    assert!(nodes.contains(&9) && nodes.contains(&10));
    let groups = report["analysis"]["ancova"]["groups"].as_array().unwrap();
    let means: Vec<f64> = groups.iter().map(|g| g["mean"].as_f64().unwrap()).collect();
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
    let comparison = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert!(comparison.starts_with("quantity,reference,obtained,tolerance,within\n"));
    assert_eq!(comparison.lines().count(), 1 + 4 + 3 + 3 + 2);
    assert!(out.join("networks/2000-b_mid.json").exists());

    let cmp = tmp.path().join("cmp");
    let res = attnet(&[
        "compare", "--input", path_str(&out.join("records.csv")), "--levels", "low,mid,high", "--out", path_str(&cmp),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let from_compare: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cmp.join("report.json")).unwrap()).unwrap();
    assert_eq!(from_compare, report["analysis"]);
    assert!(String::from_utf8_lossy(&res.stdout).contains("F(2, 5)"));
}

#[test]
fn compare_rejects_bad_records() {
    let tmp = tempfile::tempdir().unwrap();
    let records = tmp.path().join("r.csv");
    std::fs::write(&records, "cohort,group,aspl,n_nodes\nc,low,-2,10\n").unwrap();
    let res = attnet(&["compare", "--input", path_str(&records), "--out", path_str(&tmp.path().join("o"))]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_json(&res.stderr)["error"], "value_out_of_range");
    let res = attnet(&["compare", "--input", path_str(&tmp.path().join("none.csv")), "--out", "x"]);
    assert_eq!(res.status.code(), Some(2));
}
