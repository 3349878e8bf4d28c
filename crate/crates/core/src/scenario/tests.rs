use super::*;
use serde_json::json;

fn cfg(v: Value) -> ScenarioConfig {
    ScenarioConfig::from_value(v).unwrap()
}

fn one_mode(extra: Value) -> Value {
    let mut v = json!({
        "name": "t",
        "system": "one_mode",
        "energy_unit": "eta_a",
        "mode_a": {"kerr": 1, "eta": 1, "drive": [7.0710678118654755, -7.0710678118654755]},
        "truncation": {"a": 16},
        "initial": {"kind": "fock", "n": 0},
        "time": {"t_max": 0.5, "samples": 6}
    });
    for (k, x) in extra.as_object().unwrap() {
        v[k] = x.clone();
    }
    v
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn null_scenario_is_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let c = cfg(json!({
        "system": "one_mode",
        "energy_unit": "g_a_over_10",
        "mode_a": {},
        "truncation": {"a": 6},
        "initial": {"kind": "superposition", "amplitudes": [[1, 0], [0, 1], [0.5, 0]]},
        "time": {"t_max": 1, "samples": 5}
    }));
    let out = run_scenario(&c, tmp.path()).unwrap();
    let first = &out.rows[0].summary;
    for r in &out.rows {
        assert!((r.summary.n_a - first.n_a).abs() < 1e-12);
        assert!((r.summary.purity - 1.0).abs() < 1e-12);
        assert!(r.trace_drift < 1e-12);
    }
    let ts = read(tmp.path(), "timeseries.csv");
    assert!(ts.starts_with("t,n_a,parity_a,entropy,purity,trace_drift\n"));
    assert_eq!(ts.lines().count(), 6);
}

#[test]
fn outputs_are_written_and_deterministic() {
    let v = one_mode(json!({
        "truncation": {"a": 30},
        "steady_state": {"tol": 1e-6},
        "outputs": {
            "wigner": [{"at": [0.25, "steady"], "points": 11}],
            "quadrature": [{"at": ["steady"], "points": 21}, {"at": [0.5], "phi": 0.5, "points": 21}],
            "components": {"at": ["steady"], "k": 2}
        }
    }));
    let c = cfg(v);
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let o1 = run_scenario(&c, d1.path()).unwrap();
    run_scenario(&c, d2.path()).unwrap();
    let expected = [
        "components_steady.json",
        "meta.json",
        "quadrature_a_phi0.5_0.5.csv",
        "quadrature_a_steady.csv",
        "timeseries.csv",
        "wigner_a_0.25.csv",
        "wigner_a_0.25.json",
        "wigner_a_steady.csv",
        "wigner_a_steady.json",
    ];
    assert_eq!(o1.files, expected);
    for f in expected {
        assert_eq!(read(d1.path(), f), read(d2.path(), f), "{f}");
    }
    // 0.25 is off the sample grid: snapshot only, no timeseries row.
    assert_eq!(o1.rows.len(), 6);
    let meta: Value = serde_json::from_str(&read(d1.path(), "meta.json")).unwrap();
    assert_eq!(meta["status"], "complete");
    assert_eq!(meta["columns"]["timeseries"][5], "trace_drift");
    assert!(meta["steady_state"]["residual"].as_f64().unwrap() < 1e-6);
    let comps: Value = serde_json::from_str(&read(d1.path(), "components_steady.json")).unwrap();
    let w0 = comps["modes"]["a"][0]["weight"].as_f64().unwrap();
    assert!(w0 > 0.99, "{w0}");
    let wig = read(d1.path(), "wigner_a_steady.csv");
    assert!(wig.starts_with("re,im,w\n"));
    assert_eq!(wig.lines().count(), 1 + 121);
}

#[test]
fn partial_output_on_integrator_failure() {
    let v = one_mode(json!({"tolerances": {"max_steps": 5, "max_step": 0.01}}));
    let tmp = tempfile::tempdir().unwrap();
    let err = run_scenario(&cfg(v), tmp.path()).unwrap_err();
    assert!(err.is_numerical());
    let meta: Value = serde_json::from_str(&read(tmp.path(), "meta.json")).unwrap();
    assert_eq!(meta["status"], "partial");
    assert!(meta["error"].as_str().unwrap().contains("steps"));
    assert_eq!(read(tmp.path(), "timeseries.csv").lines().count(), 2);
}

#[test]
fn two_mode_columns_and_joint_output() {
    let v = json!({
        "system": "two_mode_linear",
        "energy_unit": "eta_a",
        "mode_a": {"kerr": 1, "eta": 1, "drive": [2, 0], "gamma": 0.5},
        "mode_b": {"kerr": 1, "eta": 1},
        "coupling": 0.5,
        "truncation": {"a": 5, "b": 4},
        "initial": {"kind": "product", "a": {"kind": "fock", "n": 0}, "b": {"kind": "fock", "n": 0}},
        "time": {"t_max": 0.2, "samples": 3},
        "outputs": {
            "wigner": [{"mode": "b", "at": [0.2], "points": 5}],
            "joint_quadrature": [{"at": [0.2], "points": 7}],
            "components": {"at": [0.2]}
        }
    });
    let tmp = tempfile::tempdir().unwrap();
    let out = run_scenario(&cfg(v), tmp.path()).unwrap();
    let ts = read(tmp.path(), "timeseries.csv");
    assert!(ts.starts_with("t,n_a,parity_a,entropy,purity,n_b,negativity,mutual_information,trace_drift\n"));
    assert!(out.files.contains(&"joint_quadrature_0.2.csv".to_string()));
    assert!(out.files.contains(&"wigner_b_0.2.json".to_string()));
    let comps: Value = serde_json::from_str(&read(tmp.path(), "components_0.2.json")).unwrap();
    assert_eq!(comps["modes"]["b"].as_array().unwrap().len(), 2);
}

#[test]
fn sweep_writes_summary() {
    let v = one_mode(json!({
        "truncation": {"a": 12},
        "time": {"t_max": 1, "samples": 3},
        "steady_state": {"tol": 1e-5},
        "sweep": {"parameter": "mode_a.gamma", "values": [0.0, 0.3], "workers": 2}
    }));
    let tmp = tempfile::tempdir().unwrap();
    let out = run_sweep(&cfg(v), tmp.path(), None).unwrap();
    assert_eq!(out.rows.len(), 2);
    assert!(out.rows[0].alpha_abs > out.rows[1].alpha_abs);
    let csv = read(tmp.path(), "sweep.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), SWEEP_COLUMNS.join(","));
    assert!(lines.next().unwrap().starts_with("0.0,"));
    assert!(tmp.path().join("point_1/meta.json").exists());
}

#[test]
fn sweep_points_validate_overrides() {
    let v = one_mode(json!({"sweep": {"parameter": "mode_a.gama", "values": [0.1]}}));
    match sweep_points(&cfg(v)) {
        Err(Error::Config { path, .. }) => assert!(path.starts_with("sweep[0]"), "{path}"),
        other => panic!("{other:?}"),
    }
    let v = one_mode(json!({"sweep": {"points": [{"mode_a.gamma": 0.1, "coupling": 0}]}}));
    let pts = sweep_points(&cfg(v)).unwrap();
    assert_eq!(pts[0].1.mode_a.gamma, 0.1);
    assert!(pts[0].1.sweep.is_none());
}

#[test]
fn truncation_override() {
    let mut c = cfg(one_mode(json!({})));
    override_truncation(&mut c, "24").unwrap();
    assert_eq!(c.truncation.a, 24);
    assert!(override_truncation(&mut c, "24,8").is_err());
    assert!(override_truncation(&mut c, "x").is_err());
}

#[test]
fn fit_alpha_of_cat() {
    let xi = C64::from_polar(2.5, -0.7);
    let rho = cat_state(xi, CatParity::Even, 40).unwrap().to_density();
    let a = fit_alpha(&rho).unwrap();
    assert!((a.norm() - 2.5).abs() < 1e-3);
    // Fixed up to the ±α ambiguity.
    assert!((a - xi).norm() < 1e-3 || (a + xi).norm() < 1e-3);

    let odd = cat_state(xi, CatParity::Odd, 40).unwrap().to_density();
    assert!((fit_alpha(&odd).unwrap().norm() - 2.5).abs() < 1e-2);
}

#[test]
fn schema_lists_every_top_level_field() {
    let schema: Value = serde_json::from_str(CONFIG_SCHEMA).unwrap();
    let props: Vec<&String> = schema["properties"].as_object().unwrap().keys().collect();
    let full = one_mode(json!({
        "mode_b": null, "coupling": 0, "steady_state": null, "outputs": {}, "sweep": null,
        "tolerances": {}, "output_dir": null, "seed": 1
    }));
    let mut fields: Vec<&String> = full.as_object().unwrap().keys().collect();
    fields.sort();
    let mut props_sorted = props.clone();
    props_sorted.sort();
    assert_eq!(fields, props_sorted);
}
