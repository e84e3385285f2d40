//! End-to-end tests of the `ionlink` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ionlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionlink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_ok(args: &[&str]) -> String {
    let out = ionlink(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn run_config(cmd: &str, config: &Path, extra: &[&str]) -> String {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    run_ok(&args)
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn ideal_simulation_reaches_the_bell_state() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "ideal.toml", "[protocol]\nmode = \"ideal\"\n");
    let doc: Value = serde_json::from_str(&run_config("simulate", &cfg, &[])).unwrap();
    assert!((doc["fidelity_to_bell"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
    assert!((doc["metrics"]["concurrence"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
    let re = &doc["final_two_ion_state"]["re"];
    assert!((re[1][2].as_f64().unwrap() - 0.5).abs() <= 1e-10);
    assert_eq!(doc["final_two_ion_state"]["basis"][1], "e1g2");
}

#[test]
fn simulation_at_the_bound_reaches_the_classical_limit() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bound.toml",
        "[channel]\ngamma = 200.0\ngamma_p = 0.0\nt_flight = 5.493e-3\ncoherence = \"full-rate\"\n",
    );
    let doc: Value = serde_json::from_str(&run_config("simulate", &cfg, &[])).unwrap();
    let m = &doc["metrics"];
    assert!((m["fef"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert!((m["fef_oracle"].as_f64().unwrap() - m["fef"].as_f64().unwrap()).abs() < 1e-4);
    assert!((m["teleport_fidelity"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-4);
    assert!((doc["closed_form"]["fef"].as_f64().unwrap() - m["fef"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn malformed_config_exits_2_and_names_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.toml", "[channel]\ngamma = 1.0\ndephasing = 2.0\n");
    let out = ionlink(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dephasing"));

    let cfg = write_config(&dir, "syntax.toml", "[channel\n");
    assert_eq!(ionlink(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(ionlink(&["simulate", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));

    let cfg = write_config(&dir, "axis.toml", "[[sweep.axes]]\nparameter = \"speed\"\nstart = 0.0\nstop = 1.0\npoints = 2\n");
    let out = ionlink(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("speed"));
}

#[test]
fn stiff_integration_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "stiff.toml", "[channel]\ngamma = 1e9\nt_flight = 1e-3\n");
    let out = ionlink(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("smaller step"));
}

fn flight_sweep(coherence: &str) -> String {
    format!(
        "[channel]\ngamma = 200.0\ngamma_p = 0.0\ncoherence = \"{coherence}\"\n\
         [oracle]\nenabled = false\n\
         [[sweep.axes]]\nparameter = \"t_flight\"\nstart = 0.0\nstop = 0.01\npoints = 50\n"
    )
}

#[test]
fn flight_time_sweep_traces_the_concurrence_curve() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "sweep.toml", &flight_sweep("full-rate"));
    let (header, rows) = parse_csv(&run_config("sweep", &cfg, &[]));
    assert_eq!(rows.len(), 50);
    let t = column(&header, &rows, "t_flight");
    let c = column(&header, &rows, "concurrence");
    for (t, c) in t.iter().zip(&c) {
        assert!((c - (-200.0 * t).exp()).abs() <= 1e-7, "t = {t}: {c}");
    }
    assert!(rows.iter().all(|r| r[header.iter().position(|h| h == "fef_oracle").unwrap()].is_empty()));
}

#[test]
fn default_convention_decays_coherence_at_half_the_rate() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "sweep.toml", &flight_sweep("lindblad"));
    let (header, rows) = parse_csv(&run_config("sweep", &cfg, &[]));
    let t = column(&header, &rows, "t_flight");
    let c = column(&header, &rows, "concurrence");
    for (t, c) in t.iter().zip(&c) {
        assert!((c - (-100.0 * t).exp()).abs() <= 1e-7, "t = {t}: {c}");
    }
}

#[test]
fn two_axis_sweep_has_one_row_per_point_in_order() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "grid.toml",
        "[oracle]\nsamples = 1000\n\
         [[sweep.axes]]\nparameter = \"gamma\"\nstart = 10.0\nstop = 1000.0\npoints = 10\nscale = \"log\"\n\
         [[sweep.axes]]\nparameter = \"t_flight\"\nstart = 0.0\nstop = 0.005\npoints = 10\n",
    );
    let (header, rows) = parse_csv(&run_config("sweep", &cfg, &[]));
    assert_eq!(rows.len(), 100);
    assert_eq!(&header[..2], &["gamma".to_string(), "t_flight".to_string()]);
    let g = column(&header, &rows, "gamma");
    let t = column(&header, &rows, "t_flight");
    assert_eq!((g[0], t[0]), (10.0, 0.0));
    assert_eq!((g[9], t[9]), (10.0, 0.005));
    assert_eq!((g[99], t[99]), (1000.0, 0.005));
    let fef = column(&header, &rows, "fef");
    let oracle = column(&header, &rows, "fef_oracle");
    assert!(fef.iter().zip(&oracle).all(|(a, b)| (a - b).abs() <= 1e-4));
}

#[test]
fn one_point_sweep_matches_simulate() {
    let dir = TempDir::new().unwrap();
    let base = "[channel]\ngamma = 120.0\ngamma_p = 40.0\nt_flight = 3e-3\n";
    let sim_cfg = write_config(&dir, "sim.toml", base);
    let sweep_cfg = write_config(
        &dir,
        "one.toml",
        &format!("{base}[[sweep.axes]]\nparameter = \"t_flight\"\nstart = 3e-3\nstop = 9.0\npoints = 1\n"),
    );
    let (sim_header, sim_rows) = parse_csv(&run_config("simulate", &sim_cfg, &["--format", "csv"]));
    let (sweep_header, sweep_rows) = parse_csv(&run_config("sweep", &sweep_cfg, &[]));
    assert_eq!(sweep_rows.len(), 1);
    assert_eq!(&sweep_header[1..], &sim_header[..]);
    assert_eq!(&sweep_rows[0][1..], &sim_rows[0][..]);
}

#[test]
fn outputs_are_byte_stable() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "grid.toml",
        "[channel]\ngamma_p = 50.0\n[oracle]\nseed = 3\n\
         [[sweep.axes]]\nparameter = \"gamma\"\nstart = 0.0\nstop = 400.0\npoints = 6\n\
         [[sweep.axes]]\nparameter = \"t_flight\"\nstart = 0.0\nstop = 0.01\npoints = 4\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_config("sweep", &cfg, &["--output", a.to_str().unwrap()]);
    run_config("sweep", &cfg, &["--output", b.to_str().unwrap()]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let sim = write_config(&dir, "sim.toml", "[channel]\ngamma = 80.0\nt_flight = 2e-3\n");
    let first = run_config("simulate", &sim, &["--seed", "11"]);
    assert_eq!(first, run_config("simulate", &sim, &["--seed", "11"]));
    assert!(!first.contains('\r'));
}

#[test]
fn validate_reports_field_insensitivity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "validate.toml",
        "[full_model]\ng_fly = 6.283e4\ndelta = 1.2566e6\nnu = 1.2566e7\neta = 0.05\n\
         fields = [{ kind = \"fock\", n = 0 }, { kind = \"fock\", n = 2 }, { kind = \"thermal\", nbar = 0.5 }]\n",
    );
    let doc: Value = serde_json::from_str(&run_config("validate", &cfg, &[])).unwrap();
    assert_eq!(doc["spread_ok"], true, "{doc}");
    assert_eq!(doc["leakage_ok"], true);
    assert!(doc["frequency_spread"].as_f64().unwrap() <= 0.05);
    assert!(doc["max_vib_leakage"].as_f64().unwrap() <= 1e-3);
    assert!(doc["max_field_energy_variance"].as_f64().is_some());
    assert_eq!(doc["fields"].as_array().unwrap().len(), 3);
}

#[test]
fn validate_without_coupling_flags_no_exchange() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "zero.toml",
        "[full_model]\ng_ion = 0.0\ng_fly = 0.0\ndelta = 1e6\nnu = 1e7\neta = 0.05\nn_field_max = 4\nn_vib_max = 1\n\
         fields = [{ kind = \"fock\", n = 0 }]\n",
    );
    let doc: Value = serde_json::from_str(&run_config("validate", &cfg, &[])).unwrap();
    assert_eq!(doc["no_exchange"], true);
    assert!(doc["fields"][0]["exchange_frequency"].is_null());
    assert!(doc["warnings"].to_string().contains("no exchange"));

    let cfg = write_config(&dir, "none.toml", "");
    assert_eq!(ionlink(&["validate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bounds_examples() {
    let doc: Value = serde_json::from_str(&run_ok(&["bounds", "--gamma", "200", "--gamma-p", "0", "--velocity", "300"])).unwrap();
    let b = &doc["bounds"][0];
    assert!((b["t_max"].as_f64().unwrap() - 5.493e-3).abs() < 5e-7);
    assert!((b["distance_max"].as_f64().unwrap() - 1.648).abs() < 5e-4);

    let doc: Value = serde_json::from_str(&run_ok(&["bounds", "--gamma", "200", "--gamma-p", "200"])).unwrap();
    let t = doc["bounds"][0]["t_max"].as_f64().unwrap();
    assert!((t / (2f64.ln() / 200.0) - 1.0).abs() < 1e-10);

    let doc: Value = serde_json::from_str(&run_ok(&["bounds", "--gamma", "0", "--velocity", "42"])).unwrap();
    assert_eq!(doc["bounds"][0]["t_max"], "inf");
    assert_eq!(doc["bounds"][0]["distance_max"], "inf");

    let (header, rows) = parse_csv(&run_ok(&["bounds", "--gamma", "100,200", "--gamma-p", "0,50,100", "--format", "csv"]));
    assert_eq!(rows.len(), 6);
    assert_eq!(header[0], "gamma");

    assert_eq!(ionlink(&["bounds", "--gamma", "-1"]).status.code(), Some(2));
}

/// Column names listed in the README table that follows `heading`.
fn readme_columns(heading: &str) -> Vec<String> {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let start = readme.find(heading).unwrap_or_else(|| panic!("README lacks `{heading}`"));
    readme[start..]
        .lines()
        .skip_while(|l| !l.starts_with('|'))
        .take_while(|l| l.starts_with('|'))
        .skip(2)
        .map(|l| l.split('|').nth(1).unwrap().trim().trim_matches('`').to_string())
        .collect()
}

#[test]
fn readme_documents_the_emitted_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "cols.toml",
        "[[sweep.axes]]\nparameter = \"gamma\"\nstart = 0.0\nstop = 1.0\npoints = 2\n",
    );
    let (sweep_header, _) = parse_csv(&run_config("sweep", &cfg, &[]));
    let documented = readme_columns("### Sweep and simulate CSV columns");
    assert_eq!(documented[0], "<parameter>");
    assert_eq!(&sweep_header[1..], &documented[1..]);
    let (sim_header, _) = parse_csv(&run_config("simulate", &cfg, &["--format", "csv"]));
    assert_eq!(sim_header, documented[1..]);

    let (bounds_header, _) = parse_csv(&run_ok(&["bounds", "--gamma", "1", "--format", "csv"]));
    assert_eq!(bounds_header, readme_columns("### Bounds CSV columns"));
}

#[test]
fn shipped_flight_sweep_crosses_one_half_at_ln3_over_gamma() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/flight-sweep.toml");
    let (header, rows) = parse_csv(&run_config("sweep", &path, &[]));
    let t = column(&header, &rows, "t_flight");
    let fef = column(&header, &rows, "fef");
    let t_max = 3f64.ln() / 200.0;
    for (t, f) in t.iter().zip(&fef) {
        assert_eq!(*f >= 0.5, *t <= t_max, "t = {t}, fef = {f}");
    }
}

#[test]
fn shipped_validation_scenario_passes() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/validate.toml");
    let report: Value = serde_json::from_str(&run_config("validate", &path, &[])).unwrap();
    assert_eq!(report["fields"].as_array().unwrap().len(), 3);
    for flag in ["deviation_ok", "spread_ok", "leakage_ok", "transfer_ok"] {
        assert_eq!(report[flag], Value::Bool(true), "{flag}");
    }
}
