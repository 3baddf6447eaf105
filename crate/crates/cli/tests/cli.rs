use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn regnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regnet"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const OSCILLATOR: &str = r#"{
  "graph": { "n": 1, "arrows": [[0, 0]] },
  "a": 0.2,
  "signs": { "0,0": -1 },
  "thresholds": { "0,0": 0.5 },
  "x0": [0.9]
}"#;

#[test]
fn simulate_is_deterministic_and_reports_the_attractor() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    fs::write(&instance, OSCILLATOR).unwrap();
    let run1 = regnet(&["simulate", "--seed", "7", "instance.json"], dir.path());
    let run2 = regnet(&["simulate", "--seed", "7", "instance.json"], dir.path());
    assert!(run1.status.success(), "{}", String::from_utf8_lossy(&run1.stderr));
    assert_eq!(run1.stdout, run2.stdout);

    let report: serde_json::Value = serde_json::from_slice(&run1.stdout).unwrap();
    assert_eq!(report["converged"], true);
    assert_eq!(report["period"], 2);
    assert_eq!(report["osc"]["vertices"], serde_json::json!([0]));
    assert_eq!(report["osc"]["nc"], 1);
    let margin = report["margin"].as_f64().unwrap();
    assert!((margin - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn simulate_without_x0_needs_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    let no_x0 = OSCILLATOR.replace(",\n  \"x0\": [0.9]", "");
    fs::write(&instance, no_x0).unwrap();
    let run = regnet(&["simulate", "instance.json"], dir.path());
    assert_eq!(run.status.code(), Some(1));
    let run = regnet(&["simulate", "--seed", "3", "instance.json"], dir.path());
    assert!(run.status.success());
}

#[test]
fn missing_files_exit_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let run = regnet(&["simulate", "missing.json"], dir.path());
    assert_eq!(run.status.code(), Some(2));
    assert!(!run.stderr.is_empty());
    let run = regnet(&["ensemble", "missing-spec.json"], dir.path());
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn invalid_instance_exits_with_domain_code() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    fs::write(&instance, OSCILLATOR.replace("\"0,0\": -1", "\"0,0\": 3")).unwrap();
    let run = regnet(&["simulate", "instance.json"], dir.path());
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn simulate_trace_writes_orbit_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    fs::write(&instance, OSCILLATOR).unwrap();
    let run = regnet(
        &["simulate", "--trace", "orbit.csv", "--trace-steps", "10", "instance.json"],
        dir.path(),
    );
    assert!(run.status.success());
    let trace = fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,v,x_v"));
    assert_eq!(trace.lines().count(), 1 + 11); // header + one vertex x 11 times
    assert!(dir.path().join("orbit.instance.json").exists());
}

#[test]
fn ensemble_outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = configs_dir().join("er_smoke.json");
    let spec = spec.to_str().unwrap();
    for (threads, out) in [("1", "out1"), ("8", "out8")] {
        let run = regnet(
            &["ensemble", spec, "--threads", threads, "--out", out],
            dir.path(),
        );
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    for file in ["grid.csv", "grid.json", "stats.json"] {
        let a = fs::read(dir.path().join("out1").join(file)).unwrap();
        let b = fs::read(dir.path().join("out8").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between 1 and 8 workers");
    }
    // rerun reproduces byte-identical files
    let run = regnet(
        &["ensemble", spec, "--threads", "8", "--out", "out8b"],
        dir.path(),
    );
    assert!(run.status.success());
    for file in ["grid.csv", "grid.json", "stats.json"] {
        let a = fs::read(dir.path().join("out8").join(file)).unwrap();
        let b = fs::read(dir.path().join("out8b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between reruns");
    }
}

#[test]
fn emit_grid_reproduces_ensemble_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = configs_dir().join("er_smoke.json");
    let run = regnet(
        &["ensemble", spec.to_str().unwrap(), "--threads", "4", "--out", "out"],
        dir.path(),
    );
    assert!(run.status.success());
    let run = regnet(
        &["emit-grid", "out/stats.json", "--out", "regen"],
        dir.path(),
    );
    assert!(run.status.success());
    for file in ["grid.csv", "grid.json"] {
        let a = fs::read(dir.path().join("out").join(file)).unwrap();
        let b = fs::read(dir.path().join("regen").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs after emit-grid roundtrip");
    }
    let csv = fs::read_to_string(dir.path().join("out/grid.csv")).unwrap();
    assert!(csv.starts_with("model,p_or_m,a,eta,tau,count,n_converged,mean_osc_size,mean_nc\n"));
}

#[test]
fn symmetry_check_reports_exact_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{
  "graph_model": { "type": "tree" },
  "n_vertices": 12,
  "a": 0.3,
  "eta": 0.2,
  "instances": 20,
  "max_steps": 20000,
  "root_seed": 5
}"#,
    )
    .unwrap();
    let run = regnet(&["symmetry-check", "spec.json"], dir.path());
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["eta"], 0.2);
    assert_eq!(report["period_hist_match"], true);
    assert_eq!(report["osc_hist_match"], true);
    assert!(report["max_defect"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn modularity_check_verifies_an_embedding() {
    let dir = tempfile::tempdir().unwrap();
    // negative self-loop with one frozen-on input and a spare vertex
    fs::write(
        dir.path().join("witness.json"),
        r#"{
  "graph": { "n": 3, "arrows": [[0, 0], [1, 0]] },
  "a": 0.2,
  "signs": { "0,0": -1, "1,0": -1 },
  "thresholds": { "0,0": 0.7, "1,0": 0.8 },
  "x0": [0.9, 0.5, 0.5]
}"#,
    )
    .unwrap();
    fs::write(
        dir.path().join("module.json"),
        r#"{ "vertices": [0], "arrows": [[0, 0]] }"#,
    )
    .unwrap();
    let run = regnet(
        &["modularity-check", "--samples", "20", "witness.json", "module.json"],
        dir.path(),
    );
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["surjectivity_exact"], true);
    assert_eq!(report["frozen_violations"], 0);
    assert!(report["max_defect"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["phi_v_slopes"], serde_json::json!([2.0]));
    assert_eq!(report["phi_v_constants"], serde_json::json!([-1.0]));
}
