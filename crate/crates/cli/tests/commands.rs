use std::fs;
use std::path::Path;

use pulseforge::noise::{brisbane_device, brisbane_file, DeviceModel};
use pulseforge_cli::commands::DeviceReport;
use pulseforge_cli::run;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pulseforge(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("pulseforge").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("cfg.json");
    let body = format!(
        r#"{{
  "n_qubits": 1,
  "dataset": {{"kind": "circle", "n_samples": 40, "data_seed": 3}},
  "split": {{"n_train": 24, "n_test": 16}},
  "train": {{"epochs": 3}},
  "out_dir": "{}"{extra}
}}"#,
        dir.join("out").display()
    );
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn train_writes_report_history_and_params() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let o = pulseforge(&["train", "--config", &cfg, "--variant", "gate", "--layers", "2"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let stem = dir.path().join("out/train_gate_q1_L2_seed0");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(stem.with_file_name("train_gate_q1_L2_seed0_report.json")).unwrap())
            .unwrap();
    assert!(report["train_acc"].is_number());
    assert!(report["test_acc"].is_number());
    assert_eq!(report["config"]["layers"], serde_json::json!([2]));
    let csv = fs::read_to_string(stem.with_file_name("train_gate_q1_L2_seed0_loss.csv")).unwrap();
    assert!(csv.starts_with("stage,epoch,loss,raw_loss\n"));
    assert_eq!(csv.lines().count(), 4);
    assert!(stem.with_file_name("train_gate_q1_L2_seed0_params.json").exists());

    let first = csv;
    assert_eq!(pulseforge(&["train", "--config", &cfg, "--variant", "gate", "--layers", "2"]).code, 0);
    let second = fs::read_to_string(stem.with_file_name("train_gate_q1_L2_seed0_loss.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn two_qubit_train_runs_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let cfg_text = fs::read_to_string(&cfg).unwrap().replace("\"n_qubits\": 1", "\"n_qubits\": 2");
    fs::write(&cfg, cfg_text).unwrap();
    let o = pulseforge(&["train", "--config", &cfg, "--variant", "pulsed", "--layers", "1"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let out = dir.path().join("out");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("train_pulsed_q2_L1_seed0_report.json")).unwrap()).unwrap();
    assert!(report["warm_start_loss"].is_number());
    assert!(report["one_qubit_train_acc"].is_number());
    let csv = fs::read_to_string(out.join("train_pulsed_q2_L1_seed0_loss.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("1q,")).count(), 3);
    assert_eq!(csv.lines().filter(|l| l.starts_with("2q,")).count(), 3);
}

#[test]
fn missing_csv_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"dataset": {"kind": "csv", "path": "/nonexistent/data.csv"}, "split": {"n_train": 2, "n_test": 2}}"#)
        .unwrap();
    let o = pulseforge(&["train", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("/nonexistent/data.csv"), "{}", o.stderr);
}

#[test]
fn invalid_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    assert_eq!(pulseforge(&["sweep-noise", "--config", &cfg, "--noise-p", "0,1.5"]).code, 2);
    assert_eq!(pulseforge(&["train", "--config", &cfg, "--layers", "0"]).code, 2);
}

#[test]
fn sweep_layers_rows_and_medians() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let o = pulseforge(&["sweep-layers", "--config", &cfg, "--layers", "5,1", "--seed", "4"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let csv = fs::read_to_string(dir.path().join("out/sweep_layers.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "variant,L,seed,train_acc,test_acc");
    let keys: Vec<String> = lines[1..].iter().map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect();
    assert_eq!(keys, vec!["gate,1,4", "gate,5,4", "pulsed,1,4", "pulsed,5,4"]);
    let med = fs::read_to_string(dir.path().join("out/sweep_layers_median.csv")).unwrap();
    assert_eq!(med.lines().count(), 5);
    let runs: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/sweep_layers_runs.json")).unwrap()).unwrap();
    assert_eq!(runs["config"]["seeds"], serde_json::json!([4]));
}

#[test]
fn sweep_noise_echoes_p_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let args = ["sweep-noise", "--config", &cfg, "--noise-p", "0.3,0,0.1", "--seed", "1", "--seed", "0", "--layers", "1"];
    assert_eq!(pulseforge(&args).code, 0);
    let first = fs::read_to_string(dir.path().join("out/sweep_noise.csv")).unwrap();
    let ps: Vec<&str> = first.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ps, vec!["0", "0", "0.1", "0.1", "0.3", "0.3", "0", "0", "0.1", "0.1", "0.3", "0.3"]);
    assert_eq!(pulseforge(&args).code, 0);
    assert_eq!(first, fs::read_to_string(dir.path().join("out/sweep_noise.csv")).unwrap());
}

#[test]
fn verify_passes_on_builtin_device() {
    let o = pulseforge(&["verify"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(o.stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 8);
    assert!(!o.stdout.contains("FAIL"));
}

#[test]
fn verify_reports_a_corrupted_device() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut bad = brisbane_file();
    bad.qubits[0].t1_us = -5.0;
    fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let o = pulseforge(&["verify", "--device", path.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("FAIL device-load"), "{}", o.stdout);
}

#[test]
fn device_shows_table_and_roundtrips() {
    let o = pulseforge(&["device"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("ECR err 0.00431"));
    assert!(o.stdout.contains("gamma(1Q) 1.665279e-3"));
    let json = &o.stdout[o.stdout.find("\n{").unwrap() + 1..];
    let r: DeviceReport = serde_json::from_str(json).unwrap();
    assert_eq!(r.model, brisbane_device());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    fs::write(&path, serde_json::to_string(&r.table).unwrap()).unwrap();
    assert_eq!(DeviceModel::from_file(&path).unwrap(), brisbane_device());
    let again = pulseforge(&["device", "--device", path.to_str().unwrap()]);
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn device_bad_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    fs::write(&path, "{ not json").unwrap();
    assert_eq!(pulseforge(&["device", "--device", path.to_str().unwrap()]).code, 3);
    assert_eq!(pulseforge(&["device", "--device", "/nonexistent.json"]).code, 3);
}

#[test]
fn gen_data_writes_loadable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/circle.csv");
    let o = pulseforge(&["gen-data", "--n-samples", "25", "--seed", "2", "--path", path.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let table = pulseforge::datasets::load_csv(&path, true).unwrap();
    assert_eq!(table.labels.len(), 25);
    assert_eq!(table.n_features(), 3);
}
