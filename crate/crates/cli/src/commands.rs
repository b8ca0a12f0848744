//! Subcommand implementations. Each writes its files under the configured
//! output directory and a short summary to `out`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pulseforge::datasets::{split, synth_circle, Dataset};
use pulseforge::models::Variant;
use pulseforge::noise::{
    brisbane_file, damping_params, estimate_depolarizing_p, rad_per_ns_to_ghz, DeviceFile, DeviceModel, NoisePolicy,
};
use pulseforge::training::{train, train_two_qubit_pipeline, ModelShape, TrainReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, BUILTIN_DEVICE};
use crate::error::CliError;

/// Result of one training run: a single model, or the one-qubit to
/// two-qubit pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub variant: Variant,
    pub n_layers: usize,
    pub seed: u64,
    pub depolarizing_p: Option<f64>,
    pub train_acc: f64,
    pub test_acc: f64,
    /// Present for two-qubit runs.
    pub one_qubit: Option<TrainReport>,
    pub warm_start_loss: Option<f64>,
    pub model: TrainReport,
}

pub fn run_once(
    cfg: &ExperimentConfig,
    variant: Variant,
    n_layers: usize,
    seed: u64,
    policy: &NoisePolicy,
    data: &Dataset,
    dev: &DeviceModel,
) -> Result<RunResult, CliError> {
    let (train_set, test_set) = split(data, cfg.split.n_train, cfg.split.n_test, seed)?;
    let tc = cfg.train.to_config(seed);
    let (one_qubit, warm_start_loss, model) = if cfg.n_qubits == 2 {
        let r = train_two_qubit_pipeline(variant, n_layers, &train_set, Some(&test_set), dev, policy, &tc)?;
        (Some(r.one_qubit), Some(r.warm_start_loss), r.two_qubit)
    } else {
        let shape = ModelShape {
            variant,
            n_qubits: 1,
            n_layers,
        };
        (None, None, train(shape, &train_set, Some(&test_set), dev, policy, &tc, None)?)
    };
    Ok(RunResult {
        variant,
        n_layers,
        seed,
        depolarizing_p: policy.depolarizing_override_p,
        train_acc: model.train_accuracy,
        test_acc: model.test_accuracy.unwrap_or(f64::NAN),
        one_qubit,
        warm_start_loss,
        model,
    })
}

fn out_dir(cfg: &ExperimentConfig) -> Result<&Path, CliError> {
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", cfg.out_dir.display())))?;
    Ok(&cfg.out_dir)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn loss_csv(r: &RunResult) -> String {
    let mut s = String::from("stage,epoch,loss,raw_loss\n");
    let stages = r
        .one_qubit
        .iter()
        .map(|one| ("1q", one))
        .chain(std::iter::once((if r.one_qubit.is_some() { "2q" } else { "1q" }, &r.model)));
    for (stage, rep) in stages {
        for (i, (best, raw)) in rep.loss_history.iter().zip(&rep.raw_loss_history).enumerate() {
            let _ = writeln!(s, "{stage},{},{best},{raw}", i + 1);
        }
    }
    s
}

#[derive(Serialize)]
struct TrainOutput<'a> {
    config: &'a ExperimentConfig,
    variant: Variant,
    n_qubits: usize,
    n_layers: usize,
    seed: u64,
    train_acc: f64,
    test_acc: f64,
    best_loss: f64,
    warm_start_loss: Option<f64>,
    one_qubit_train_acc: Option<f64>,
    one_qubit_test_acc: Option<f64>,
    wall_time_s: f64,
}

/// Trains every selected variant for every seed at the first layer count.
/// Writes `<stem>_report.json`, `<stem>_loss.csv` and `<stem>_params.json`
/// per run.
pub fn cmd_train(cfg: &ExperimentConfig, out: &mut impl Write) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let dev = cfg.load_device()?;
    let data = cfg.load_dataset()?;
    let dir = out_dir(cfg)?;
    let policy = cfg.noise.policy(None);
    let n_layers = cfg.layers[0];
    let mut written = Vec::new();
    for variant in cfg.variant.variants() {
        for &seed in &cfg.seeds {
            let r = run_once(cfg, variant, n_layers, seed, &policy, &data, &dev)?;
            let stem = format!("train_{variant}_q{}_L{n_layers}_seed{seed}", cfg.n_qubits);
            let report = TrainOutput {
                config: cfg,
                variant,
                n_qubits: cfg.n_qubits,
                n_layers,
                seed,
                train_acc: r.train_acc,
                test_acc: r.test_acc,
                best_loss: r.model.best_loss,
                warm_start_loss: r.warm_start_loss,
                one_qubit_train_acc: r.one_qubit.as_ref().map(|o| o.train_accuracy),
                one_qubit_test_acc: r.one_qubit.as_ref().and_then(|o| o.test_accuracy),
                wall_time_s: r.model.wall_time_s + r.one_qubit.as_ref().map_or(0.0, |o| o.wall_time_s),
            };
            let files = [
                (format!("{stem}_report.json"), serde_json::to_string_pretty(&report)?),
                (format!("{stem}_loss.csv"), loss_csv(&r)),
                (format!("{stem}_params.json"), serde_json::to_string_pretty(&r.model.params)?),
            ];
            for (name, body) in files {
                let path = dir.join(name);
                write_file(&path, &body)?;
                written.push(path);
            }
            writeln!(
                out,
                "{variant} L={n_layers} seed={seed}: train_acc {:.4} test_acc {:.4}",
                r.train_acc, r.test_acc
            )?;
        }
    }
    Ok(written)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Grid point of a sweep: the swept value is either a layer count or a
/// depolarizing probability.
#[derive(Clone, Copy, Debug)]
struct Point {
    variant: Variant,
    n_layers: usize,
    p: Option<f64>,
    seed: u64,
}

fn run_grid(cfg: &ExperimentConfig, points: &[Point]) -> Result<Vec<RunResult>, CliError> {
    let dev = cfg.load_device()?;
    let data = cfg.load_dataset()?;
    points
        .par_iter()
        .map(|pt| {
            let policy = cfg.noise.policy(pt.p);
            run_once(cfg, pt.variant, pt.n_layers, pt.seed, &policy, &data, &dev)
        })
        .collect()
}

/// Rows and per-(variant, key) medians of a finished sweep.
fn sweep_tables(key: &str, rows: &[(Variant, String, u64, f64, f64)]) -> (String, String) {
    let mut full = format!("variant,{key},seed,train_acc,test_acc\n");
    for (v, k, s, tr, te) in rows {
        let _ = writeln!(full, "{v},{k},{s},{tr},{te}");
    }
    let mut med = format!("variant,{key},n_seeds,median_train_acc,median_test_acc\n");
    let mut i = 0;
    while i < rows.len() {
        let j = (i..rows.len())
            .find(|&j| rows[j].0 != rows[i].0 || rows[j].1 != rows[i].1)
            .unwrap_or(rows.len());
        let mut tr: Vec<f64> = rows[i..j].iter().map(|r| r.3).collect();
        let mut te: Vec<f64> = rows[i..j].iter().map(|r| r.4).collect();
        let _ = writeln!(med, "{},{},{},{},{}", rows[i].0, rows[i].1, j - i, median(&mut tr), median(&mut te));
        i = j;
    }
    (full, med)
}

fn write_sweep(
    cfg: &ExperimentConfig,
    name: &str,
    key: &str,
    rows: &[(Variant, String, u64, f64, f64)],
    results: &[RunResult],
) -> Result<Vec<PathBuf>, CliError> {
    let dir = out_dir(cfg)?;
    let (full, med) = sweep_tables(key, rows);
    let files = [
        (format!("{name}.csv"), full),
        (format!("{name}_median.csv"), med),
        (
            format!("{name}_runs.json"),
            serde_json::to_string_pretty(&serde_json::json!({ "config": cfg, "runs": results }))?,
        ),
    ];
    let mut written = Vec::new();
    for (file, body) in files {
        let path = dir.join(file);
        write_file(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}

/// Pipeline accuracy for every (variant, L, seed); rows sorted by
/// (variant, L, seed).
pub fn cmd_sweep_layers(cfg: &ExperimentConfig, out: &mut impl Write) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let mut points = Vec::new();
    for variant in cfg.variant.variants() {
        for &n_layers in &cfg.layers {
            for &seed in &cfg.seeds {
                points.push(Point {
                    variant,
                    n_layers,
                    p: None,
                    seed,
                });
            }
        }
    }
    let mut results = run_grid(cfg, &points)?;
    results.sort_by_key(|r| (r.variant, r.n_layers, r.seed));
    let rows: Vec<_> = results
        .iter()
        .map(|r| (r.variant, r.n_layers.to_string(), r.seed, r.train_acc, r.test_acc))
        .collect();
    let written = write_sweep(cfg, "sweep_layers", "L", &rows, &results)?;
    writeln!(out, "{} runs written to {}", rows.len(), written[0].display())?;
    Ok(written)
}

/// Accuracy for every (variant, p, seed) at the first layer count, with
/// the depolarizing probability overridden to p; rows sorted by
/// (variant, p, seed).
pub fn cmd_sweep_noise(cfg: &ExperimentConfig, out: &mut impl Write) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let n_layers = cfg.layers[0];
    let mut points = Vec::new();
    for variant in cfg.variant.variants() {
        for &p in &cfg.noise.p_grid {
            for &seed in &cfg.seeds {
                points.push(Point {
                    variant,
                    n_layers,
                    p: Some(p),
                    seed,
                });
            }
        }
    }
    let mut results = run_grid(cfg, &points)?;
    results.sort_by(|a, b| {
        a.variant
            .cmp(&b.variant)
            .then(a.depolarizing_p.unwrap_or(0.0).total_cmp(&b.depolarizing_p.unwrap_or(0.0)))
            .then(a.seed.cmp(&b.seed))
    });
    let rows: Vec<_> = results
        .iter()
        .map(|r| (r.variant, r.depolarizing_p.unwrap_or(0.0).to_string(), r.seed, r.train_acc, r.test_acc))
        .collect();
    let written = write_sweep(cfg, "sweep_noise", "p", &rows, &results)?;
    writeln!(out, "{} runs written to {}", rows.len(), written[0].display())?;
    Ok(written)
}

/// Table-unit device description at `source`, as written.
pub fn load_device_file(source: &str) -> Result<DeviceFile, CliError> {
    if source == BUILTIN_DEVICE {
        return Ok(brisbane_file());
    }
    let text = fs::read_to_string(source).map_err(|e| CliError::Data(format!("device {source}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("device {source}: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitDerived {
    /// Amplitude and phase damping over one single-qubit gate.
    pub gamma_1q: f64,
    pub lambda_1q: f64,
    /// Same over the two-qubit gate time.
    pub gamma_2q: f64,
    pub lambda_2q: f64,
    pub depolarizing_p_1q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceDerived {
    pub delta12_rad_per_ns: f64,
    pub delta12_ghz: f64,
    pub coupling_j_rad_per_ns: f64,
    pub mu: f64,
    pub nu: f64,
    pub qubits: Vec<QubitDerived>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceReport {
    pub table: DeviceFile,
    pub model: DeviceModel,
    pub derived: DeviceDerived,
}

pub fn device_report(source: &str) -> Result<DeviceReport, CliError> {
    let table = load_device_file(source)?;
    let model = table
        .clone()
        .into_model()
        .map_err(|e| CliError::Data(format!("device {source}: {e}")))?;
    let qubits = model
        .qubits
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let (gamma_1q, lambda_1q) = damping_params(q.oneq_duration_ns, q.t1_ns, q.t2_ns);
            let (gamma_2q, lambda_2q) = damping_params(model.twoq_duration_ns, q.t1_ns, q.t2_ns);
            QubitDerived {
                gamma_1q,
                lambda_1q,
                gamma_2q,
                lambda_2q,
                depolarizing_p_1q: estimate_depolarizing_p(&model, i),
            }
        })
        .collect();
    let delta = if model.qubits.len() >= 2 { model.delta12() } else { 0.0 };
    let derived = DeviceDerived {
        delta12_rad_per_ns: delta,
        delta12_ghz: rad_per_ns_to_ghz(delta),
        coupling_j_rad_per_ns: model.coupling,
        mu: model.mu,
        nu: model.nu,
        qubits,
    };
    Ok(DeviceReport { table, model, derived })
}

/// Human-readable summary followed by the JSON report.
pub fn cmd_device(source: &str, out: &mut impl Write) -> Result<DeviceReport, CliError> {
    let r = device_report(source)?;
    let t = &r.table;
    writeln!(out, "device {}", t.name)?;
    writeln!(out, "  coupling {} GHz, 2Q time {} ns, ECR err {}", t.coupling_ghz, t.twoq_time_ns, t.ecr_err)?;
    for (i, (q, d)) in t.qubits.iter().zip(&r.derived.qubits).enumerate() {
        writeln!(out, "  qubit {}", i + 1)?;
        writeln!(out, "    T1 {} us, T2 {} us", q.t1_us, q.t2_us)?;
        writeln!(out, "    freq {} GHz, anharmonicity {} GHz", q.freq_ghz, q.anharmonicity_ghz)?;
        writeln!(out, "    1Q time {} ns", q.oneq_time_ns)?;
        writeln!(
            out,
            "    readout err {}, P(0|1) {}, P(1|0) {}",
            q.readout_err, q.p0_given_1, q.p1_given_0
        )?;
        writeln!(out, "    RZ err {}, SX err {}, X err {}", q.rz_err, q.sx_err, q.x_err)?;
        writeln!(
            out,
            "    gamma(1Q) {:.6e}, lambda(1Q) {:.6e}, gamma(2Q) {:.6e}, lambda(2Q) {:.6e}, depolarizing p {}",
            d.gamma_1q, d.lambda_1q, d.gamma_2q, d.lambda_2q, d.depolarizing_p_1q
        )?;
    }
    let d = &r.derived;
    writeln!(
        out,
        "  Delta12 {:.6} rad/ns ({:.4} GHz), J {:.6e} rad/ns, mu {:.6e}, nu {}",
        d.delta12_rad_per_ns, d.delta12_ghz, d.coupling_j_rad_per_ns, d.mu, d.nu
    )?;
    writeln!(out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
    Ok(r)
}

/// Synthetic circle data as CSV.
pub fn cmd_gen_data(n_samples: usize, seed: u64, path: &Path, out: &mut impl Write) -> Result<Dataset, CliError> {
    let ds = synth_circle(n_samples, seed)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    ds.write_csv(path)?;
    writeln!(
        out,
        "{} samples ({:.3} positive) written to {}",
        ds.len(),
        ds.positive_fraction(),
        path.display()
    )?;
    Ok(ds)
}
