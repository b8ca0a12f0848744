use std::f64::consts::PI;
use std::io::Write;

use pulseforge::datasets::{dataset_from_table, load_csv, split, synth_circle};
use pulseforge::models::{dataset_loss, CompiledModel, Variant};
use pulseforge::noise::{brisbane_device, brisbane_file, DeviceModel, NoisePolicy};
use pulseforge::training::{random_init, train, train_two_qubit_pipeline, ModelShape, TrainConfig};
use pulseforge::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn infinite_coherence(dev: &DeviceModel) -> DeviceModel {
    let mut out = dev.clone();
    for q in &mut out.qubits {
        q.t1_ns = f64::INFINITY;
        q.t2_ns = f64::INFINITY;
    }
    out
}

#[test]
fn zero_noise_pipeline_is_unitary() {
    let dev = infinite_coherence(&brisbane_device());
    let quiet = NoisePolicy {
        enabled: true,
        depolarizing_override_p: Some(0.0),
        spam_enabled: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..40 {
        let shape = ModelShape {
            variant: if i % 2 == 0 { Variant::Gate } else { Variant::Pulsed },
            n_qubits: 1 + (i / 2) % 2,
            n_layers: 1 + i % 4,
        };
        let params = random_init(shape, &dev, &mut rng);
        let x = [rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)];
        let a = CompiledModel::new(&params, &dev, &quiet).unwrap().forward(x);
        let b = CompiledModel::new(&params, &dev, &NoisePolicy::noiseless()).unwrap().forward(x);
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!((a.purity() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pca_csv_to_trained_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "a,b,c,d,e,label").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let noise: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.05..0.05)).collect();
        let label = u8::from(z > 0.0);
        writeln!(f, "{},{},{},{},{},{label}", z + noise[0], 2.0 * z + noise[1], noise[2], -z + noise[3], 0.5).unwrap();
    }
    drop(f);
    let table = load_csv(&path, true).unwrap();
    assert_eq!(table.n_features(), 5);
    let ds = dataset_from_table(&table).unwrap();
    assert_eq!(ds.len(), 60);
    for x in ds.features() {
        assert!(x.iter().all(|v| v.abs() <= PI + 1e-12));
    }
    // the dominant component carries the label; the rest is noise
    let (pos, neg): (Vec<_>, Vec<_>) = ds.iter().partition(|(_, y)| *y == 1);
    let max_of = |v: &[([f64; 3], u8)]| v.iter().map(|(x, _)| x[0]).fold(f64::NEG_INFINITY, f64::max);
    let min_of = |v: &[([f64; 3], u8)]| v.iter().map(|(x, _)| x[0]).fold(f64::INFINITY, f64::min);
    assert!(min_of(&pos) > max_of(&neg) || min_of(&neg) > max_of(&pos));

    let (tr, te) = split(&ds, 40, 20, 0).unwrap();
    let shape = ModelShape {
        variant: Variant::Pulsed,
        n_qubits: 1,
        n_layers: 2,
    };
    let cfg = TrainConfig {
        epochs: 20,
        ..TrainConfig::default()
    };
    let dev = brisbane_device();
    let r = train(shape, &tr, Some(&te), &dev, &NoisePolicy::device(), &cfg, None).unwrap();
    assert_eq!(r.loss_history.len(), 20);
    assert!(r.loss_history.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.best_loss < r.raw_loss_history[0]);
    assert!((0.0..=1.0).contains(&r.test_accuracy.unwrap()));
}

#[test]
fn pipeline_warm_start_matches_and_improves() {
    let dev = brisbane_device();
    let data = synth_circle(40, 5).unwrap();
    let policy = NoisePolicy::noiseless();
    let cfg = TrainConfig {
        epochs: 5,
        ..TrainConfig::default()
    };
    for variant in [Variant::Gate, Variant::Pulsed] {
        let r = train_two_qubit_pipeline(variant, 2, &data, None, &dev, &policy, &cfg).unwrap();
        let one_final = dataset_loss(&data, &r.one_qubit.params, &dev, &policy).unwrap();
        assert!((r.warm_start_loss - one_final).abs() < 1e-9);
        assert!(r.two_qubit.best_loss <= r.warm_start_loss);
        assert_eq!(r.two_qubit.params.n_qubits, 2);
    }
}

#[test]
fn heavy_depolarizing_washes_out_the_classifier() {
    let dev = brisbane_device();
    let data = synth_circle(60, 9).unwrap();
    let shape = ModelShape {
        variant: Variant::Gate,
        n_qubits: 2,
        n_layers: 3,
    };
    let params = random_init(shape, &dev, &mut ChaCha8Rng::seed_from_u64(1));
    let policy = NoisePolicy::noiseless().with_override(1.0).unwrap();
    let policy = NoisePolicy { enabled: true, ..policy };
    let model = CompiledModel::new(&params, &dev, &policy).unwrap();
    for x in data.features().iter().take(10) {
        let rho = model.forward(*x);
        assert!(rho.purity() < 0.3);
    }
}

#[test]
fn device_file_roundtrip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("dev.json");
    std::fs::write(&good, serde_json::to_string(&brisbane_file()).unwrap()).unwrap();
    assert_eq!(DeviceModel::from_file(&good).unwrap(), brisbane_device());

    let mut bad = brisbane_file();
    bad.qubits[0].t1_us = -1.0;
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    assert!(matches!(DeviceModel::from_file(&bad_path), Err(Error::Device(_))));
    assert!(matches!(DeviceModel::from_file(&dir.path().join("missing.json")), Err(Error::Io(_))));
}
