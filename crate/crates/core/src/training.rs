//! Finite-difference gradients, Adam, the training loop and the one- to
//! two-qubit warm start.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::gates::EulerAngles;
use crate::models::{
    CompiledModel, CrEntanglerParams, GateLayerParams, Layers, ModelParams, PulseBlockParams, PulseLayerParams,
    TargetStateParams, Variant,
};
use crate::noise::{DeviceModel, NoisePolicy};

/// Model family and size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelShape {
    pub variant: Variant,
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl ModelShape {
    pub fn of(params: &ModelParams) -> Self {
        ModelShape {
            variant: params.variant(),
            n_qubits: params.n_qubits,
            n_layers: params.n_layers(),
        }
    }

    fn per_layer(&self) -> usize {
        let local = match self.variant {
            Variant::Gate => 3,
            Variant::Pulsed => 4,
        };
        local * self.n_qubits + if self.n_qubits == 2 { 3 } else { 0 }
    }

    /// Length of the flat parameter vector.
    pub fn param_count(&self) -> usize {
        self.per_layer() * self.n_layers + 2
    }
}

/// Layer by layer: per-qubit parameters (Euler angles, or ν₁, ν₂, Ω, γ),
/// then the entangler (Euler angles, or Ω_cr, γ_cr, δ); the target angles
/// θ, φ come last.
pub fn flatten(params: &ModelParams) -> Vec<f64> {
    let mut v = Vec::with_capacity(ModelShape::of(params).param_count());
    match &params.layers {
        Layers::Gate(ls) => {
            for l in ls {
                for a in &l.qubits {
                    v.extend(a.to_array());
                }
                if let Some(e) = l.entangler {
                    v.extend(e.to_array());
                }
            }
        }
        Layers::Pulsed(ls) => {
            for l in ls {
                for b in &l.blocks {
                    v.extend([b.nu1, b.nu2, b.amplitude, b.phase]);
                }
                if let Some(e) = l.entangler {
                    v.extend([e.amplitude, e.phase, e.detuning]);
                }
            }
        }
    }
    v.extend([params.targets.theta, params.targets.phi]);
    v
}

pub fn unflatten(shape: ModelShape, v: &[f64]) -> Result<ModelParams> {
    if v.len() != shape.param_count() {
        return Err(Error::DimensionMismatch {
            expected: shape.param_count(),
            got: v.len(),
        });
    }
    if shape.n_qubits != 1 && shape.n_qubits != 2 {
        return Err(Error::InvalidParameter(format!("models have 1 or 2 qubits, got {}", shape.n_qubits)));
    }
    let two = shape.n_qubits == 2;
    let mut it = v.iter().copied();
    let mut next = || it.next().expect("length checked");
    let layers = match shape.variant {
        Variant::Gate => Layers::Gate(
            (0..shape.n_layers)
                .map(|_| {
                    let qubits = (0..shape.n_qubits)
                        .map(|_| EulerAngles::from_array([next(), next(), next()]))
                        .collect();
                    let entangler = two.then(|| EulerAngles::from_array([next(), next(), next()]));
                    GateLayerParams { qubits, entangler }
                })
                .collect(),
        ),
        Variant::Pulsed => Layers::Pulsed(
            (0..shape.n_layers)
                .map(|_| {
                    let blocks = (0..shape.n_qubits)
                        .map(|_| PulseBlockParams {
                            nu1: next(),
                            nu2: next(),
                            amplitude: next(),
                            phase: next(),
                        })
                        .collect();
                    let entangler = two.then(|| CrEntanglerParams {
                        amplitude: next(),
                        phase: next(),
                        detuning: next(),
                    });
                    PulseLayerParams { blocks, entangler }
                })
                .collect(),
        ),
    };
    let targets = TargetStateParams {
        theta: next(),
        phi: next(),
    };
    Ok(ModelParams {
        n_qubits: shape.n_qubits,
        layers,
        targets,
    })
}

/// Per-coordinate scale that turns every parameter into an angle: pulse
/// amplitudes and detunings are multiplied by their pulse duration.
pub fn param_scales(shape: ModelShape, dev: &DeviceModel) -> Vec<f64> {
    let mut s = Vec::with_capacity(shape.param_count());
    for _ in 0..shape.n_layers {
        match shape.variant {
            Variant::Gate => s.extend(std::iter::repeat_n(1.0, shape.per_layer())),
            Variant::Pulsed => {
                for q in 0..shape.n_qubits {
                    s.extend([1.0, 1.0, dev.oneq_duration_ns(q), 1.0]);
                }
                if shape.n_qubits == 2 {
                    let t = dev.twoq_duration_ns;
                    s.extend([t, 1.0, t]);
                }
            }
        }
    }
    s.extend([1.0, 1.0]);
    s
}

/// Central differences `(f(x + h eᵢ) − f(x − h eᵢ)) / 2h`, coordinates in
/// parallel.
pub fn finite_diff_grad<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(h > 0.0, "finite-difference step must be positive");
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            xp[i] = x[i] + h;
            let fp = f(&xp);
            xp[i] = x[i] - h;
            let fm = f(&xp);
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Batch {
    Full,
    /// A seeded random subset of this size per epoch.
    Size(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    pub fd_step: f64,
    pub seed: u64,
    pub batch: Batch,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            eps_adam: 1e-8,
            fd_step: 1e-4,
            seed: 0,
            batch: Batch::Full,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter("learning rate must be positive".into()));
        }
        if !((0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2)) {
            return Err(Error::InvalidParameter("Adam betas must lie in [0, 1)".into()));
        }
        if matches!(self.batch, Batch::Size(0)) {
            return Err(Error::InvalidParameter("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }
}

/// One bias-corrected Adam step; returns the new state and the update to
/// add to the parameters.
pub fn adam_step(state: &AdamState, grad: &[f64], cfg: &TrainConfig) -> (AdamState, Vec<f64>) {
    let t = state.t + 1;
    let m: Vec<f64> = state.m.iter().zip(grad).map(|(m, g)| cfg.beta1 * m + (1.0 - cfg.beta1) * g).collect();
    let v: Vec<f64> = state.v.iter().zip(grad).map(|(v, g)| cfg.beta2 * v + (1.0 - cfg.beta2) * g * g).collect();
    let c1 = 1.0 - cfg.beta1.powi(t as i32);
    let c2 = 1.0 - cfg.beta2.powi(t as i32);
    let update = m
        .iter()
        .zip(&v)
        .map(|(m, v)| -cfg.learning_rate * (m / c1) / ((v / c2).sqrt() + cfg.eps_adam))
        .collect();
    (AdamState { m, v, t }, update)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub shape: ModelShape,
    /// Lowest training loss seen up to and including each epoch.
    pub loss_history: Vec<f64>,
    /// Training loss of the parameters at the start of each epoch.
    pub raw_loss_history: Vec<f64>,
    pub best_loss: f64,
    /// Parameters with the lowest training loss.
    pub params: ModelParams,
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
    pub wall_time_s: f64,
}

/// Uniform angles in `[−π, π]`, amplitudes in `[0, 2π/T]` and CR detunings
/// in `[−π/T, π/T]`.
pub fn random_init(shape: ModelShape, dev: &DeviceModel, rng: &mut impl Rng) -> ModelParams {
    let scales = param_scales(shape, dev);
    let zero = ModelParams::zeros(shape.variant, shape.n_qubits, shape.n_layers);
    let kinds = coordinate_kinds(&zero);
    let v: Vec<f64> = kinds
        .iter()
        .zip(&scales)
        .map(|(k, s)| match k {
            Coord::Angle => rng.gen_range(-PI..=PI),
            Coord::Amplitude => rng.gen_range(0.0..=2.0 * PI) / s,
            Coord::Detuning => rng.gen_range(-PI..=PI) / s,
        })
        .collect();
    unflatten(shape, &v).expect("shape-consistent vector")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Coord {
    Angle,
    Amplitude,
    Detuning,
}

fn coordinate_kinds(params: &ModelParams) -> Vec<Coord> {
    let shape = ModelShape::of(params);
    let mut k = Vec::with_capacity(shape.param_count());
    for _ in 0..shape.n_layers {
        match shape.variant {
            Variant::Gate => k.extend(std::iter::repeat_n(Coord::Angle, shape.per_layer())),
            Variant::Pulsed => {
                for _ in 0..shape.n_qubits {
                    k.extend([Coord::Angle, Coord::Angle, Coord::Amplitude, Coord::Angle]);
                }
                if shape.n_qubits == 2 {
                    k.extend([Coord::Amplitude, Coord::Angle, Coord::Detuning]);
                }
            }
        }
    }
    k.extend([Coord::Angle, Coord::Angle]);
    k
}

/// Full-batch (by default) Adam on the dataset loss, returning the
/// parameters with the lowest training loss.
pub fn train(
    shape: ModelShape,
    train_set: &Dataset,
    test_set: Option<&Dataset>,
    dev: &DeviceModel,
    policy: &NoisePolicy,
    cfg: &TrainConfig,
    init: Option<ModelParams>,
) -> Result<TrainReport> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = match init {
        Some(p) => {
            if ModelShape::of(&p) != shape {
                return Err(Error::VariantMismatch {
                    expected: format!("{shape:?}"),
                    got: format!("{:?}", ModelShape::of(&p)),
                });
            }
            p
        }
        None => random_init(shape, dev, &mut rng),
    };
    // Check the model compiles before entering the parallel loop.
    CompiledModel::new(&init, dev, policy)?;

    let scales = param_scales(shape, dev);
    let to_params = |u: &[f64]| -> ModelParams {
        let raw: Vec<f64> = u.iter().zip(&scales).map(|(a, s)| a / s).collect();
        unflatten(shape, &raw).expect("shape-consistent vector")
    };
    let loss_on = |u: &[f64], ds: &Dataset| -> f64 {
        CompiledModel::new(&to_params(u), dev, policy)
            .and_then(|m| m.dataset_loss(ds))
            .unwrap_or(f64::INFINITY)
    };

    let mut u: Vec<f64> = flatten(&init).iter().zip(&scales).map(|(a, s)| a * s).collect();
    let mut adam = AdamState::new(u.len());
    let mut best = (f64::INFINITY, u.clone());
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    let mut raw_loss_history = Vec::with_capacity(cfg.epochs);
    let all: Vec<usize> = (0..train_set.len()).collect();
    for _ in 0..cfg.epochs {
        let loss = loss_on(&u, train_set);
        raw_loss_history.push(loss);
        if loss < best.0 {
            best = (loss, u.clone());
        }
        loss_history.push(best.0);

        let batch = match cfg.batch {
            Batch::Full => None,
            Batch::Size(n) if n >= train_set.len() => None,
            Batch::Size(n) => {
                let idx: Vec<usize> = rand::seq::index::sample(&mut rng, all.len(), n).into_vec();
                Some(train_set.subset(&idx))
            }
        };
        let ds = batch.as_ref().unwrap_or(train_set);
        let grad = finite_diff_grad(|v| loss_on(v, ds), &u, cfg.fd_step);
        let (next, step) = adam_step(&adam, &grad, cfg);
        adam = next;
        u.iter_mut().zip(&step).for_each(|(x, d)| *x += d);
    }
    let final_loss = loss_on(&u, train_set);
    if final_loss < best.0 {
        best = (final_loss, u);
    }

    let params = to_params(&best.1);
    let model = CompiledModel::new(&params, dev, policy)?;
    Ok(TrainReport {
        shape,
        loss_history,
        raw_loss_history,
        best_loss: best.0,
        train_accuracy: model.accuracy(train_set)?,
        test_accuracy: test_set.map(|t| model.accuracy(t)).transpose()?,
        params,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Two-qubit parameters from a trained one-qubit model: qubit 1 copied,
/// qubit 2 random, entanglers zero, targets copied.
pub fn warm_start_two_qubit(trained_1q: &ModelParams, seed: u64, dev: &DeviceModel) -> Result<ModelParams> {
    if trained_1q.n_qubits != 1 {
        return Err(Error::VariantMismatch {
            expected: "1-qubit model".into(),
            got: format!("{}-qubit model", trained_1q.n_qubits),
        });
    }
    let shape = ModelShape {
        n_qubits: 2,
        ..ModelShape::of(trained_1q)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fresh = random_init(shape, dev, &mut rng);
    let layers = match (&trained_1q.layers, fresh.layers) {
        (Layers::Gate(old), Layers::Gate(new)) => Layers::Gate(
            old.iter()
                .zip(new)
                .map(|(o, n)| GateLayerParams {
                    qubits: vec![o.qubits[0], n.qubits[1]],
                    entangler: Some(EulerAngles::zero()),
                })
                .collect(),
        ),
        (Layers::Pulsed(old), Layers::Pulsed(new)) => Layers::Pulsed(
            old.iter()
                .zip(new)
                .map(|(o, n)| PulseLayerParams {
                    blocks: vec![o.blocks[0], n.blocks[1]],
                    entangler: Some(CrEntanglerParams::default()),
                })
                .collect(),
        ),
        _ => unreachable!("fresh parameters share the variant"),
    };
    Ok(ModelParams {
        n_qubits: 2,
        layers,
        targets: trained_1q.targets,
    })
}

/// One-qubit training, warm start, two-qubit training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub one_qubit: TrainReport,
    pub two_qubit: TrainReport,
    /// Two-qubit training loss at the warm-started initial point.
    pub warm_start_loss: f64,
}

pub fn train_two_qubit_pipeline(
    variant: Variant,
    n_layers: usize,
    train_set: &Dataset,
    test_set: Option<&Dataset>,
    dev: &DeviceModel,
    policy: &NoisePolicy,
    cfg: &TrainConfig,
) -> Result<PipelineReport> {
    let shape1 = ModelShape {
        variant,
        n_qubits: 1,
        n_layers,
    };
    let one = train(shape1, train_set, test_set, dev, policy, cfg, None)?;
    let init = warm_start_two_qubit(&one.params, cfg.seed.wrapping_add(1), dev)?;
    let warm_start_loss = CompiledModel::new(&init, dev, policy)?.dataset_loss(train_set)?;
    let shape2 = ModelShape { n_qubits: 2, ..shape1 };
    let two = train(shape2, train_set, test_set, dev, policy, cfg, Some(init))?;
    Ok(PipelineReport {
        one_qubit: one,
        two_qubit: two,
        warm_start_loss,
    })
}
