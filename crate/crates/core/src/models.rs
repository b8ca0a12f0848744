//! Gate-based and pulse-based data re-uploading classifiers.
//!
//! Both models alternate an angle encoding of the 3-feature input with a
//! trainable layer, `U(θ_L)U(x)⋯U(θ₁)U(x)|0⟩`, and read out qubit 1 (index
//! 0) against two trainable orthogonal target states.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::gates::{decompose_controlled_su2, euler_sequence, su2_from_euler, u3_sx_vz_sequence, EulerAngles, NativeKind, NativeOp};
use crate::noise::{
    basis_from_states, post_op_channels, prep_state, readout_probs, DeviceModel, NoiseChannel, NoisePolicy, OpKind,
    Targets,
};
use crate::pulses::{
    conjugate_by_frame, cr_propagator_nominal, flush_in_place, single_qubit_propagator, CrossResonancePulse,
    PulseEnvelope, ScheduleOp, SingleQubitPulse, VirtualZFrame,
};
use crate::qcore::{c, first_qubit_marginal, rx, CMatrix, DensityMatrix, PureState, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Gate,
    Pulsed,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Gate => "gate",
            Variant::Pulsed => "pulsed",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gate" => Ok(Variant::Gate),
            "pulsed" => Ok(Variant::Pulsed),
            other => Err(Error::InvalidParameter(format!("unknown model variant '{other}'"))),
        }
    }
}

/// `|s₀⟩ = cos θ|0⟩ + e^{iφ} sin θ|1⟩`, `|s₁⟩ = −sin θ|0⟩ + e^{iφ} cos θ|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct TargetStateParams {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateLayerParams {
    /// One Euler rotation per qubit.
    pub qubits: Vec<EulerAngles>,
    /// Controlled rotation on qubit 1 controlled by qubit 2.
    pub entangler: Option<EulerAngles>,
}

/// `VZ(ν₁) · U(Ω, γ) · VZ(ν₂)` on one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseBlockParams {
    pub nu1: f64,
    pub nu2: f64,
    /// rad/ns
    pub amplitude: f64,
    pub phase: f64,
}

/// Cross-resonance entangler driven on qubit 2 at qubit 1's frequency.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct CrEntanglerParams {
    /// rad/ns
    pub amplitude: f64,
    pub phase: f64,
    /// rad/ns
    pub detuning: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseLayerParams {
    pub blocks: Vec<PulseBlockParams>,
    pub entangler: Option<CrEntanglerParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "layers", rename_all = "lowercase")]
pub enum Layers {
    Gate(Vec<GateLayerParams>),
    Pulsed(Vec<PulseLayerParams>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_qubits: usize,
    pub layers: Layers,
    pub targets: TargetStateParams,
}

impl ModelParams {
    /// All-zero parameters.
    pub fn zeros(variant: Variant, n_qubits: usize, n_layers: usize) -> Self {
        let two = n_qubits == 2;
        let layers = match variant {
            Variant::Gate => Layers::Gate(
                (0..n_layers)
                    .map(|_| GateLayerParams {
                        qubits: vec![EulerAngles::zero(); n_qubits],
                        entangler: two.then(EulerAngles::zero),
                    })
                    .collect(),
            ),
            Variant::Pulsed => Layers::Pulsed(
                (0..n_layers)
                    .map(|_| PulseLayerParams {
                        blocks: vec![PulseBlockParams::default(); n_qubits],
                        entangler: two.then(CrEntanglerParams::default),
                    })
                    .collect(),
            ),
        };
        ModelParams {
            n_qubits,
            layers,
            targets: TargetStateParams::default(),
        }
    }

    pub fn variant(&self) -> Variant {
        match self.layers {
            Layers::Gate(_) => Variant::Gate,
            Layers::Pulsed(_) => Variant::Pulsed,
        }
    }

    pub fn n_layers(&self) -> usize {
        match &self.layers {
            Layers::Gate(l) => l.len(),
            Layers::Pulsed(l) => l.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits != 1 && self.n_qubits != 2 {
            return Err(Error::InvalidParameter(format!("models have 1 or 2 qubits, got {}", self.n_qubits)));
        }
        if self.n_layers() == 0 {
            return Err(Error::InvalidParameter("a model needs at least one layer".into()));
        }
        let two = self.n_qubits == 2;
        let shape_ok = match &self.layers {
            Layers::Gate(ls) => ls.iter().all(|l| l.qubits.len() == self.n_qubits && l.entangler.is_some() == two),
            Layers::Pulsed(ls) => ls.iter().all(|l| l.blocks.len() == self.n_qubits && l.entangler.is_some() == two),
        };
        if !shape_ok {
            return Err(Error::InvalidParameter("layer shape does not match the qubit count".into()));
        }
        Ok(())
    }

    fn expect_variant(&self, v: Variant) -> Result<()> {
        if self.variant() == v {
            Ok(())
        } else {
            Err(Error::VariantMismatch {
                expected: v.to_string(),
                got: self.variant().to_string(),
            })
        }
    }
}

/// `RZ(x₁) RY(x₂) RZ(x₃)`.
pub fn encode(x: [f64; 3]) -> CMatrix {
    su2_from_euler(EulerAngles::from_array(x))
}

pub fn target_state(label: u8, t: TargetStateParams) -> PureState {
    let (s, co) = t.theta.sin_cos();
    let e = C64::from_polar(1.0, t.phi);
    let amps = if label == 0 {
        vec![c(co, 0.0), e * s]
    } else {
        vec![c(-s, 0.0), e * co]
    };
    PureState::new(amps).expect("target states are normalized")
}

/// Columns `|s₀⟩`, `|s₁⟩`.
pub fn target_basis(t: TargetStateParams) -> CMatrix {
    basis_from_states(&target_state(0, t), &target_state(1, t))
}

/// Pulse-level schedule of a block on `qubit`: VZ(ν₂), the resonant pulse
/// for the device's single-qubit time, VZ(ν₁).
pub fn pulse_block(b: &PulseBlockParams, qubit: usize, dev: &DeviceModel) -> Result<Vec<ScheduleOp>> {
    Ok(vec![
        ScheduleOp::Vz { qubit, angle: b.nu2 },
        ScheduleOp::Pulse(SingleQubitPulse::resonant(qubit, b.amplitude, b.phase, dev.oneq_duration_ns(qubit))?),
        ScheduleOp::Vz { qubit, angle: b.nu1 },
    ])
}

/// Block realizing `RZ(θ₁) RY(θ₂) RZ(θ₃)`.
pub fn pulse_block_from_euler(a: EulerAngles, qubit: usize, dev: &DeviceModel) -> PulseBlockParams {
    PulseBlockParams {
        nu1: a.theta1,
        nu2: a.theta3,
        amplitude: a.theta2 / dev.oneq_duration_ns(qubit),
        phase: FRAC_PI_2,
    }
}

/// Entangler pulse: control qubit 2 (index 1), target qubit 1 (index 0).
pub fn entangler_pulse(e: &CrEntanglerParams, dev: &DeviceModel) -> Result<CrossResonancePulse> {
    CrossResonancePulse::new(1, 0, e.amplitude, e.phase, e.detuning, dev.twoq_duration_ns, PulseEnvelope::Constant)
}

/// One step of a lowered program.
#[derive(Clone, Debug)]
enum Step {
    /// Placeholder for the data encoding on every qubit.
    Encode,
    Vz { qubit: usize, angle: f64 },
    /// Physical single-qubit op, nominal (zero-frame) matrix.
    OneQ {
        qubit: usize,
        u: CMatrix,
        channels: Vec<(NoiseChannel, Targets)>,
    },
    /// Physical two-qubit op, nominal matrix in register order.
    TwoQ {
        u: CMatrix,
        channels: Vec<(NoiseChannel, Targets)>,
    },
}

/// A parameter set lowered to a fixed program; encodings are filled in per
/// sample.
#[derive(Clone, Debug)]
pub struct CompiledModel {
    n_qubits: usize,
    steps: Vec<Step>,
    sx: Vec<(CMatrix, Vec<(NoiseChannel, Targets)>)>,
    rho0: DensityMatrix,
    basis: CMatrix,
    dev: DeviceModel,
    policy: NoisePolicy,
}

impl CompiledModel {
    pub fn new(params: &ModelParams, dev: &DeviceModel, policy: &NoisePolicy) -> Result<Self> {
        params.validate()?;
        policy.validate()?;
        if dev.qubits.len() < params.n_qubits {
            return Err(Error::Device(format!(
                "model needs {} qubits, device has {}",
                params.n_qubits,
                dev.qubits.len()
            )));
        }
        let n = params.n_qubits;
        let mut steps = Vec::new();
        let native = |ops: Vec<NativeOp>, steps: &mut Vec<Step>| {
            for op in ops {
                steps.push(match op.kind {
                    NativeKind::RzVirtual => Step::Vz {
                        qubit: op.qubits[0],
                        angle: op.params[0],
                    },
                    _ if op.is_two_qubit() => Step::TwoQ {
                        u: op.local_unitary(),
                        channels: post_op_channels(OpKind::TwoQubit, op.duration_ns, &op.qubits, dev, policy),
                    },
                    _ => Step::OneQ {
                        qubit: op.qubits[0],
                        u: op.local_unitary(),
                        channels: post_op_channels(op.op_kind(), op.duration_ns, &op.qubits, dev, policy),
                    },
                });
            }
        };
        match &params.layers {
            Layers::Gate(layers) => {
                for layer in layers {
                    steps.push(Step::Encode);
                    for (q, a) in layer.qubits.iter().enumerate() {
                        native(euler_sequence(*a, q, dev), &mut steps);
                    }
                    if let Some(e) = layer.entangler {
                        native(decompose_controlled_su2(e, dev), &mut steps);
                    }
                }
            }
            Layers::Pulsed(layers) => {
                let zero = VirtualZFrame::zero(1);
                for layer in layers {
                    steps.push(Step::Encode);
                    for (q, b) in layer.blocks.iter().enumerate() {
                        for op in pulse_block(b, q, dev)? {
                            match op {
                                ScheduleOp::Vz { qubit, angle } => steps.push(Step::Vz { qubit, angle }),
                                ScheduleOp::Pulse(p) => {
                                    let u = single_qubit_propagator(&SingleQubitPulse { qubit: 0, ..p.clone() }, &zero);
                                    steps.push(Step::OneQ {
                                        qubit: p.qubit,
                                        u,
                                        channels: post_op_channels(OpKind::OneQubitPulse, p.duration_ns, &[p.qubit], dev, policy),
                                    });
                                }
                                ScheduleOp::CrossResonance(_) => unreachable!("pulse blocks are single-qubit"),
                            }
                        }
                    }
                    if let Some(e) = &layer.entangler {
                        let p = entangler_pulse(e, dev)?;
                        steps.push(Step::TwoQ {
                            u: cr_propagator_nominal(&p, dev),
                            channels: post_op_channels(OpKind::TwoQubit, p.duration_ns, &[p.control, p.target], dev, policy),
                        });
                    }
                }
            }
        }
        let sx = (0..n)
            .map(|q| {
                let op = NativeOp::sx(q, dev);
                (rx(FRAC_PI_2), post_op_channels(op.op_kind(), op.duration_ns, &[q], dev, policy))
            })
            .collect();
        Ok(CompiledModel {
            n_qubits: n,
            steps,
            sx,
            rho0: prep_state(dev, n, policy),
            basis: target_basis(params.targets),
            dev: dev.clone(),
            policy: *policy,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Final register state for input `x`, frames flushed.
    pub fn forward(&self, x: [f64; 3]) -> DensityMatrix {
        let mut rho = self.rho0.clone();
        let mut frames = VirtualZFrame::zero(self.n_qubits);
        for step in &self.steps {
            match step {
                Step::Encode => {
                    for q in 0..self.n_qubits {
                        let seq = u3_sx_vz_sequence(x[1], x[0], x[2], q, &self.dev);
                        for op in &seq {
                            if op.kind == NativeKind::RzVirtual {
                                frames.shift(q, op.params[0]);
                            } else {
                                let (u, channels) = &self.sx[q];
                                apply_1q(&mut rho, &frames, q, u, channels);
                            }
                        }
                    }
                }
                Step::Vz { qubit, angle } => frames.shift(*qubit, *angle),
                Step::OneQ { qubit, u, channels } => apply_1q(&mut rho, &frames, *qubit, u, channels),
                Step::TwoQ { u, channels } => {
                    rho.apply_full_in_place(&conjugate_by_frame(u, &frames));
                    for (ch, t) in channels {
                        ch.apply_in_place(&mut rho, *t);
                    }
                }
            }
        }
        flush_in_place(&mut rho, &mut frames);
        rho
    }

    /// `(P(s₀), P(s₁))` on qubit 1, after readout errors when SPAM is on.
    pub fn readout(&self, rho: &DensityMatrix) -> (f64, f64) {
        let rho1 = if rho.n_qubits() == 1 { rho.clone() } else { first_qubit_marginal(rho) };
        readout_probs(&rho1, &self.basis, &self.dev, 0, &self.policy).expect("single-qubit marginal")
    }

    pub fn sample_loss(&self, x: [f64; 3], label: u8) -> f64 {
        let (p0, p1) = self.readout(&self.forward(x));
        let f = if label == 0 { p0 } else { p1 };
        (1.0 - f).powi(2)
    }

    pub fn predict(&self, x: [f64; 3]) -> u8 {
        let (p0, p1) = self.readout(&self.forward(x));
        u8::from(p1 > p0)
    }

    /// Mean loss, summed in sample order.
    pub fn dataset_loss(&self, ds: &Dataset) -> Result<f64> {
        if ds.is_empty() {
            return Err(Error::Data("dataset is empty".into()));
        }
        let total: f64 = ds.iter().map(|(x, y)| self.sample_loss(x, y)).sum();
        Ok(total / ds.len() as f64)
    }

    pub fn accuracy(&self, ds: &Dataset) -> Result<f64> {
        if ds.is_empty() {
            return Err(Error::Data("dataset is empty".into()));
        }
        let hits = ds.iter().filter(|&(x, y)| self.predict(x) == y).count();
        Ok(hits as f64 / ds.len() as f64)
    }
}

// A physical op executed in the current frame: RZ(−φ) U RZ(φ).
fn apply_1q(rho: &mut DensityMatrix, frames: &VirtualZFrame, qubit: usize, u: &CMatrix, channels: &[(NoiseChannel, Targets)]) {
    let phi = frames.phase(qubit);
    if phi == 0.0 {
        rho.apply_1q_in_place(u, qubit);
    } else {
        let w = C64::from_polar(1.0, phi);
        let mut v = u.clone();
        v[(0, 1)] *= w;
        v[(1, 0)] *= w.conj();
        rho.apply_1q_in_place(&v, qubit);
    }
    for (ch, t) in channels {
        ch.apply_in_place(rho, *t);
    }
}

pub fn gate_forward(x: [f64; 3], params: &ModelParams, dev: &DeviceModel, policy: &NoisePolicy) -> Result<DensityMatrix> {
    params.expect_variant(Variant::Gate)?;
    Ok(CompiledModel::new(params, dev, policy)?.forward(x))
}

pub fn pulsed_forward(x: [f64; 3], params: &ModelParams, dev: &DeviceModel, policy: &NoisePolicy) -> Result<DensityMatrix> {
    params.expect_variant(Variant::Pulsed)?;
    Ok(CompiledModel::new(params, dev, policy)?.forward(x))
}

/// `(1 − F)²` with `F` the (readout-adjusted) probability of the label's
/// target state on qubit 1.
pub fn sample_loss(
    rho_final: &DensityMatrix,
    label: u8,
    targets: TargetStateParams,
    dev: &DeviceModel,
    policy: &NoisePolicy,
) -> Result<f64> {
    let (p0, p1) = readout_on_first(rho_final, targets, dev, policy)?;
    let f = if label == 0 { p0 } else { p1 };
    Ok((1.0 - f).powi(2))
}

/// Label of the more likely target state; ties go to 0.
pub fn predict(rho_final: &DensityMatrix, targets: TargetStateParams, dev: &DeviceModel, policy: &NoisePolicy) -> Result<u8> {
    let (p0, p1) = readout_on_first(rho_final, targets, dev, policy)?;
    Ok(u8::from(p1 > p0))
}

fn readout_on_first(
    rho: &DensityMatrix,
    targets: TargetStateParams,
    dev: &DeviceModel,
    policy: &NoisePolicy,
) -> Result<(f64, f64)> {
    let rho1 = if rho.n_qubits() == 1 { rho.clone() } else { first_qubit_marginal(rho) };
    readout_probs(&rho1, &target_basis(targets), dev, 0, policy)
}

pub fn dataset_loss(ds: &Dataset, params: &ModelParams, dev: &DeviceModel, policy: &NoisePolicy) -> Result<f64> {
    CompiledModel::new(params, dev, policy)?.dataset_loss(ds)
}

pub fn accuracy(ds: &Dataset, params: &ModelParams, dev: &DeviceModel, policy: &NoisePolicy) -> Result<f64> {
    CompiledModel::new(params, dev, policy)?.accuracy(ds)
}

/// Noiseless unitary of one trainable single-qubit layer on qubit 0.
pub fn single_qubit_layer_unitary(params: &ModelParams, layer: usize, dev: &DeviceModel) -> Result<CMatrix> {
    match &params.layers {
        Layers::Gate(ls) => Ok(su2_from_euler(ls[layer].qubits[0])),
        Layers::Pulsed(ls) => {
            let ops = pulse_block(&ls[layer].blocks[0], 0, dev)?;
            Ok(crate::pulses::schedule_unitary(&ops, 1, dev))
        }
    }
}
