//! Invariant measurements shared by `verify` and the acceptance suite.
//!
//! Each function returns the worst deviation it saw; callers compare it
//! against their own tolerance.

use std::f64::consts::PI;

use pulseforge::datasets::synth_circle;
use pulseforge::gates::{
    cnot_fidelity, cnot_from_cr_blocks, controlled_su2, decompose_controlled_su2, euler_from_su2, sequence_unitary,
    su2_from_euler, u3_sx_vz_sequence, EulerAngles,
};
use pulseforge::models::{dataset_loss, CompiledModel, Variant};
use pulseforge::noise::{
    amplitude_damping, apply_channel, depolarizing_1q, depolarizing_2q, phase_damping, DeviceModel, KrausChannel,
    NoisePolicy, Targets,
};
use pulseforge::pulses::{
    cr_propagator_nominal, schedule_unitary, single_qubit_propagator, CrossResonancePulse, PulseEnvelope,
    ScheduleOp, SingleQubitPulse, VirtualZFrame,
};
use pulseforge::qcore::{embed_1q, global_phase_distance, random, ry, rz, CMatrix};
use pulseforge::training::{random_init, train, warm_start_two_qubit, ModelShape, TrainConfig};
use pulseforge::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CHANNEL_GRID: [f64; 5] = [0.0, 1e-4, 0.01, 0.3, 1.0];

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChannelStats {
    pub completeness: f64,
    pub trace: f64,
    pub hermiticity: f64,
    /// Most negative eigenvalue seen (0 when all outputs are PSD).
    pub min_eigenvalue: f64,
}

/// Every Kraus family at every grid strength, applied to `n_states` random
/// one- and two-qubit density matrices.
pub fn channel_soundness(n_states: usize, seed: u64) -> Result<ChannelStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = ChannelStats::default();
    for &p in &CHANNEL_GRID {
        let families: [(KrausChannel, bool); 4] = [
            (depolarizing_1q(p)?, false),
            (depolarizing_2q(p)?, true),
            (amplitude_damping(p)?, false),
            (phase_damping(p)?, false),
        ];
        for (ch, pair) in &families {
            stats.completeness = stats.completeness.max(ch.completeness_error());
            for i in 0..n_states {
                let (n_qubits, targets) = match (pair, i % 3) {
                    (true, _) => (2, Targets::Pair),
                    (false, 0) => (1, Targets::One(0)),
                    (false, 1) => (2, Targets::One(0)),
                    (false, _) => (2, Targets::One(1)),
                };
                let rho = random::density_matrix(n_qubits, &mut rng);
                let out = apply_channel(&rho, ch, targets)?;
                stats.trace = stats.trace.max((out.trace() - 1.0).abs());
                stats.hermiticity = stats.hermiticity.max(out.matrix().hermiticity_error());
                stats.min_eigenvalue = stats.min_eigenvalue.min(out.min_eigenvalue());
            }
        }
    }
    Ok(stats)
}

fn random_envelope(rng: &mut impl Rng) -> PulseEnvelope {
    if rng.gen_bool(0.5) {
        PulseEnvelope::Constant
    } else {
        let sigma = rng.gen_range(0.15..0.3);
        PulseEnvelope::sampled(rng.gen_range(8..32), |s| (-(s - 0.5).powi(2) / (2.0 * sigma * sigma)).exp())
    }
}

fn random_1q_pulse(rng: &mut impl Rng, envelope: PulseEnvelope) -> Result<SingleQubitPulse> {
    let duration = rng.gen_range(50.0..700.0);
    SingleQubitPulse::new(
        rng.gen_range(0..2),
        rng.gen_range(-3.0 * PI..3.0 * PI) / duration,
        rng.gen_range(-PI..PI),
        rng.gen_range(-0.05..0.05),
        duration,
        envelope,
    )
}

fn random_cr_pulse(rng: &mut impl Rng, envelope: PulseEnvelope) -> Result<CrossResonancePulse> {
    let duration = rng.gen_range(100.0..1000.0);
    let control = rng.gen_range(0..2);
    CrossResonancePulse::new(
        control,
        1 - control,
        rng.gen_range(-3.0 * PI..3.0 * PI) / duration,
        rng.gen_range(-PI..PI),
        rng.gen_range(-0.02..0.02),
        duration,
        envelope,
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PropagatorStats {
    pub unitarity: f64,
    /// Constant pulse of length T against two pulses of length T/2.
    pub composition: f64,
}

/// `n` random single-qubit and `n` random cross-resonance pulses.
pub fn propagator_unitarity(n: usize, dev: &DeviceModel, seed: u64) -> Result<PropagatorStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = PropagatorStats::default();
    let frame = VirtualZFrame::zero(2);
    for _ in 0..n {
        let env = random_envelope(&mut rng);
        let p = random_1q_pulse(&mut rng, env)?;
        stats.unitarity = stats.unitarity.max(single_qubit_propagator(&p, &frame).unitarity_error());
        let env = random_envelope(&mut rng);
        let c = random_cr_pulse(&mut rng, env)?;
        stats.unitarity = stats.unitarity.max(cr_propagator_nominal(&c, dev).unitarity_error());

        let p = random_1q_pulse(&mut rng, PulseEnvelope::Constant)?;
        let half = SingleQubitPulse { duration_ns: p.duration_ns / 2.0, ..p.clone() };
        let h = single_qubit_propagator(&half, &frame);
        let whole = single_qubit_propagator(&p, &frame);
        stats.composition = stats.composition.max(h.matmul(&h).max_abs_diff(&whole));

        let c = random_cr_pulse(&mut rng, PulseEnvelope::Constant)?;
        let half = CrossResonancePulse { duration_ns: c.duration_ns / 2.0, ..c.clone() };
        let h = cr_propagator_nominal(&half, dev);
        stats.composition = stats.composition.max(h.matmul(&h).max_abs_diff(&cr_propagator_nominal(&c, dev)));
    }
    Ok(stats)
}

/// Random two-qubit schedules of virtual Z shifts, single-qubit pulses and
/// cross-resonance pulses: frame tracking with a final flush against the
/// product where every `Vz` is an explicit `RZ` and every pulse runs at its
/// nominal phase.
pub fn vz_equivalence(n: usize, dev: &DeviceModel, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let len = rng.gen_range(2..12);
        let mut ops = Vec::with_capacity(len);
        for _ in 0..len {
            let op = match rng.gen_range(0..3) {
                0 => ScheduleOp::Vz {
                    qubit: rng.gen_range(0..2),
                    angle: rng.gen_range(-2.0 * PI..2.0 * PI),
                },
                1 => {
                    let env = random_envelope(&mut rng);
                    ScheduleOp::Pulse(random_1q_pulse(&mut rng, env)?)
                }
                _ => {
                    let env = random_envelope(&mut rng);
                    ScheduleOp::CrossResonance(random_cr_pulse(&mut rng, env)?)
                }
            };
            ops.push(op);
        }
        let zero = VirtualZFrame::zero(2);
        let mut explicit = CMatrix::identity(4);
        for op in &ops {
            let step = match op {
                ScheduleOp::Vz { qubit, angle } => embed_1q(&rz(*angle), *qubit, 2),
                ScheduleOp::Pulse(p) => embed_1q(&single_qubit_propagator(p, &zero), p.qubit, 2),
                ScheduleOp::CrossResonance(c) => cr_propagator_nominal(c, dev),
            };
            explicit = step.matmul(&explicit);
        }
        worst = worst.max(schedule_unitary(&ops, 2, dev).max_abs_diff(&explicit));
    }
    Ok(worst)
}

pub fn euler_roundtrip(n: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let u = random::su2(&mut rng);
        let e = euler_from_su2(&u)?;
        worst = worst.max(global_phase_distance(&su2_from_euler(e), &u));
    }
    Ok(worst)
}

/// Five-op SX/VZ sequence against `RZ(φ)RY(θ)RZ(λ)`, up to global phase.
pub fn five_op_sequence(n: usize, dev: &DeviceModel, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (t, p, l) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let target = rz(p).matmul(&ry(t)).matmul(&rz(l));
        worst = worst.max(global_phase_distance(&sequence_unitary(&u3_sx_vz_sequence(t, p, l, 0, dev), 1), &target));
    }
    worst
}

fn random_angles(rng: &mut impl Rng) -> EulerAngles {
    EulerAngles::from_array([rng.gen_range(-PI..PI), rng.gen_range(0.0..PI), rng.gen_range(-PI..PI)])
}

/// Native CNOT-based decomposition of a controlled-SU(2) against its dense
/// matrix.
pub fn abc_decomposition(n: usize, dev: &DeviceModel, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let a = random_angles(&mut rng);
        worst = worst.max(global_phase_distance(
            &sequence_unitary(&decompose_controlled_su2(a, dev), 2),
            &controlled_su2(a),
        ));
    }
    worst
}

/// Average gate fidelity of the calibrated CR-based CNOT (control 0,
/// target 1) on a noiseless device.
pub fn cnot_from_cr(dev: &DeviceModel) -> Result<f64> {
    let schedule = cnot_from_cr_blocks(dev)?;
    Ok(cnot_fidelity(&schedule, dev, 0, 1))
}

/// Trains a small one-qubit model briefly, warm-starts the two-qubit model
/// from it and compares the noiseless training losses, `reps` times.
pub fn warm_start_continuity(
    variant: Variant,
    reps: usize,
    epochs: usize,
    dev: &DeviceModel,
    seed: u64,
) -> Result<f64> {
    let data = synth_circle(24, seed)?;
    let policy = NoisePolicy::noiseless();
    let mut worst: f64 = 0.0;
    for r in 0..reps as u64 {
        let cfg = TrainConfig {
            epochs,
            seed: seed.wrapping_add(r),
            ..TrainConfig::default()
        };
        let shape = ModelShape {
            variant,
            n_qubits: 1,
            n_layers: 2,
        };
        let one = train(shape, &data, None, dev, &policy, &cfg, None)?;
        let loss1 = dataset_loss(&data, &one.params, dev, &policy)?;
        let init = warm_start_two_qubit(&one.params, cfg.seed.wrapping_add(1000), dev)?;
        let loss2 = dataset_loss(&data, &init, dev, &policy)?;
        worst = worst.max((loss1 - loss2).abs());
    }
    Ok(worst)
}

/// The device with damping switched off by very long T1/T2.
pub fn quiet_device(dev: &DeviceModel, t_ns: f64) -> DeviceModel {
    let mut out = dev.clone();
    for q in &mut out.qubits {
        q.t1_ns = t_ns;
        q.t2_ns = t_ns;
    }
    out
}

/// Random forward passes through the noisy pipeline with depolarizing
/// override 0, SPAM off and the given T1 = T2, against the noiseless
/// pipeline. Cycles over both variants and one/two qubits with `n_layers`
/// layers. Returns the largest entrywise difference of output states.
pub fn zero_noise_consistency(n: usize, n_layers: usize, t_ns: f64, dev: &DeviceModel, seed: u64) -> Result<f64> {
    let quiet = quiet_device(dev, t_ns);
    let noisy = NoisePolicy {
        enabled: true,
        depolarizing_override_p: Some(0.0),
        spam_enabled: false,
    };
    let clean = NoisePolicy::noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let variant = if i % 2 == 0 { Variant::Gate } else { Variant::Pulsed };
        let shape = ModelShape {
            variant,
            n_qubits: 1 + (i / 2) % 2,
            n_layers,
        };
        let params = random_init(shape, &quiet, &mut rng);
        let x = [rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)];
        let a = CompiledModel::new(&params, &quiet, &noisy)?.forward(x);
        let b = CompiledModel::new(&params, &quiet, &clean)?.forward(x);
        worst = worst.max(a.max_abs_diff(&b));
    }
    Ok(worst)
}
