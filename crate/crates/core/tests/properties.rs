use std::collections::HashSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use pulseforge::datasets::{load_csv, split, synth_circle};
use pulseforge::gates::{euler_from_su2, su2_from_euler, wrap_angle, EulerAngles};
use pulseforge::models::{CompiledModel, Variant};
use pulseforge::noise::{apply_channel, brisbane_device, NoiseChannel, NoisePolicy, Targets};
use pulseforge::pulses::{
    cr_propagator_nominal, schedule_unitary, single_qubit_propagator, CrossResonancePulse, PulseEnvelope,
    ScheduleOp, SingleQubitPulse, VirtualZFrame,
};
use pulseforge::qcore::{embed_1q, global_phase_distance, random, rz};
use pulseforge::training::{flatten, random_init, unflatten, ModelShape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn channel() -> impl Strategy<Value = (NoiseChannel, usize, Targets)> {
    (0usize..6, 0.0..=1.0f64).prop_map(|(kind, p)| match kind {
        0 => (NoiseChannel::Depolarizing1q(p), 1, Targets::One(0)),
        1 => (NoiseChannel::Depolarizing1q(p), 2, Targets::One(1)),
        2 => (NoiseChannel::Depolarizing2q(p), 2, Targets::Pair),
        3 => (NoiseChannel::AmplitudeDamping(p), 2, Targets::One(0)),
        4 => (NoiseChannel::PhaseDamping(p), 2, Targets::One(1)),
        _ => (NoiseChannel::AmplitudeDamping(p), 1, Targets::One(0)),
    })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Gate), Just(Variant::Pulsed)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn channels_are_cptp((ch, n, targets) in channel(), seed in any::<u64>()) {
        let kraus = ch.kraus();
        prop_assert!(kraus.completeness_error() < 1e-12);
        let rho = random::density_matrix(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let summed = apply_channel(&rho, &kraus, targets).unwrap();
        prop_assert!((summed.trace() - 1.0).abs() < 1e-12);
        prop_assert!(summed.matrix().hermiticity_error() < 1e-12);
        prop_assert!(summed.min_eigenvalue() > -1e-9);
        let mut closed = rho.clone();
        ch.apply_in_place(&mut closed, targets);
        prop_assert!(closed.max_abs_diff(&summed) < 1e-12);
    }

    #[test]
    fn pulses_are_unitary(
        amp in -0.1..0.1f64,
        phase in -PI..PI,
        detuning in -0.05..0.05f64,
        duration in 10.0..1000.0f64,
        qubit in 0usize..2,
        sampled in any::<bool>(),
    ) {
        let env = if sampled { PulseEnvelope::sampled(16, |s| (PI * s).sin()) } else { PulseEnvelope::Constant };
        let p = SingleQubitPulse::new(qubit, amp, phase, detuning, duration, env.clone()).unwrap();
        prop_assert!(single_qubit_propagator(&p, &VirtualZFrame::zero(2)).unitarity_error() < 1e-10);
        let c = CrossResonancePulse::new(qubit, 1 - qubit, amp, phase, detuning, duration, env).unwrap();
        prop_assert!(cr_propagator_nominal(&c, &brisbane_device()).unitarity_error() < 1e-10);
    }

    #[test]
    fn virtual_z_shifts_the_next_pulse(
        angle in -4.0 * PI..4.0 * PI,
        phase in -PI..PI,
        rot in -PI..PI,
        vz_qubit in 0usize..2,
        pulse_qubit in 0usize..2,
    ) {
        let dev = brisbane_device();
        let p = SingleQubitPulse::rotation(pulse_qubit, rot, phase, 300.0).unwrap();
        let ops = [ScheduleOp::Vz { qubit: vz_qubit, angle }, ScheduleOp::Pulse(p.clone())];
        let explicit = embed_1q(&single_qubit_propagator(&p, &VirtualZFrame::zero(2)), pulse_qubit, 2)
            .matmul(&embed_1q(&rz(angle), vz_qubit, 2));
        prop_assert!(schedule_unitary(&ops, 2, &dev).max_abs_diff(&explicit) < 1e-12);
    }

    #[test]
    fn euler_roundtrip(t1 in -10.0..10.0f64, t2 in -10.0..10.0f64, t3 in -10.0..10.0f64) {
        let u = su2_from_euler(EulerAngles::new(t1, t2, t3).unwrap());
        let back = euler_from_su2(&u).unwrap();
        prop_assert!((0.0..=PI).contains(&back.theta2));
        prop_assert!(global_phase_distance(&su2_from_euler(back), &u) < 1e-9);
    }

    #[test]
    fn wrap_angle_range(x in -1e3..1e3f64) {
        let w = wrap_angle(x);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!((w.sin() - x.sin()).abs() < 1e-9 && (w.cos() - x.cos()).abs() < 1e-9);
    }

    #[test]
    fn split_is_disjoint(n in 2usize..200, frac in 0.0..1.0f64, seed in any::<u64>()) {
        let ds = synth_circle(n, 7).unwrap();
        let n_train = ((n as f64 * frac) as usize).max(1).min(n - 1);
        let n_test = n - n_train;
        let (tr, te) = split(&ds, n_train, n_test, seed).unwrap();
        prop_assert_eq!(tr.len(), n_train);
        prop_assert_eq!(te.len(), n_test);
        let key = |x: &[f64; 3]| x.map(f64::to_bits);
        let a: HashSet<_> = tr.features().iter().map(key).collect();
        let b: HashSet<_> = te.features().iter().map(key).collect();
        prop_assert!(a.is_disjoint(&b));
        prop_assert_eq!(split(&ds, n_train, n_test, seed).unwrap(), (tr, te));
    }

    #[test]
    fn flatten_roundtrip(v in variant(), nq in 1usize..3, l in 1usize..6, seed in any::<u64>()) {
        let shape = ModelShape { variant: v, n_qubits: nq, n_layers: l };
        let params = random_init(shape, &brisbane_device(), &mut ChaCha8Rng::seed_from_u64(seed));
        let flat = flatten(&params);
        prop_assert_eq!(flat.len(), shape.param_count());
        prop_assert_eq!(unflatten(shape, &flat).unwrap(), params);
    }

    #[test]
    fn csv_roundtrip(n in 2usize..50, seed in any::<u64>()) {
        let ds = synth_circle(n, seed).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        ds.write_csv(&path).unwrap();
        let table = load_csv(&path, true).unwrap();
        prop_assert_eq!(&table.labels, &ds.labels().to_vec());
        for (row, x) in table.features.iter().zip(ds.features()) {
            prop_assert_eq!(row.as_slice(), x.as_slice());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noisy_forward_is_a_state(
        v in variant(),
        nq in 1usize..3,
        l in 1usize..4,
        seed in any::<u64>(),
        x in prop::array::uniform3(-PI..PI),
        p in prop::option::of(0.0..=1.0f64),
    ) {
        let dev = brisbane_device();
        let shape = ModelShape { variant: v, n_qubits: nq, n_layers: l };
        let params = random_init(shape, &dev, &mut ChaCha8Rng::seed_from_u64(seed));
        let policy = NoisePolicy { depolarizing_override_p: p, ..NoisePolicy::device() };
        let model = CompiledModel::new(&params, &dev, &policy).unwrap();
        let rho = model.forward(x);
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(rho.matrix().hermiticity_error() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-9);
        let loss = model.sample_loss(x, 1);
        prop_assert!((0.0..=1.0).contains(&loss));
    }
}
