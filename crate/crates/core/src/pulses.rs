//! Rotating-frame pulse Hamiltonians, their propagators and virtual-Z frame
//! bookkeeping.
//!
//! Units: angular frequencies in rad/ns, durations in ns.
//!
//! Frame convention: `vz(q, α)` stands for an explicit `RZ(α) = exp(−iα/2 σᶻ)`
//! on qubit `q`. The accumulated frame phase `φ_q` is subtracted from the
//! nominal phase of every later pulse on that qubit, and `flush_frames`
//! applies the deferred `RZ(φ_q)`. With this convention a frame-tracked
//! schedule is exactly equivalent to the schedule with explicit Z rotations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::DeviceModel;
use crate::qcore::{self, c, kron, pauli_i, pauli_x, pauli_y, pauli_z, CMatrix, DensityMatrix, C64};

/// Default number of slices for sampled envelopes.
pub const DEFAULT_ENVELOPE_SAMPLES: usize = 128;

/// Envelope `s(t)` of a pulse over its duration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub enum PulseEnvelope {
    #[default]
    Constant,
    /// Values of `s(t)` on equal sub-intervals of the pulse.
    PiecewiseSampled(Vec<f64>),
}

impl PulseEnvelope {
    pub fn validate(&self) -> Result<()> {
        if let PulseEnvelope::PiecewiseSampled(samples) = self {
            if samples.is_empty() {
                return Err(Error::InvalidParameter("sampled envelope has no samples".into()));
            }
            if let Some(bad) = samples.iter().find(|s| !s.is_finite() || **s < 0.0 || **s > 1.0) {
                return Err(Error::InvalidParameter(format!("envelope sample {bad} is not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Samples `f` on `n` equal sub-intervals (midpoint rule).
    pub fn sampled(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let samples = (0..n).map(|k| f((k as f64 + 0.5) / n as f64)).collect();
        PulseEnvelope::PiecewiseSampled(samples)
    }

    fn slices(&self) -> Vec<f64> {
        match self {
            PulseEnvelope::Constant => vec![1.0],
            PulseEnvelope::PiecewiseSampled(s) => s.clone(),
        }
    }
}

/// Drive on a single qubit: amplitude Ω, phase γ, detuning Δω = ω_q − ω_d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitPulse {
    pub amplitude: f64,
    pub phase: f64,
    pub detuning: f64,
    pub duration_ns: f64,
    pub envelope: PulseEnvelope,
    pub qubit: usize,
}

impl SingleQubitPulse {
    /// Validates the pulse and folds a negative amplitude into the phase
    /// (`Ω → −Ω`, `γ → γ + π`).
    pub fn new(
        qubit: usize,
        amplitude: f64,
        phase: f64,
        detuning: f64,
        duration_ns: f64,
        envelope: PulseEnvelope,
    ) -> Result<Self> {
        if !(duration_ns > 0.0 && duration_ns.is_finite()) {
            return Err(Error::InvalidParameter(format!("pulse duration {duration_ns} must be > 0")));
        }
        if !amplitude.is_finite() || !phase.is_finite() || !detuning.is_finite() {
            return Err(Error::InvalidParameter("pulse parameters must be finite".into()));
        }
        envelope.validate()?;
        let (amplitude, phase) = normalize_amplitude(amplitude, phase);
        Ok(SingleQubitPulse {
            amplitude,
            phase,
            detuning,
            duration_ns,
            envelope,
            qubit,
        })
    }

    /// Constant-envelope pulse resonant with the qubit.
    pub fn resonant(qubit: usize, amplitude: f64, phase: f64, duration_ns: f64) -> Result<Self> {
        Self::new(qubit, amplitude, phase, 0.0, duration_ns, PulseEnvelope::Constant)
    }

    /// Resonant constant pulse rotating by `angle` about the axis at `phase`.
    pub fn rotation(qubit: usize, angle: f64, phase: f64, duration_ns: f64) -> Result<Self> {
        Self::resonant(qubit, angle / duration_ns, phase, duration_ns)
    }
}

pub(crate) fn normalize_amplitude(amplitude: f64, phase: f64) -> (f64, f64) {
    if amplitude < 0.0 {
        (-amplitude, phase + std::f64::consts::PI)
    } else {
        (amplitude, phase)
    }
}

/// Cross-resonance drive: the control qubit driven near the target's
/// frequency, with an extra detuning δ of the drive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossResonancePulse {
    pub amplitude: f64,
    pub phase: f64,
    pub detuning: f64,
    pub duration_ns: f64,
    pub envelope: PulseEnvelope,
    pub control: usize,
    pub target: usize,
}

impl CrossResonancePulse {
    pub fn new(
        control: usize,
        target: usize,
        amplitude: f64,
        phase: f64,
        detuning: f64,
        duration_ns: f64,
        envelope: PulseEnvelope,
    ) -> Result<Self> {
        if control == target || control > 1 || target > 1 {
            return Err(Error::InvalidParameter(format!(
                "cross-resonance needs distinct qubits in a two-qubit register, got control {control}, target {target}"
            )));
        }
        if !(duration_ns > 0.0 && duration_ns.is_finite()) {
            return Err(Error::InvalidParameter(format!("pulse duration {duration_ns} must be > 0")));
        }
        if !amplitude.is_finite() || !phase.is_finite() || !detuning.is_finite() {
            return Err(Error::InvalidParameter("pulse parameters must be finite".into()));
        }
        envelope.validate()?;
        let (amplitude, phase) = normalize_amplitude(amplitude, phase);
        Ok(CrossResonancePulse {
            amplitude,
            phase,
            detuning,
            duration_ns,
            envelope,
            control,
            target,
        })
    }
}

/// Deferred Z phases, one per qubit.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct VirtualZFrame {
    phases: Vec<f64>,
}

impl VirtualZFrame {
    pub fn zero(n_qubits: usize) -> Self {
        VirtualZFrame {
            phases: vec![0.0; n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.phases.len()
    }

    pub fn phase(&self, qubit: usize) -> f64 {
        self.phases.get(qubit).copied().unwrap_or(0.0)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn is_zero(&self) -> bool {
        self.phases.iter().all(|p| *p == 0.0)
    }

    pub(crate) fn shift(&mut self, qubit: usize, angle: f64) {
        if qubit >= self.phases.len() {
            self.phases.resize(qubit + 1, 0.0);
        }
        self.phases[qubit] += angle;
    }

    pub(crate) fn reset(&mut self) {
        self.phases.iter_mut().for_each(|p| *p = 0.0);
    }
}

/// Virtual `RZ(angle)` on `qubit`: returns the updated frame.
pub fn vz(frames: &VirtualZFrame, qubit: usize, angle: f64) -> VirtualZFrame {
    let mut out = frames.clone();
    out.shift(qubit, angle);
    out
}

/// `Ĥ = −(Δω/2)σᶻ + (Ω s/2)(cos γ σˣ + sin γ σʸ)`.
pub fn drive_hamiltonian(p: &SingleQubitPulse, s_value: f64) -> CMatrix {
    drive_hamiltonian_with_phase(p, s_value, p.phase)
}

fn drive_hamiltonian_with_phase(p: &SingleQubitPulse, s_value: f64, phase: f64) -> CMatrix {
    let w = 0.5 * p.amplitude * s_value;
    let (sg, cg) = phase.sin_cos();
    pauli_z()
        .scale_re(-0.5 * p.detuning)
        .add(&pauli_x().scale_re(w * cg))
        .add(&pauli_y().scale_re(w * sg))
}

/// Propagator of a single-qubit pulse executed in the current frame.
///
/// The pulse runs with effective phase `γ − φ_frame`; the frame itself is
/// not modified. Sampled envelopes are integrated as a time-ordered product
/// of slice propagators, later slices on the left.
pub fn single_qubit_propagator(p: &SingleQubitPulse, frame: &VirtualZFrame) -> CMatrix {
    let phase = p.phase - frame.phase(p.qubit);
    let slices = p.envelope.slices();
    let dt = p.duration_ns / slices.len() as f64;
    let (sg, cg) = phase.sin_cos();
    let mut u = CMatrix::identity(2);
    let mut cache: Option<(f64, CMatrix)> = None;
    for s in slices {
        let step = match &cache {
            Some((cs, m)) if *cs == s => m.clone(),
            _ => {
                let w = 0.5 * p.amplitude * s;
                let m = qcore::su2_exp(0.0, [w * cg, w * sg, -0.5 * p.detuning], dt);
                cache = Some((s, m.clone()));
                m
            }
        };
        u = step.matmul(&u);
    }
    u
}

/// Effective cross-resonance Hamiltonian in register order (qubit 0 first).
///
/// Drift `−((Δ₁₂+δ)/2) σᶻ⊗I − (δ/2) I⊗σᶻ` in (control ⊗ target) order, with
/// `Δ₁₂ = ω_control − ω_target`, plus the drive terms with coefficients 1
/// (control), μ (σᶻ⊗σ) and ν (I⊗σ).
pub fn cr_hamiltonian(p: &CrossResonancePulse, dev: &DeviceModel, s_value: f64) -> CMatrix {
    cr_hamiltonian_phased(p, dev, s_value, p.phase, p.phase)
}

/// As [`cr_hamiltonian`], with separate phases for the terms that rotate the
/// control qubit and the terms that rotate the target qubit.
fn cr_hamiltonian_phased(
    p: &CrossResonancePulse,
    dev: &DeviceModel,
    s_value: f64,
    control_phase: f64,
    target_phase: f64,
) -> CMatrix {
    let delta12 = dev.detuning(p.control, p.target) + p.detuning;
    let (sc, cc) = control_phase.sin_cos();
    let (st, ct) = target_phase.sin_cos();
    let w = 0.5 * p.amplitude * s_value;
    let axis_c = pauli_x().scale_re(cc).add(&pauli_y().scale_re(sc));
    let axis_t = pauli_x().scale_re(ct).add(&pauli_y().scale_re(st));
    let h = kron(&pauli_z(), &pauli_i())
        .scale_re(-0.5 * delta12)
        .add(&kron(&pauli_i(), &pauli_z()).scale_re(-0.5 * p.detuning))
        .add(&kron(&axis_c, &pauli_i()).scale_re(w))
        .add(&kron(&pauli_z(), &axis_t).scale_re(w * dev.mu))
        .add(&kron(&pauli_i(), &axis_t).scale_re(w * dev.nu));
    if p.control == 0 {
        h
    } else {
        let swap = swap_gate();
        swap.matmul(&h).matmul(&swap)
    }
}

fn swap_gate() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for (a, b) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(a, b)] = c(1.0, 0.0);
    }
    s
}

/// Propagator of a cross-resonance pulse executed in the current frames.
///
/// Terms acting on the control's XY plane run with `γ − φ_control`; the
/// σᶻ⊗σ and I⊗σ terms rotate the target and run with `γ − φ_target`.
pub fn cr_propagator(p: &CrossResonancePulse, dev: &DeviceModel, frames: &VirtualZFrame) -> CMatrix {
    let nominal = cr_propagator_nominal(p, dev);
    conjugate_by_frame(&nominal, frames)
}

/// Propagator at zero frame phases.
pub fn cr_propagator_nominal(p: &CrossResonancePulse, dev: &DeviceModel) -> CMatrix {
    let slices = p.envelope.slices();
    let dt = p.duration_ns / slices.len() as f64;
    let mut u = CMatrix::identity(4);
    let mut cache: Option<(f64, CMatrix)> = None;
    for s in slices {
        let step = match &cache {
            Some((cs, m)) if *cs == s => m.clone(),
            _ => {
                let h = cr_hamiltonian(p, dev, s);
                let m = qcore::expm_hermitian(&h, dt).expect("cross-resonance Hamiltonian is Hermitian");
                cache = Some((s, m.clone()));
                m
            }
        };
        u = step.matmul(&u);
    }
    u
}

/// `R U R†` with `R = ⊗_q RZ(−φ_q)`: the propagator of a pulse whose phases
/// are all shifted by the frame.
pub fn conjugate_by_frame(u: &CMatrix, frames: &VirtualZFrame) -> CMatrix {
    if frames.is_zero() {
        return u.clone();
    }
    let n = u.rows();
    let n_qubits = if n == 2 { 1 } else { 2 };
    // diagonal of R: exp(+i φ_q z_q / 2), z = +1 for bit 0 and −1 for bit 1
    let diag: Vec<C64> = (0..n)
        .map(|b| {
            let mut angle = 0.0;
            for q in 0..n_qubits {
                let bit = (b >> (n_qubits - 1 - q)) & 1;
                let z = if bit == 0 { 1.0 } else { -1.0 };
                angle += 0.5 * frames.phase(q) * z;
            }
            C64::from_polar(1.0, angle)
        })
        .collect();
    let mut out = u.clone();
    for r in 0..n {
        for col in 0..n {
            out[(r, col)] *= diag[r] * diag[col].conj();
        }
    }
    out
}

/// Materializes the deferred Z phases as exact unitaries. Returns the
/// rotated state and the zeroed frame.
pub fn flush_frames(rho: &DensityMatrix, frames: &VirtualZFrame) -> (DensityMatrix, VirtualZFrame) {
    let mut out = rho.clone();
    let mut f = frames.clone();
    flush_in_place(&mut out, &mut f);
    (out, f)
}

pub(crate) fn flush_in_place(rho: &mut DensityMatrix, frames: &mut VirtualZFrame) {
    for q in 0..rho.n_qubits() {
        let phi = frames.phase(q);
        if phi != 0.0 {
            rho.apply_1q_in_place(&qcore::rz(phi), q);
        }
    }
    frames.reset();
}

/// `J = g₁g₂(ω₁+ω₂−2ω_r) / (2(ω₁−ω_r)(ω₂−ω_r))`.
pub fn effective_coupling(g1: f64, g2: f64, omega1: f64, omega2: f64, omega_r: f64) -> Result<f64> {
    let d1 = omega1 - omega_r;
    let d2 = omega2 - omega_r;
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::Resonance);
    }
    Ok(g1 * g2 * (omega1 + omega2 - 2.0 * omega_r) / (2.0 * d1 * d2))
}

/// One step of a pulse-level schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScheduleOp {
    Vz { qubit: usize, angle: f64 },
    Pulse(SingleQubitPulse),
    CrossResonance(CrossResonancePulse),
}

/// Noiseless unitary of a schedule (time order), with frame tracking and a
/// final flush.
pub fn schedule_unitary(ops: &[ScheduleOp], n_qubits: usize, dev: &DeviceModel) -> CMatrix {
    let mut u = CMatrix::identity(1 << n_qubits);
    let mut frames = VirtualZFrame::zero(n_qubits);
    for op in ops {
        match op {
            ScheduleOp::Vz { qubit, angle } => frames.shift(*qubit, *angle),
            ScheduleOp::Pulse(p) => {
                let step = single_qubit_propagator(p, &frames);
                let step = if n_qubits == 1 { step } else { qcore::embed_1q(&step, p.qubit, n_qubits) };
                u = step.matmul(&u);
            }
            ScheduleOp::CrossResonance(p) => {
                u = cr_propagator(p, dev, &frames).matmul(&u);
            }
        }
    }
    for q in 0..n_qubits {
        let phi = frames.phase(q);
        if phi != 0.0 {
            u = qcore::embed_1q(&qcore::rz(phi), q, n_qubits).matmul(&u);
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::brisbane_device;
    use crate::qcore::{expm_hermitian, rx, rz};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn ideal_device(mu: f64, nu: f64, delta12: f64) -> DeviceModel {
        let mut dev = brisbane_device();
        dev.qubits[1].frequency = dev.qubits[0].frequency - delta12;
        dev.mu = mu;
        dev.nu = nu;
        dev
    }

    #[test]
    fn drive_hamiltonian_examples() {
        let p = SingleQubitPulse::resonant(0, 1.0, 0.0, 10.0).unwrap();
        assert!(drive_hamiltonian(&p, 1.0).max_abs_diff(&pauli_x().scale_re(0.5)) < 1e-15);

        let p = SingleQubitPulse::new(0, 0.0, 0.3, 0.2, 10.0, PulseEnvelope::Constant).unwrap();
        assert!(drive_hamiltonian(&p, 1.0).max_abs_diff(&pauli_z().scale_re(-0.1)) < 1e-15);

        let p = SingleQubitPulse::resonant(0, 1.0, PI / 2.0, 10.0).unwrap();
        assert!(drive_hamiltonian(&p, 1.0).max_abs_diff(&pauli_y().scale_re(0.5)) < 1e-15);
    }

    #[test]
    fn negative_amplitude_is_folded_into_phase() {
        let p = SingleQubitPulse::resonant(0, -0.2, 0.1, 5.0).unwrap();
        assert_eq!(p.amplitude, 0.2);
        assert!((p.phase - (0.1 + PI)).abs() < 1e-15);
        assert!(SingleQubitPulse::resonant(0, 1.0, 0.0, 0.0).is_err());
        assert!(SingleQubitPulse::new(0, 1.0, 0.0, 0.0, 1.0, PulseEnvelope::PiecewiseSampled(vec![])).is_err());
    }

    #[test]
    fn pi_pulse_is_minus_i_x() {
        let t = 40.0;
        let p = SingleQubitPulse::resonant(0, PI / t, 0.0, t).unwrap();
        let u = single_qubit_propagator(&p, &VirtualZFrame::zero(1));
        assert!(u.max_abs_diff(&pauli_x().scale(c(0.0, -1.0))) < 1e-10);
    }

    #[test]
    fn pure_detuning_is_z_rotation() {
        let theta = 0.83;
        let p = SingleQubitPulse::new(0, 0.0, 0.0, theta / 10.0, 10.0, PulseEnvelope::Constant).unwrap();
        let u = single_qubit_propagator(&p, &VirtualZFrame::zero(1));
        assert!(u.max_abs_diff(&rz(-theta)) < 1e-12);
    }

    #[test]
    fn amplitude_duration_trade_off() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let omega = rng.gen_range(0.0..0.2);
            let t = rng.gen_range(1.0..300.0);
            let scale = rng.gen_range(0.1..10.0);
            let gamma = rng.gen_range(-PI..PI);
            let a = SingleQubitPulse::resonant(0, omega, gamma, t).unwrap();
            let b = SingleQubitPulse::resonant(0, scale * omega, gamma, t / scale).unwrap();
            let f = VirtualZFrame::zero(1);
            assert!(single_qubit_propagator(&a, &f).max_abs_diff(&single_qubit_propagator(&b, &f)) < 1e-10);
        }
    }

    #[test]
    fn envelope_refinement_of_constant_shape() {
        let mk = |env| SingleQubitPulse::new(0, 0.013, 0.4, 0.002, 300.0, env).unwrap();
        let f = VirtualZFrame::zero(1);
        let one = single_qubit_propagator(&mk(PulseEnvelope::PiecewiseSampled(vec![1.0])), &f);
        let many = single_qubit_propagator(&mk(PulseEnvelope::PiecewiseSampled(vec![1.0; 1000])), &f);
        assert!(one.max_abs_diff(&many) < 1e-12);
    }

    #[test]
    fn sampled_envelope_converges_to_pulse_area() {
        // Resonant, fixed phase: the generator commutes with itself, so only
        // the area matters. sin² envelope has mean 1/2.
        let t = 100.0;
        let env = PulseEnvelope::sampled(DEFAULT_ENVELOPE_SAMPLES, |x| (PI * x).sin().powi(2));
        let p = SingleQubitPulse::new(0, 2.0 * PI / t, 0.0, 0.0, t, env).unwrap();
        let u = single_qubit_propagator(&p, &VirtualZFrame::zero(1));
        assert!(u.max_abs_diff(&rx(PI)) < 1e-3);
    }

    #[test]
    fn cr_hamiltonian_examples() {
        let dev = ideal_device(0.0, 0.0, 0.7);
        let p = CrossResonancePulse::new(0, 1, 0.0, 0.0, 0.0, 10.0, PulseEnvelope::Constant).unwrap();
        let h = cr_hamiltonian(&p, &dev, 1.0);
        assert!(h.max_abs_diff(&kron(&pauli_z(), &pauli_i()).scale_re(-0.35)) < 1e-12);

        let dev = ideal_device(0.0, 0.0, 0.0);
        let p = CrossResonancePulse::new(0, 1, 1.0, 0.0, 0.0, 10.0, PulseEnvelope::Constant).unwrap();
        let h = cr_hamiltonian(&p, &dev, 1.0);
        assert!(h.max_abs_diff(&kron(&pauli_x(), &pauli_i()).scale_re(0.5)) < 1e-15);

        let dev = ideal_device(0.5, 0.0, 0.0);
        let h = cr_hamiltonian(&p, &dev, 1.0);
        let expected = kron(&pauli_x(), &pauli_i())
            .add(&kron(&pauli_z(), &pauli_x()).scale_re(0.5))
            .scale_re(0.5);
        assert!(h.max_abs_diff(&expected) < 1e-15);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn cr_control_on_second_qubit_is_swapped() {
        let dev = ideal_device(0.3, 0.1, 0.0);
        let a = CrossResonancePulse::new(0, 1, 0.7, 0.2, 0.0, 10.0, PulseEnvelope::Constant).unwrap();
        let b = CrossResonancePulse { control: 1, target: 0, ..a.clone() };
        let ha = cr_hamiltonian(&a, &dev, 1.0);
        let hb = cr_hamiltonian(&b, &dev, 1.0);
        let s = swap_gate();
        assert!(hb.max_abs_diff(&s.matmul(&ha).matmul(&s)) < 1e-15);
    }

    #[test]
    fn cr_drift_only_is_control_z_rotation() {
        let theta = 1.1;
        let dev = ideal_device(0.2, 0.0, theta / 50.0);
        let p = CrossResonancePulse::new(0, 1, 0.0, 0.0, 0.0, 50.0, PulseEnvelope::Constant).unwrap();
        let u = cr_propagator(&p, &dev, &VirtualZFrame::zero(2));
        assert!(u.max_abs_diff(&kron(&rz(-theta), &pauli_i())) < 1e-12);
    }

    #[test]
    fn cr_anticommuting_generator_closed_form() {
        // (σˣ⊗I + σᶻ⊗σˣ) squares to 2·I, so exp(−iθ(A+B)) has a closed form.
        let dev = ideal_device(1.0, 0.0, 0.0);
        let (omega, t) = (0.05, 37.0);
        let p = CrossResonancePulse::new(0, 1, omega, 0.0, 0.0, t, PulseEnvelope::Constant).unwrap();
        let u = cr_propagator(&p, &dev, &VirtualZFrame::zero(2));
        let g = kron(&pauli_x(), &pauli_i()).add(&kron(&pauli_z(), &pauli_x()));
        let a = 0.5 * omega * t * 2f64.sqrt();
        let expected = CMatrix::identity(4)
            .scale_re(a.cos())
            .add(&g.scale(c(0.0, -a.sin() / 2f64.sqrt())));
        assert!(u.max_abs_diff(&expected) < 1e-12);
        assert!(u.max_abs_diff(&expm_hermitian(&cr_hamiltonian(&p, &dev, 1.0), t).unwrap()) < 1e-12);
    }

    #[test]
    fn vz_frames_are_additive() {
        let f = VirtualZFrame::zero(2);
        assert_eq!(vz(&f, 0, 0.0), f);
        let two = vz(&vz(&f, 1, 0.3), 1, 0.5);
        let one = vz(&f, 1, 0.8);
        assert!((two.phase(1) - one.phase(1)).abs() < 1e-15);
    }

    #[test]
    fn flush_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = crate::qcore::random::density_matrix(2, &mut rng);
        let (same, _) = flush_frames(&rho, &VirtualZFrame::zero(2));
        assert_eq!(same, rho);
        let (full_turn, reset) = flush_frames(&rho, &vz(&VirtualZFrame::zero(2), 1, 2.0 * PI));
        assert!(full_turn.max_abs_diff(&rho) < 1e-14);
        assert!(reset.is_zero());

        let s = 1.0 / 2f64.sqrt();
        let plus = DensityMatrix::from_pure(&crate::qcore::PureState::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap());
        let minus = DensityMatrix::from_pure(&crate::qcore::PureState::new(vec![c(s, 0.0), c(-s, 0.0)]).unwrap());
        let (out, _) = flush_frames(&plus, &vz(&VirtualZFrame::zero(1), 0, PI));
        assert!(out.max_abs_diff(&minus) < 1e-14);
    }

    #[test]
    fn effective_coupling_examples() {
        let ghz = 2.0 * PI;
        assert_eq!(effective_coupling(0.0, 0.1, 4.8 * ghz, 4.6 * ghz, 6.0 * ghz).unwrap(), 0.0);
        assert_eq!(effective_coupling(0.1, 0.1, 5.0, 7.0, 6.0).unwrap(), 0.0);
        assert!(matches!(effective_coupling(0.1, 0.1, 6.0, 5.0, 6.0), Err(Error::Resonance)));

        // ω1−ωr = −1.2·2π, ω2−ωr = −1.4·2π, ω1+ω2−2ωr = −2.6·2π:
        // J = 0.01·(−2.6·2π) / (2·1.68·(2π)²) = −0.026 / (3.36·2π)
        let j = effective_coupling(0.1, 0.1, 4.8 * ghz, 4.6 * ghz, 6.0 * ghz).unwrap();
        let hand = -0.026 / (3.36 * 2.0 * PI);
        assert!((j - hand).abs() < 1e-15);
        assert!((j - (-1.231_556_107_258_714e-3)).abs() < 1e-15);
    }
}
