//! Euler-angle algebra, native-gate decompositions and the CNOT built from a
//! cross-resonance pulse.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{DeviceModel, OpKind};
use crate::pulses::{cr_propagator_nominal, CrossResonancePulse, PulseEnvelope, ScheduleOp, SingleQubitPulse};
use crate::qcore::{self, c, embed_1q, pauli_x, pauli_y, pauli_z, rx, ry, rz, CMatrix};

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// ZYZ Euler angles of `RZ(θ₁) RY(θ₂) RZ(θ₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl EulerAngles {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        if !(theta1.is_finite() && theta2.is_finite() && theta3.is_finite()) {
            return Err(Error::InvalidParameter("Euler angles must be finite".into()));
        }
        Ok(EulerAngles { theta1, theta2, theta3 })
    }

    pub const fn zero() -> Self {
        EulerAngles {
            theta1: 0.0,
            theta2: 0.0,
            theta3: 0.0,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        EulerAngles {
            theta1: a[0],
            theta2: a[1],
            theta3: a[2],
        }
    }

    /// Equivalent angles (up to global phase) with `θ₂ ∈ [0, π]` and
    /// `θ₁, θ₃ ∈ (−π, π]`.
    pub fn canonical(self) -> Self {
        euler_from_su2(&su2_from_euler(self)).expect("rotation product is unitary")
    }
}

pub fn su2_from_euler(a: EulerAngles) -> CMatrix {
    rz(a.theta1).matmul(&ry(a.theta2)).matmul(&rz(a.theta3))
}

/// Inverse of [`su2_from_euler`] up to global phase. At `θ₂ ∈ {0, π}` the
/// tie is broken with `θ₃ = 0`.
pub fn euler_from_su2(u: &CMatrix) -> Result<EulerAngles> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: u.rows() });
    }
    let err = u.unitarity_error();
    if err > 1e-8 {
        return Err(Error::NotUnitary(err));
    }
    let v = u.scale(u.determinant_2x2().sqrt().inv());
    let (v00, v10, v11) = (v[(0, 0)], v[(1, 0)], v[(1, 1)]);
    let theta2 = 2.0 * v10.norm().atan2(v00.norm());
    const SINGULAR: f64 = 1e-14;
    let (theta1, theta3) = if v10.norm() < SINGULAR {
        (2.0 * v11.arg(), 0.0)
    } else if v00.norm() < SINGULAR {
        (2.0 * v10.arg(), 0.0)
    } else {
        let sum = 2.0 * v11.arg();
        let diff = 2.0 * v10.arg();
        (0.5 * (sum + diff), 0.5 * (sum - diff))
    };
    Ok(EulerAngles {
        theta1: wrap_angle(theta1),
        theta2,
        theta3: wrap_angle(theta3),
    })
}

/// Native operations of the transpiled gate model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NativeKind {
    /// Frame change; zero duration.
    RzVirtual,
    Sx,
    X,
    RyPulse,
    Cnot,
    ControlledSu2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NativeOp {
    pub kind: NativeKind,
    pub params: Vec<f64>,
    /// Single-qubit ops: `[qubit]`. Two-qubit ops: `[control, target]`.
    pub qubits: Vec<usize>,
    pub duration_ns: f64,
}

impl NativeOp {
    pub fn rz_virtual(qubit: usize, angle: f64) -> Self {
        NativeOp {
            kind: NativeKind::RzVirtual,
            params: vec![angle],
            qubits: vec![qubit],
            duration_ns: 0.0,
        }
    }

    pub fn sx(qubit: usize, dev: &DeviceModel) -> Self {
        NativeOp {
            kind: NativeKind::Sx,
            params: Vec::new(),
            qubits: vec![qubit],
            duration_ns: dev.oneq_duration_ns(qubit),
        }
    }

    pub fn x(qubit: usize, dev: &DeviceModel) -> Self {
        NativeOp {
            kind: NativeKind::X,
            params: Vec::new(),
            qubits: vec![qubit],
            duration_ns: dev.oneq_duration_ns(qubit),
        }
    }

    pub fn ry_pulse(qubit: usize, angle: f64, dev: &DeviceModel) -> Self {
        NativeOp {
            kind: NativeKind::RyPulse,
            params: vec![angle],
            qubits: vec![qubit],
            duration_ns: dev.oneq_duration_ns(qubit),
        }
    }

    pub fn cnot(control: usize, target: usize, dev: &DeviceModel) -> Self {
        NativeOp {
            kind: NativeKind::Cnot,
            params: Vec::new(),
            qubits: vec![control, target],
            duration_ns: dev.twoq_duration_ns,
        }
    }

    pub fn controlled_su2(control: usize, target: usize, a: EulerAngles, dev: &DeviceModel) -> Self {
        NativeOp {
            kind: NativeKind::ControlledSu2,
            params: a.to_array().to_vec(),
            qubits: vec![control, target],
            duration_ns: dev.twoq_duration_ns,
        }
    }

    /// Class used for noise insertion.
    pub fn op_kind(&self) -> OpKind {
        match self.kind {
            NativeKind::RzVirtual => OpKind::VirtualZ,
            NativeKind::Sx | NativeKind::X | NativeKind::RyPulse => OpKind::OneQubitGate,
            NativeKind::Cnot | NativeKind::ControlledSu2 => OpKind::TwoQubit,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.kind, NativeKind::Cnot | NativeKind::ControlledSu2)
    }

    /// Matrix on the op's own qubits (2×2, or 4×4 in register order).
    pub fn local_unitary(&self) -> CMatrix {
        match self.kind {
            NativeKind::RzVirtual => rz(self.params[0]),
            NativeKind::Sx => rx(FRAC_PI_2),
            NativeKind::X => rx(PI),
            NativeKind::RyPulse => ry(self.params[0]),
            NativeKind::Cnot => qcore::cnot(self.qubits[0], self.qubits[1]),
            NativeKind::ControlledSu2 => {
                let a = EulerAngles::from_array([self.params[0], self.params[1], self.params[2]]);
                controlled_su2_on(self.qubits[0], self.qubits[1], a)
            }
        }
    }

    /// Matrix on an `n_qubits` register.
    pub fn unitary(&self, n_qubits: usize) -> CMatrix {
        let u = self.local_unitary();
        if self.is_two_qubit() || n_qubits == 1 {
            u
        } else {
            embed_1q(&u, self.qubits[0], n_qubits)
        }
    }
}

/// Product of a time-ordered op list.
pub fn sequence_unitary(ops: &[NativeOp], n_qubits: usize) -> CMatrix {
    ops.iter()
        .fold(CMatrix::identity(1 << n_qubits), |acc, op| op.unitary(n_qubits).matmul(&acc))
}

/// `U(θ, φ, λ) = RZ(φ) RY(θ) RZ(λ)` as `RZ(φ+π) SX RZ(θ+π) SX RZ(λ)`, in
/// time order: three virtual Z rotations and two physical SX pulses.
pub fn u3_sx_vz_sequence(theta: f64, phi: f64, lam: f64, qubit: usize, dev: &DeviceModel) -> Vec<NativeOp> {
    vec![
        NativeOp::rz_virtual(qubit, lam),
        NativeOp::sx(qubit, dev),
        NativeOp::rz_virtual(qubit, theta + PI),
        NativeOp::sx(qubit, dev),
        NativeOp::rz_virtual(qubit, phi + PI),
    ]
}

/// Native sequence of the Euler rotation `RZ(θ₁) RY(θ₂) RZ(θ₃)`.
pub fn euler_sequence(a: EulerAngles, qubit: usize, dev: &DeviceModel) -> Vec<NativeOp> {
    u3_sx_vz_sequence(a.theta2, a.theta1, a.theta3, qubit, dev)
}

/// Controlled rotation with qubit 2 (index 1) as control and qubit 1
/// (index 0) as target.
pub fn controlled_su2(a: EulerAngles) -> CMatrix {
    controlled_su2_on(1, 0, a)
}

fn controlled_su2_on(control: usize, target: usize, a: EulerAngles) -> CMatrix {
    let u = su2_from_euler(a);
    let mut m = CMatrix::zeros(4, 4);
    let index = |bc: usize, bt: usize| (bc << (1 - control)) | (bt << (1 - target));
    for i in 0..2 {
        m[(index(0, i), index(0, i))] = c(1.0, 0.0);
        for j in 0..2 {
            m[(index(1, i), index(1, j))] = u[(i, j)];
        }
    }
    m
}

/// `A·CNOT·B·CNOT·C` with `ABC = I` and `A X B X C = RZ(θ₁)RY(θ₂)RZ(θ₃)`;
/// each of A, B, C is emitted as its native SX/VZ sequence.
pub fn decompose_controlled_su2(a: EulerAngles, dev: &DeviceModel) -> Vec<NativeOp> {
    let (control, target) = (1, 0);
    let (t1, t2, t3) = (a.theta1, a.theta2, a.theta3);
    let ua = rz(t1).matmul(&ry(0.5 * t2));
    let ub = ry(-0.5 * t2).matmul(&rz(-0.5 * (t1 + t3)));
    let uc = rz(0.5 * (t3 - t1));
    let seq = |u: &CMatrix| {
        let e = euler_from_su2(u).expect("rotation product is unitary");
        euler_sequence(e, target, dev)
    };
    let mut ops = seq(&uc);
    ops.push(NativeOp::cnot(control, target, dev));
    ops.extend(seq(&ub));
    ops.push(NativeOp::cnot(control, target, dev));
    ops.extend(seq(&ua));
    ops
}

/// CNOT (control 0, target 1) from one cross-resonance pulse and
/// single-qubit pulses and frame changes.
pub fn cnot_from_cr_blocks(dev: &DeviceModel) -> Result<Vec<ScheduleOp>> {
    cnot_from_cr_blocks_on(dev, 0, 1)
}

/// Calibrated CNOT schedule on an arbitrary ordered pair.
///
/// The CR pulse (phase 0, no extra detuning) commutes with `X` on the
/// target, so in the target's X basis it splits into blocks `U₊`, `U₋` on
/// the control. The amplitude is found numerically so that
/// `tr(U₋U₊†) = 0` in SU(2); control rotations around the pulse then map the
/// blocks to `I` and `Z`, and a target X rotation fixes the relative phase.
pub fn cnot_from_cr_blocks_on(dev: &DeviceModel, control: usize, target: usize) -> Result<Vec<ScheduleOp>> {
    if dev.qubits.len() < 2 {
        return Err(Error::Device("CNOT needs a two-qubit device".into()));
    }
    if dev.mu == 0.0 {
        return Err(Error::NoEntanglingInteraction);
    }
    let t_cr = dev.twoq_duration_ns;
    let cr = |omega: f64| CrossResonancePulse::new(control, target, omega, 0.0, 0.0, t_cr, PulseEnvelope::Constant);
    let blocks = |omega: f64| -> Result<[CMatrix; 2]> {
        Ok(x_basis_blocks(&cr_propagator_nominal(&cr(omega)?, dev), control, target))
    };
    let overlap = |omega: f64| -> Result<f64> {
        let [up, um] = blocks(omega)?;
        Ok(to_su2(&um).matmul(&to_su2(&up).adjoint()).trace().re / 2.0)
    };

    let omega0 = PI / (2.0 * dev.mu.abs() * t_cr);
    let omega = find_entangling_amplitude(&overlap, 4.0 * omega0)?;

    let [up, um] = blocks(omega)?;
    let (dp, dm) = (up.determinant_2x2().sqrt(), um.determinant_2x2().sqrt());
    let (vp, vm) = (up.scale(dp.inv()), um.scale(dm.inv()));
    let w = vm.matmul(&vp.adjoint());
    // W = −i n·σ; rotate n onto z.
    let n = [pauli_x(), pauli_y(), pauli_z()].map(|s| (c(0.0, 0.5) * w.matmul(&s).trace()).re);
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let beta = (n[2] / norm).clamp(-1.0, 1.0).acos();
    let alpha = n[1].atan2(n[0]);
    let a = ry(-beta).matmul(&rz(-alpha));
    let b = vp.adjoint().matmul(&a.adjoint());
    let theta = dp.arg() - dm.arg() + FRAC_PI_2;

    let mut ops = rotation_schedule(&b, control, dev)?;
    ops.push(ScheduleOp::CrossResonance(cr(omega)?));
    ops.extend(rotation_schedule(&a, control, dev)?);
    ops.push(ScheduleOp::Pulse(SingleQubitPulse::rotation(
        target,
        theta.rem_euclid(2.0 * PI),
        0.0,
        dev.oneq_duration_ns(target),
    )?));
    Ok(ops)
}

/// Smallest `Ω ∈ (0, max]` with `f(Ω) = 0`, where `f(0) = 1`.
///
/// A sign change on a coarse grid is refined by bisection. Without one the
/// zero is a tangent (e.g. with no qubit–qubit detuning), and the grid
/// minimum of `|f|` is refined by golden-section search.
fn find_entangling_amplitude(f: &impl Fn(f64) -> Result<f64>, max: f64) -> Result<f64> {
    const STEPS: usize = 200;
    let step = max / STEPS as f64;
    let mut values = Vec::with_capacity(STEPS + 1);
    values.push((0.0, 1.0));
    for k in 1..=STEPS {
        let w = k as f64 * step;
        let v = f(w)?;
        if v <= 0.0 {
            let (mut lo, mut hi) = (values[k - 1].0, w);
            if v == 0.0 {
                return Ok(w);
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        values.push((w, v));
    }
    let (k, _) = values
        .iter()
        .enumerate()
        .skip(1)
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("grid is non-empty");
    let (mut a, mut b) = (values[k - 1].0, (values[k].0 + step).min(max));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1)?.abs(), f(x2)?.abs());
    for _ in 0..200 {
        if b - a <= 1e-15 * b {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?.abs();
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?.abs();
        }
    }
    let w = 0.5 * (a + b);
    if f(w)?.abs() > 1e-10 {
        return Err(Error::Device("cross-resonance calibration found no entangling amplitude".into()));
    }
    Ok(w)
}

fn to_su2(u: &CMatrix) -> CMatrix {
    u.scale(u.determinant_2x2().sqrt().inv())
}

/// Control-qubit blocks of a 4×4 operator that commutes with X on the
/// target: `[U₊, U₋]` for target states `|+⟩`, `|−⟩`.
fn x_basis_blocks(u: &CMatrix, control: usize, target: usize) -> [CMatrix; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_rows(&[&[c(s, 0.0), c(s, 0.0)], &[c(s, 0.0), c(-s, 0.0)]]);
    let h_t = embed_1q(&h, target, 2);
    let ux = h_t.matmul(u).matmul(&h_t);
    let index = |bc: usize, bt: usize| (bc << (1 - control)) | (bt << (1 - target));
    [0, 1].map(|bt| {
        let mut m = CMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = ux[(index(i, bt), index(j, bt))];
            }
        }
        m
    })
}

/// Pulse-level realization of a single-qubit unitary: VZ, RY pulse, VZ.
fn rotation_schedule(u: &CMatrix, qubit: usize, dev: &DeviceModel) -> Result<Vec<ScheduleOp>> {
    let e = euler_from_su2(u)?;
    Ok(vec![
        ScheduleOp::Vz { qubit, angle: e.theta3 },
        ScheduleOp::Pulse(SingleQubitPulse::rotation(qubit, e.theta2, FRAC_PI_2, dev.oneq_duration_ns(qubit))?),
        ScheduleOp::Vz { qubit, angle: e.theta1 },
    ])
}

/// `|tr(U†·CNOT)/4|²` of a schedule's noiseless propagator.
pub fn cnot_fidelity(schedule: &[ScheduleOp], dev: &DeviceModel, control: usize, target: usize) -> f64 {
    let u = crate::pulses::schedule_unitary(schedule, 2, dev);
    qcore::unitary_fidelity(&u, &qcore::cnot(control, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::brisbane_device;
    use crate::pulses::schedule_unitary;
    use crate::qcore::{equal_up_to_global_phase, global_phase_distance, random, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ideal_device(mu: f64, nu: f64, delta12: f64) -> DeviceModel {
        let mut dev = brisbane_device();
        dev.qubits[1].frequency = dev.qubits[0].frequency - delta12;
        dev.mu = mu;
        dev.nu = nu;
        dev
    }

    fn random_angles(rng: &mut impl Rng) -> EulerAngles {
        EulerAngles::new(rng.gen_range(-PI..PI), rng.gen_range(0.0..PI), rng.gen_range(-PI..PI)).unwrap()
    }

    #[test]
    fn su2_examples() {
        assert!(su2_from_euler(EulerAngles::zero()).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
        let neg_i_y = pauli_y().scale(c(0.0, -1.0));
        assert!(su2_from_euler(EulerAngles::new(0.0, PI, 0.0).unwrap()).max_abs_diff(&neg_i_y) < 1e-15);

        // hand-multiplied product for (π/2, π/2, π/2)
        let h = FRAC_PI_2;
        let rz_h = CMatrix::from_rows(&[&[C64::from_polar(1.0, -h / 2.0), c(0.0, 0.0)], &[c(0.0, 0.0), C64::from_polar(1.0, h / 2.0)]]);
        let s = (h / 2.0).sin();
        let ry_h = CMatrix::from_rows(&[&[c(s, 0.0), c(-s, 0.0)], &[c(s, 0.0), c(s, 0.0)]]);
        let expected = &(&rz_h * &ry_h) * &rz_h;
        assert!(su2_from_euler(EulerAngles::new(h, h, h).unwrap()).max_abs_diff(&expected) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let u = su2_from_euler(random_angles(&mut rng));
            assert!((u.determinant_2x2() - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_from_su2(&CMatrix::identity(2)).unwrap(), EulerAngles::zero());
        let e = euler_from_su2(&rz(0.7)).unwrap();
        assert!((e.theta1 - 0.7).abs() < 1e-12 && e.theta2.abs() < 1e-12 && e.theta3 == 0.0);
        let e = euler_from_su2(&ry(PI).matmul(&rz(0.4))).unwrap();
        assert!((e.theta2 - PI).abs() < 1e-12 && e.theta3 == 0.0);
        assert!(equal_up_to_global_phase(&su2_from_euler(e), &ry(PI).matmul(&rz(0.4)), 1e-12));

        let bad = CMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(euler_from_su2(&bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn euler_roundtrip_random_su2() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let u = random::su2(&mut rng);
            let e = euler_from_su2(&u).unwrap();
            assert!((0.0..=PI).contains(&e.theta2));
            worst = worst.max(global_phase_distance(&su2_from_euler(e), &u));
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn euler_roundtrip_canonical_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = random_angles(&mut rng);
            let back = euler_from_su2(&su2_from_euler(a)).unwrap();
            for (x, y) in a.to_array().iter().zip(back.to_array()) {
                assert!((x - y).abs() < 1e-9, "{a:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn five_op_sequence() {
        let dev = brisbane_device();
        let seq = u3_sx_vz_sequence(0.0, 0.0, 0.0, 0, &dev);
        assert_eq!(seq.len(), 5);
        assert_eq!(seq.iter().filter(|o| o.kind == NativeKind::Sx).count(), 2);
        assert_eq!(seq.iter().filter(|o| o.kind == NativeKind::RzVirtual).count(), 3);
        assert!(seq.iter().all(|o| o.kind != NativeKind::RzVirtual || o.duration_ns == 0.0));
        assert!(equal_up_to_global_phase(&sequence_unitary(&seq, 1), &CMatrix::identity(2), 1e-9));

        let seq = u3_sx_vz_sequence(PI, 0.0, 0.0, 0, &dev);
        let target = su2_from_euler(EulerAngles::new(0.0, PI, 0.0).unwrap());
        assert!(equal_up_to_global_phase(&sequence_unitary(&seq, 1), &target, 1e-9));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let (t, p, l) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            let target = rz(p).matmul(&ry(t)).matmul(&rz(l));
            let got = sequence_unitary(&u3_sx_vz_sequence(t, p, l, 0, &dev), 1);
            assert!(global_phase_distance(&got, &target) < 1e-9);
        }
    }

    #[test]
    fn controlled_su2_examples() {
        assert!(controlled_su2(EulerAngles::zero()).max_abs_diff(&CMatrix::identity(4)) < 1e-15);

        // RX(π) = −iX via (−π/2, π, π/2); the block construction gives
        // CNOT(control 1, target 0) with a relative −i on the control-1 block.
        let x_like = EulerAngles::new(-FRAC_PI_2, PI, FRAC_PI_2).unwrap();
        let cu = controlled_su2(x_like);
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = c(1.0, 0.0);
        expected[(2, 2)] = c(1.0, 0.0);
        expected[(1, 3)] = c(0.0, -1.0);
        expected[(3, 1)] = c(0.0, -1.0);
        assert!(cu.max_abs_diff(&expected) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = random_angles(&mut rng);
            assert!(controlled_su2(a).unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn abc_decomposition() {
        let dev = brisbane_device();
        let ops = decompose_controlled_su2(EulerAngles::zero(), &dev);
        assert_eq!(ops.iter().filter(|o| o.is_two_qubit()).count(), 2);
        assert!(equal_up_to_global_phase(&sequence_unitary(&ops, 2), &CMatrix::identity(4), 1e-9));

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let a = random_angles(&mut rng);
            let ops = decompose_controlled_su2(a, &dev);
            assert_eq!(ops.iter().filter(|o| o.is_two_qubit()).count(), 2);
            assert!(global_phase_distance(&sequence_unitary(&ops, 2), &controlled_su2(a)) < 1e-9);
            for op in &ops {
                let expected = match op.kind {
                    NativeKind::RzVirtual => 0.0,
                    NativeKind::Cnot => 660.0,
                    _ => 300.0,
                };
                assert_eq!(op.duration_ns, expected);
            }
        }
    }

    #[test]
    fn cnot_idealized_device() {
        let dev = ideal_device(1.0, 0.0, 0.0);
        let sched = cnot_from_cr_blocks(&dev).unwrap();
        let u = schedule_unitary(&sched, 2, &dev);
        assert!(global_phase_distance(&u, &qcore::cnot(0, 1)) < 1e-8);
        let twice: Vec<ScheduleOp> = sched.iter().chain(sched.iter()).cloned().collect();
        assert!(equal_up_to_global_phase(&schedule_unitary(&twice, 2, &dev), &CMatrix::identity(4), 1e-8));
        // analytic amplitude for this Hamiltonian: Ω T = π/√2
        let omega = sched
            .iter()
            .find_map(|o| match o {
                ScheduleOp::CrossResonance(p) => Some(p.amplitude),
                _ => None,
            })
            .unwrap();
        // tangent zero: the amplitude is located to about √ε
        assert!((omega * dev.twoq_duration_ns - PI / 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn cnot_brisbane() {
        let dev = brisbane_device();
        let sched = cnot_from_cr_blocks(&dev).unwrap();
        assert_eq!(sched.iter().filter(|o| matches!(o, ScheduleOp::CrossResonance(_))).count(), 1);
        assert!(cnot_fidelity(&sched, &dev, 0, 1) > 0.999);

        let mut dev = brisbane_device();
        dev.nu = 0.02;
        let sched = cnot_from_cr_blocks(&dev).unwrap();
        assert!(cnot_fidelity(&sched, &dev, 0, 1) > 0.999);

        let sched = cnot_from_cr_blocks_on(&brisbane_device(), 1, 0).unwrap();
        assert!(cnot_fidelity(&sched, &brisbane_device(), 1, 0) > 0.999);
    }

    #[test]
    fn cnot_needs_interaction() {
        let dev = ideal_device(0.0, 0.0, 0.0);
        assert!(matches!(cnot_from_cr_blocks(&dev), Err(Error::NoEntanglingInteraction)));
    }

    #[test]
    fn wrap_angle_range() {
        for x in [-7.0, -PI, 0.0, PI, 3.5, 100.0] {
            let w = wrap_angle(x);
            assert!(w > -PI && w <= PI);
            let turns = (x - w) / (2.0 * PI);
            assert!((turns - turns.round()).abs() < 1e-12);
        }
    }
}
