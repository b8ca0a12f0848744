//! Kraus channels, the channel-insertion policy and SPAM errors.
//!
//! Every physical operation is followed by its channels in a fixed order:
//! depolarizing, then amplitude damping, then phase damping. Two-qubit
//! operations get the two-qubit depolarizing channel on the pair followed by
//! per-qubit damping for the two-qubit gate time. Virtual Z rotations are
//! free of both time and error.

mod device;

pub use device::{
    brisbane_device, brisbane_file, ghz_to_rad_per_ns, rad_per_ns_to_ghz, DeviceFile, DeviceModel,
    QubitNoiseParams, QubitRow,
};

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::qcore::{c, embed_1q, kron, paulis, CMatrix, DensityMatrix, PureState, C64};

/// Operator-sum representation `E(ρ) = Σ Kₖ ρ Kₖ†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidParameter("channel needs at least one operator".into()))?;
        let d = first.rows();
        for k in &operators {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: k.rows(),
                });
            }
        }
        Ok(KrausChannel { operators })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            operators: vec![CMatrix::identity(dim)],
        }
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    /// `‖Σ K†K − I‖_max`.
    pub fn completeness_error(&self) -> f64 {
        let d = self.dim();
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc.add(&k.adjoint().matmul(k)));
        sum.max_abs_diff(&CMatrix::identity(d))
    }
}

fn sqrt_c(x: f64) -> C64 {
    c(x.sqrt(), 0.0)
}

/// `K₀ = √(1−p) I`, `K₁,₂,₃ = √(p/3) σ^{X,Y,Z}`.
pub fn depolarizing_1q(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let [i, x, y, z] = paulis();
    KrausChannel::new(vec![
        i.scale(sqrt_c(1.0 - p)),
        x.scale(sqrt_c(p / 3.0)),
        y.scale(sqrt_c(p / 3.0)),
        z.scale(sqrt_c(p / 3.0)),
    ])
}

/// `√(1−p) I₄` plus `√(p/15) σᵢ⊗σⱼ` for the 15 non-identity Pauli pairs.
pub fn depolarizing_2q(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let ps = paulis();
    let mut ops = vec![CMatrix::identity(4).scale(sqrt_c(1.0 - p))];
    for (i, a) in ps.iter().enumerate() {
        for (j, b) in ps.iter().enumerate() {
            if i == 0 && j == 0 {
                continue;
            }
            ops.push(kron(a, b).scale(sqrt_c(p / 15.0)));
        }
    }
    KrausChannel::new(ops)
}

pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability("gamma", gamma)?;
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    KrausChannel::new(vec![
        CMatrix::from_rows(&[&[l, o], &[o, sqrt_c(1.0 - gamma)]]),
        CMatrix::from_rows(&[&[o, sqrt_c(gamma)], &[o, o]]),
    ])
}

pub fn phase_damping(lambda: f64) -> Result<KrausChannel> {
    check_probability("lambda", lambda)?;
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    KrausChannel::new(vec![
        CMatrix::from_rows(&[&[l, o], &[o, sqrt_c(1.0 - lambda)]]),
        CMatrix::from_rows(&[&[o, o], &[o, sqrt_c(lambda)]]),
    ])
}

/// `γ = 1 − e^{−t/T1}`, `λ = 1 − e^{−t/T2}`.
pub fn damping_params(t_ns: f64, t1_ns: f64, t2_ns: f64) -> (f64, f64) {
    (1.0 - (-t_ns / t1_ns).exp(), 1.0 - (-t_ns / t2_ns).exp())
}

/// Depolarizing probability of a qubit: the mean of its X and SX errors.
pub fn estimate_depolarizing_p(dev: &DeviceModel, qubit: usize) -> f64 {
    let q = dev.qubit(qubit);
    0.5 * (q.x_err + q.sx_err)
}

/// Which qubits a channel acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Targets {
    One(usize),
    /// Both qubits of a two-qubit register, in register order.
    Pair,
}

/// Parameterized channel families. Application uses closed forms; the
/// Kraus form is available through [`NoiseChannel::kraus`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseChannel {
    Depolarizing1q(f64),
    Depolarizing2q(f64),
    AmplitudeDamping(f64),
    PhaseDamping(f64),
}

impl NoiseChannel {
    pub fn kraus(&self) -> KrausChannel {
        match *self {
            NoiseChannel::Depolarizing1q(p) => depolarizing_1q(p),
            NoiseChannel::Depolarizing2q(p) => depolarizing_2q(p),
            NoiseChannel::AmplitudeDamping(g) => amplitude_damping(g),
            NoiseChannel::PhaseDamping(l) => phase_damping(l),
        }
        .expect("channel parameters validated at construction")
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            NoiseChannel::Depolarizing1q(x)
            | NoiseChannel::Depolarizing2q(x)
            | NoiseChannel::AmplitudeDamping(x)
            | NoiseChannel::PhaseDamping(x) => x,
        }
    }

    /// In-place application. Single-qubit families act on `Targets::One`,
    /// the two-qubit depolarizing channel on `Targets::Pair`.
    pub fn apply_in_place(&self, rho: &mut DensityMatrix, targets: Targets) {
        match (*self, targets) {
            (NoiseChannel::Depolarizing2q(p), Targets::Pair) => depolarize_all(rho, p),
            (NoiseChannel::Depolarizing1q(p), Targets::One(q)) => depolarize_qubit(rho, q, p),
            (NoiseChannel::AmplitudeDamping(g), Targets::One(q)) => amplitude_damp_qubit(rho, q, g),
            (NoiseChannel::PhaseDamping(l), Targets::One(q)) => phase_damp_qubit(rho, q, l),
            (ch, t) => panic!("channel {ch:?} cannot act on {t:?}"),
        }
    }
}

/// Index pairs `(i0, i1)` differing only in the bit of `qubit`.
fn bit_pairs(n_qubits: usize, qubit: usize) -> impl Iterator<Item = (usize, usize)> {
    let mask = 1usize << (n_qubits - 1 - qubit);
    (0..1usize << n_qubits).filter(move |i| i & mask == 0).map(move |i| (i, i | mask))
}

// ρ → (1 − 4p/3) ρ + (2p/3) tr_q(ρ) ⊗ I_q, using Σ_{P≠I} P A P = 2 tr(A) I − A.
fn depolarize_qubit(rho: &mut DensityMatrix, qubit: usize, p: f64) {
    let nq = rho.n_qubits();
    let n = rho.dim();
    let keep = 1.0 - 4.0 * p / 3.0;
    let mix = 2.0 * p / 3.0;
    let pairs: Vec<(usize, usize)> = bit_pairs(nq, qubit).collect();
    let m = rho.data_mut();
    for &(r0, r1) in &pairs {
        for &(c0, c1) in &pairs {
            let a00 = m[r0 * n + c0];
            let a01 = m[r0 * n + c1];
            let a10 = m[r1 * n + c0];
            let a11 = m[r1 * n + c1];
            let tr = a00 + a11;
            m[r0 * n + c0] = a00 * keep + tr * mix;
            m[r1 * n + c1] = a11 * keep + tr * mix;
            m[r0 * n + c1] = a01 * keep;
            m[r1 * n + c0] = a10 * keep;
        }
    }
}

// ρ → (1 − 16p/15) ρ + (4p/15) I, using Σ_P P ρ P = 4 tr(ρ) I over all 16 pairs.
fn depolarize_all(rho: &mut DensityMatrix, p: f64) {
    let n = rho.dim();
    let keep = 1.0 - 16.0 * p / 15.0;
    let mix = 4.0 * p / 15.0;
    let tr = rho.trace();
    let m = rho.data_mut();
    for (idx, z) in m.iter_mut().enumerate() {
        *z *= keep;
        if idx / n == idx % n {
            *z += c(mix * tr, 0.0);
        }
    }
}

fn amplitude_damp_qubit(rho: &mut DensityMatrix, qubit: usize, gamma: f64) {
    let nq = rho.n_qubits();
    let n = rho.dim();
    let s = (1.0 - gamma).sqrt();
    let pairs: Vec<(usize, usize)> = bit_pairs(nq, qubit).collect();
    let m = rho.data_mut();
    for &(r0, r1) in &pairs {
        for &(c0, c1) in &pairs {
            let a11 = m[r1 * n + c1];
            m[r0 * n + c0] += a11 * gamma;
            m[r1 * n + c1] = a11 * (1.0 - gamma);
            m[r0 * n + c1] *= s;
            m[r1 * n + c0] *= s;
        }
    }
}

fn phase_damp_qubit(rho: &mut DensityMatrix, qubit: usize, lambda: f64) {
    let nq = rho.n_qubits();
    let n = rho.dim();
    let s = (1.0 - lambda).sqrt();
    let pairs: Vec<(usize, usize)> = bit_pairs(nq, qubit).collect();
    let m = rho.data_mut();
    for &(r0, r1) in &pairs {
        for &(c0, c1) in &pairs {
            m[r0 * n + c1] *= s;
            m[r1 * n + c0] *= s;
        }
    }
}

/// Kraus sum, with single-qubit channels lifted onto `targets` by tensoring
/// with the identity.
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel, targets: Targets) -> Result<DensityMatrix> {
    let n_qubits = rho.n_qubits();
    let lifted: Vec<CMatrix> = match (ch.dim(), targets) {
        (2, Targets::One(q)) if q < n_qubits => ch.operators().iter().map(|k| embed_1q(k, q, n_qubits)).collect(),
        (4, Targets::Pair) if n_qubits == 2 => ch.operators().to_vec(),
        (d, _) => {
            return Err(Error::DimensionMismatch {
                expected: if matches!(targets, Targets::Pair) { 4 } else { 2 },
                got: d,
            })
        }
    };
    let n = rho.dim();
    let mut out = CMatrix::zeros(n, n);
    for k in &lifted {
        out = out.add(&k.matmul(rho.matrix()).matmul(&k.adjoint()));
    }
    DensityMatrix::from_matrix_unchecked(out)
}

/// Noise configuration of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisePolicy {
    pub enabled: bool,
    /// Replaces every depolarizing probability (one- and two-qubit).
    pub depolarizing_override_p: Option<f64>,
    pub spam_enabled: bool,
}

impl NoisePolicy {
    pub fn noiseless() -> Self {
        NoisePolicy {
            enabled: false,
            depolarizing_override_p: None,
            spam_enabled: false,
        }
    }

    /// Full device noise including SPAM.
    pub fn device() -> Self {
        NoisePolicy {
            enabled: true,
            depolarizing_override_p: None,
            spam_enabled: true,
        }
    }

    pub fn with_override(mut self, p: f64) -> Result<Self> {
        check_probability("depolarizing override", p)?;
        self.depolarizing_override_p = Some(p);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.depolarizing_override_p {
            check_probability("depolarizing override", p)?;
        }
        Ok(())
    }
}

/// Classes of operation for channel insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    OneQubitPulse,
    OneQubitGate,
    TwoQubit,
    VirtualZ,
}

/// Channels that follow an operation, in application order.
pub fn post_op_channels(
    kind: OpKind,
    duration_ns: f64,
    qubits: &[usize],
    dev: &DeviceModel,
    policy: &NoisePolicy,
) -> Vec<(NoiseChannel, Targets)> {
    if !policy.enabled {
        return Vec::new();
    }
    let damping = |q: usize, out: &mut Vec<(NoiseChannel, Targets)>| {
        let params = dev.qubit(q);
        let (gamma, lambda) = damping_params(duration_ns, params.t1_ns, params.t2_ns);
        out.push((NoiseChannel::AmplitudeDamping(gamma), Targets::One(q)));
        out.push((NoiseChannel::PhaseDamping(lambda), Targets::One(q)));
    };
    let mut out = Vec::with_capacity(6);
    match kind {
        OpKind::VirtualZ => {}
        OpKind::OneQubitPulse | OpKind::OneQubitGate => {
            let q = qubits[0];
            let p = policy
                .depolarizing_override_p
                .unwrap_or_else(|| estimate_depolarizing_p(dev, q));
            out.push((NoiseChannel::Depolarizing1q(p), Targets::One(q)));
            damping(q, &mut out);
        }
        OpKind::TwoQubit => {
            let p = policy.depolarizing_override_p.unwrap_or(dev.ecr_err);
            out.push((NoiseChannel::Depolarizing2q(p), Targets::Pair));
            for &q in qubits {
                damping(q, &mut out);
            }
        }
    }
    out
}

/// Initial state: each qubit is `|1⟩` with probability `p_prep` when SPAM is
/// enabled, otherwise exactly `|0…0⟩`.
pub fn prep_state(dev: &DeviceModel, n_qubits: usize, policy: &NoisePolicy) -> DensityMatrix {
    assert!(n_qubits == 1 || n_qubits == 2);
    if !policy.spam_enabled {
        return DensityMatrix::ground(n_qubits);
    }
    let single = |q: usize| {
        let p = dev.qubit(q).p_prep;
        CMatrix::from_real_diagonal(&[1.0 - p, p])
    };
    let m = if n_qubits == 1 { single(0) } else { kron(&single(0), &single(1)) };
    DensityMatrix::from_matrix_unchecked(m).expect("shape")
}

/// Probabilities of reading out `|s₀⟩` and `|s₁⟩` from a single-qubit state.
///
/// `basis` holds `|s₀⟩` and `|s₁⟩` as its columns. With SPAM enabled the
/// ideal probabilities go through the confusion matrix
/// `[[1−p10, p01], [p10, 1−p01]]`.
pub fn readout_probs(
    rho1: &DensityMatrix,
    basis: &CMatrix,
    dev: &DeviceModel,
    qubit: usize,
    policy: &NoisePolicy,
) -> Result<(f64, f64)> {
    if rho1.dim() != 2 || basis.rows() != 2 || basis.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho1.dim().max(basis.rows()),
        });
    }
    let m = rho1.matrix();
    let prob = |col: usize| {
        let s = [basis[(0, col)], basis[(1, col)]];
        let mut acc = c(0.0, 0.0);
        for r in 0..2 {
            for k in 0..2 {
                acc += s[r].conj() * m[(r, k)] * s[k];
            }
        }
        acc.re.clamp(0.0, 1.0)
    };
    let (p0, p1) = (prob(0), prob(1));
    if !policy.spam_enabled {
        return Ok((p0, p1));
    }
    let q = dev.qubit(qubit);
    Ok((
        (1.0 - q.readout_p10) * p0 + q.readout_p01 * p1,
        q.readout_p10 * p0 + (1.0 - q.readout_p01) * p1,
    ))
}

/// Columns `|s₀⟩`, `|s₁⟩` as a 2×2 matrix.
pub fn basis_from_states(s0: &PureState, s1: &PureState) -> CMatrix {
    let (a, b) = (s0.amplitudes(), s1.amplitudes());
    CMatrix::from_rows(&[&[a[0], b[0]], &[a[1], b[1]]])
}
