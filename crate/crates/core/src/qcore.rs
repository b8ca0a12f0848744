//! Dense complex linear algebra and quantum-state primitives for one and two
//! qubits.
//!
//! Qubit 1 (index 0) is always the leftmost tensor factor, so for two qubits
//! the computational basis index is `2 * b0 + b1`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance used when validating Hermiticity, unitarity and normalization.
pub const STATE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("matrix dimensions must be positive".into()));
        }
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Square matrix from row slices. Panics on ragged input; intended for
    /// literal constants.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.len(), m, "ragged matrix literal");
            data.extend_from_slice(r);
        }
        CMatrix { rows: n, cols: m, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(*d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for col in 0..self.cols {
                out[(col, r)] = self[(r, col)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn determinant_2x2(&self) -> C64 {
        assert_eq!((self.rows, self.cols), (2, 2));
        self.data[0] * self.data[3] - self.data[1] * self.data[2]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for col in 0..m.ncols() {
                out[(r, col)] = m[(r, col)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + col]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

pub fn pauli_i() -> CMatrix {
    CMatrix::identity(2)
}

pub fn pauli_x() -> CMatrix {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    CMatrix::from_rows(&[&[o, l], &[l, o]])
}

pub fn pauli_y() -> CMatrix {
    let o = c(0.0, 0.0);
    CMatrix::from_rows(&[&[o, c(0.0, -1.0)], &[c(0.0, 1.0), o]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// `[I, X, Y, Z]`.
pub fn paulis() -> [CMatrix; 4] {
    [pauli_i(), pauli_x(), pauli_y(), pauli_z()]
}

/// `exp(−i θ/2 σˣ)`.
pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (0.5 * theta).sin_cos();
    CMatrix::from_rows(&[&[c(co, 0.0), c(0.0, -s)], &[c(0.0, -s), c(co, 0.0)]])
}

/// `exp(−i θ/2 σʸ)`.
pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (0.5 * theta).sin_cos();
    CMatrix::from_rows(&[&[c(co, 0.0), c(-s, 0.0)], &[c(s, 0.0), c(co, 0.0)]])
}

/// `exp(−i θ/2 σᶻ)`.
pub fn rz(theta: f64) -> CMatrix {
    let half = 0.5 * theta;
    let o = c(0.0, 0.0);
    CMatrix::from_rows(&[&[C64::from_polar(1.0, -half), o], &[o, C64::from_polar(1.0, half)]])
}

/// Canonical CNOT with `control` and `target` given as register indices of a
/// two-qubit register.
pub fn cnot(control: usize, target: usize) -> CMatrix {
    assert!(control < 2 && target < 2 && control != target);
    let mut m = CMatrix::zeros(4, 4);
    for b in 0..4usize {
        let cbit = (b >> (1 - control)) & 1;
        let out = if cbit == 1 { b ^ (1 << (1 - target)) } else { b };
        m[(out, b)] = c(1.0, 0.0);
    }
    m
}

/// Kronecker product; `a` is the leftmost factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let av = a[(ar, ac)];
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = av * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Lifts a single-qubit operator onto `qubit` of an `n_qubits` register.
pub fn embed_1q(op: &CMatrix, qubit: usize, n_qubits: usize) -> CMatrix {
    assert!(qubit < n_qubits);
    let mut out = CMatrix::identity(1);
    for q in 0..n_qubits {
        let factor = if q == qubit { op.clone() } else { pauli_i() };
        out = kron(&out, &factor);
    }
    out
}

/// Real eigenvalues (ascending) and eigenvectors (columns) of a Hermitian
/// matrix.
pub fn hermitian_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let err = h.hermiticity_error();
    if err > STATE_TOL {
        return Err(Error::NotHermitian(err));
    }
    let eig = SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..h.rows).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_nalgebra(&eig.eigenvectors.select_columns(order.iter()));
    Ok((values, vecs))
}

/// `exp(−i H t)` for Hermitian `H`, by spectral decomposition.
///
/// 2×2 generators use the closed spectral form `H = c·I + a·σ` with
/// eigenvalues `c ± |a|`; larger ones go through a numerical eigensolver.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let err = h.hermiticity_error();
    if err > STATE_TOL {
        return Err(Error::NotHermitian(err));
    }
    if h.rows == 2 {
        let c0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
        let az = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
        let ax = h[(1, 0)].re;
        let ay = h[(1, 0)].im;
        return Ok(su2_exp(c0, [ax, ay, az], t));
    }
    let (values, vecs) = hermitian_eigen(h)?;
    let n = h.rows;
    let mut scaled = vecs.clone();
    for col in 0..n {
        let phase = C64::from_polar(1.0, -values[col] * t);
        for r in 0..n {
            scaled[(r, col)] *= phase;
        }
    }
    Ok(scaled.matmul(&vecs.adjoint()))
}

/// `exp(−i t (c·I + a·σ))` in closed form.
pub(crate) fn su2_exp(c0: f64, a: [f64; 3], t: f64) -> CMatrix {
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let (s, co) = (norm * t).sin_cos();
    // sin(|a| t) / |a|, finite as |a| -> 0
    let sinc = if norm > 1e-300 { s / norm } else { t };
    let g = C64::from_polar(1.0, -c0 * t);
    let (nx, ny, nz) = (a[0] * sinc, a[1] * sinc, a[2] * sinc);
    // cos I − i sinc (ax X + ay Y + az Z)
    let m00 = c(co, -nz);
    let m01 = c(-ny, -nx);
    let m10 = c(ny, -nx);
    let m11 = c(co, nz);
    CMatrix::from_rows(&[&[g * m00, g * m01], &[g * m10, g * m11]])
}

/// Smallest `‖U − e^{iφ}V‖_max`, with `φ` chosen to align the
/// largest-magnitude entry of `V` with the matching entry of `U`.
pub fn global_phase_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    assert_eq!((u.rows, u.cols), (v.rows, v.cols));
    let (idx, _) = v
        .data
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let ratio = u.data[idx] / v.data[idx];
    let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { C64::new(1.0, 0.0) };
    u.max_abs_diff(&v.scale(phase))
}

pub fn equal_up_to_global_phase(u: &CMatrix, v: &CMatrix, tol: f64) -> bool {
    global_phase_distance(u, v) < tol
}

/// Average-free gate fidelity `|tr(U†V)/d|²` between two unitaries.
pub fn unitary_fidelity(u: &CMatrix, v: &CMatrix) -> f64 {
    let d = u.rows as f64;
    (u.adjoint().matmul(v).trace() / d).norm_sqr()
}

/// Normalized state vector on one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidState(format!("dimension {dim} is not 2 or 4")));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm2} is not 1")));
        }
        Ok(PureState { amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        assert!(index < dim);
        let mut amplitudes = vec![c(0.0, 0.0); dim];
        amplitudes[index] = c(1.0, 0.0);
        PureState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Density matrix of one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace and eigenvalues ≥ −1e-9.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Only checks the shape. Used internally on the hot path, where the
    /// physical invariants are guaranteed by construction.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || (matrix.rows != 2 && matrix.rows != 4) {
            return Err(Error::InvalidState(format!(
                "density matrix must be 2x2 or 4x4, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let n = psi.dim();
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            for col in 0..n {
                m[(r, col)] = psi.amplitudes[r] * psi.amplitudes[col].conj();
            }
        }
        DensityMatrix { matrix: m }
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn ground(n_qubits: usize) -> Self {
        Self::from_pure(&PureState::basis(n_qubits, 0))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        DensityMatrix {
            matrix: CMatrix::identity(d).scale_re(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn n_qubits(&self) -> usize {
        if self.dim() == 2 {
            1
        } else {
            2
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match hermitian_eigen(&self.matrix) {
            Ok((values, _)) => values[0],
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// In-place `ρ ← U ρ U†` with `u` a 2×2 unitary acting on `qubit`.
    pub fn apply_1q_in_place(&mut self, u: &CMatrix, qubit: usize) {
        debug_assert_eq!((u.rows, u.cols), (2, 2));
        let n = self.dim();
        let mask = 1usize << (self.n_qubits() - 1 - qubit);
        let [u00, u01, u10, u11] = [u.data[0], u.data[1], u.data[2], u.data[3]];
        let m = &mut self.matrix.data;
        for col in 0..n {
            for r0 in (0..n).filter(|r| r & mask == 0) {
                let r1 = r0 | mask;
                let a = m[r0 * n + col];
                let b = m[r1 * n + col];
                m[r0 * n + col] = u00 * a + u01 * b;
                m[r1 * n + col] = u10 * a + u11 * b;
            }
        }
        let [v00, v01, v10, v11] = [u00.conj(), u01.conj(), u10.conj(), u11.conj()];
        for r in 0..n {
            for c0 in (0..n).filter(|x| x & mask == 0) {
                let c1 = c0 | mask;
                let a = m[r * n + c0];
                let b = m[r * n + c1];
                m[r * n + c0] = a * v00 + b * v01;
                m[r * n + c1] = a * v10 + b * v11;
            }
        }
    }

    /// In-place `ρ ← U ρ U†` with `u` acting on the full register.
    pub fn apply_full_in_place(&mut self, u: &CMatrix) {
        self.matrix = u.matmul(&self.matrix).matmul(&u.adjoint());
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.matrix.data
    }
}

/// `U ρ U†`.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if u.rows != rho.dim() || u.cols != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: u.rows,
        });
    }
    let mut out = rho.clone();
    out.apply_full_in_place(u);
    Ok(out)
}

/// Reduced state of qubit 1 (the first tensor factor) of a two-qubit state.
pub fn partial_trace_keep_first(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let m = rho.matrix();
    let mut out = CMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            out[(a, b)] = m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)];
        }
    }
    Ok(DensityMatrix { matrix: out })
}

/// Qubit-1 marginal of any register (identity for one qubit).
pub fn first_qubit_marginal(rho: &DensityMatrix) -> DensityMatrix {
    if rho.dim() == 2 {
        rho.clone()
    } else {
        partial_trace_keep_first(rho).expect("dimension checked")
    }
}

/// `⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]`.
pub fn fidelity_pure(target: &PureState, rho: &DensityMatrix) -> Result<f64> {
    let n = rho.dim();
    if target.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: target.dim(),
        });
    }
    let m = rho.matrix();
    let psi = target.amplitudes();
    let mut acc = c(0.0, 0.0);
    for r in 0..n {
        let mut row = c(0.0, 0.0);
        for col in 0..n {
            row += m[(r, col)] * psi[col];
        }
        acc += psi[r].conj() * row;
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Random matrices and states for tests and the verification command.
pub mod random {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian_c(rng: &mut impl Rng) -> C64 {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    /// Ginibre matrix with i.i.d. complex Gaussian entries.
    pub fn ginibre(n: usize, rng: &mut impl Rng) -> CMatrix {
        let data = (0..n * n).map(|_| gaussian_c(rng)).collect();
        CMatrix::from_vec(n, n, data).expect("shape")
    }

    pub fn hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let g = ginibre(n, rng);
        g.add(&g.adjoint()).scale_re(0.5)
    }

    /// Haar-random unitary (Gram–Schmidt on a Ginibre matrix).
    pub fn unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
        let g = ginibre(n, rng);
        let mut q = CMatrix::zeros(n, n);
        for col in 0..n {
            let mut v: Vec<C64> = (0..n).map(|r| g[(r, col)]).collect();
            for prev in 0..col {
                let proj: C64 = (0..n).map(|r| q[(r, prev)].conj() * v[r]).sum();
                for (r, x) in v.iter_mut().enumerate() {
                    *x -= proj * q[(r, prev)];
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for (r, x) in v.iter().enumerate() {
                q[(r, col)] = x / norm;
            }
        }
        q
    }

    /// Haar-random element of SU(2).
    pub fn su2(rng: &mut impl Rng) -> CMatrix {
        let u = unitary(2, rng);
        let det = u.determinant_2x2();
        u.scale(det.sqrt().inv())
    }

    pub fn pure_state(n_qubits: usize, rng: &mut impl Rng) -> PureState {
        let d = 1 << n_qubits;
        let v: Vec<C64> = (0..d).map(|_| gaussian_c(rng)).collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        PureState::new(v.into_iter().map(|x| x / norm).collect()).expect("normalized")
    }

    /// Full-rank random density matrix `G G† / tr(G G†)`.
    pub fn density_matrix(n_qubits: usize, rng: &mut impl Rng) -> DensityMatrix {
        let g = ginibre(1 << n_qubits, rng);
        let m = g.matmul(&g.adjoint());
        let tr = m.trace().re;
        let mut m = m.scale_re(1.0 / tr);
        // enforce exact Hermiticity against rounding
        let m2 = m.adjoint();
        m = m.add(&m2).scale_re(0.5);
        DensityMatrix::from_matrix_unchecked(m).expect("shape")
    }
}
