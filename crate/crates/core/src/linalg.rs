//! Dense complex matrices over `q` qubits.
//!
//! Qubit 0 is the most significant bit of a computational-basis index, so
//! `|q0 q1 ... q_{n-1}>` has index `q0 * 2^{n-1} + ... + q_{n-1}`. Every tensor
//! ordering in the crate follows this convention.
//!
//! Hermiticity is never assumed: coherence operators such as `E(|a><b|)` are
//! not Hermitian, and each operation states its own requirement.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `max |M - M^dagger|` entry accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest qubit count accepted for dense work.
pub const MAX_DENSE_QUBITS: usize = 12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix of dimension `2^qubits`, stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseOperator {
    qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseOperator({} qubits)", self.qubits)?;
        if self.dim <= 8 {
            for r in 0..self.dim {
                writeln!(f)?;
                for c in 0..self.dim {
                    let z = self[(r, c)];
                    write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

impl DenseOperator {
    pub fn zeros(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            qubits,
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(qubits: usize) -> Self {
        let mut m = Self::zeros(qubits);
        for i in 0..m.dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from an element generator `f(row, col)`.
    pub fn from_fn(qubits: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(qubits);
        for r in 0..m.dim {
            for c in 0..m.dim {
                m.data[r * m.dim + c] = f(r, c);
            }
        }
        m
    }

    /// Wraps row-major data; the length must be a square power of four.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() || !dim.is_power_of_two() {
            return Err(Error::input(format!(
                "{} entries do not form a 2^q x 2^q matrix",
                data.len()
            )));
        }
        Ok(Self {
            qubits: dim.trailing_zeros() as usize,
            dim,
            data,
        })
    }

    /// Real 2x2 helper, mostly for tests and small constructions.
    pub fn from_real_2x2(m: [[f64; 2]; 2]) -> Self {
        Self::from_fn(1, |r, c| Complex64::new(m[r][c], 0.0))
    }

    /// `|a><b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() || !a.len().is_power_of_two() {
            return Err(Error::input("outer product needs equal power-of-two lengths"));
        }
        let qubits = a.len().trailing_zeros() as usize;
        Ok(Self::from_fn(qubits, |r, c| a[r] * b[c].conj()))
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.qubits, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.qubits, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            qubits: self.qubits,
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|M - M^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(self.qubits);
        for r in 0..n {
            let row = &self.data[r * n..(r + 1) * n];
            let dst = &mut out.data[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &rhs.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|r| {
                self.data[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `<u| M |v>`.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let mv = self.apply(v);
        u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl std::ops::Index<(usize, usize)> for DenseOperator {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseOperator {
            qubits: self.qubits,
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseOperator {
            qubits: self.qubits,
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.matmul(rhs)
    }
}

/// Kronecker product `A ⊗ B`; `A` occupies the leading qubits.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    let (da, db) = (a.dim, b.dim);
    let mut out = DenseOperator::zeros(a.qubits + b.qubits);
    let n = out.dim;
    for ar in 0..da {
        for ac in 0..da {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..db {
                let row = (ar * db + br) * n + ac * db;
                for bc in 0..db {
                    out.data[row + bc] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Bit mask selecting `qubits` under the MSB-first convention.
pub(crate) fn qubit_mask(qubits: &[usize], n: usize) -> Result<usize> {
    let mut mask = 0usize;
    for &q in qubits {
        if q >= n {
            return Err(Error::input(format!("qubit {q} out of range for {n} qubits")));
        }
        mask |= 1 << (n - 1 - q);
    }
    Ok(mask)
}

/// Transposes the tensor factors on `subsystem` and leaves the rest alone.
pub fn partial_transpose(m: &DenseOperator, subsystem: &[usize]) -> Result<DenseOperator> {
    let mask = qubit_mask(subsystem, m.qubits)?;
    Ok(DenseOperator::from_fn(m.qubits, |r, c| {
        let r2 = (r & !mask) | (c & mask);
        let c2 = (c & !mask) | (r & mask);
        m[(r2, c2)]
    }))
}

/// Sum of singular values.
///
/// Singular values come from a direct SVD; squaring through `M^dagger M`
/// turns a rounding error of `eps` into `sqrt(eps)` on zero singular values,
/// which the rank-deficient coherence operators hit constantly.
pub fn trace_norm(m: &DenseOperator) -> f64 {
    if m.dim == 1 {
        return m.data[0].norm();
    }
    singular_values(m).iter().sum()
}

pub fn singular_values(m: &DenseOperator) -> Vec<f64> {
    let svd = m.to_nalgebra().svd(false, false);
    svd.singular_values.iter().map(|s| s.max(0.0)).collect()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DenseOperator,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim).map(|r| self.vectors[(r, k)]).collect()
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> DenseOperator {
        let v = &self.vectors;
        let n = v.dim;
        DenseOperator::from_fn(v.qubits, |r, c| {
            (0..n)
                .map(|k| v[(r, k)] * self.values[k] * v[(c, k)].conj())
                .sum()
        })
    }
}

pub fn eig_hermitian(m: &DenseOperator) -> Result<HermitianEigen> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::input(format!(
            "matrix is not Hermitian (max |M - M^dagger| = {defect:e})"
        )));
    }
    let eig = m.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DenseOperator::from_fn(m.qubits, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(m: &DenseOperator) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::input(format!(
            "matrix is not Hermitian (max |M - M^dagger| = {defect:e})"
        )));
    }
    let mut vals: Vec<f64> = m
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Single-qubit Pauli matrices, `sigma_0 = I`.
pub fn pauli(j: usize) -> DenseOperator {
    let i = Complex64::i();
    let m = match j {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -i], [i, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("pauli index {j} out of range"),
    };
    DenseOperator::from_fn(1, |r, c| m[r][c])
}

/// `op` on `qubit` of an `n`-qubit register, identity elsewhere.
pub fn embed_single(op: &DenseOperator, qubit: usize, n: usize) -> Result<DenseOperator> {
    if op.qubits != 1 {
        return Err(Error::input("embed_single expects a 1-qubit operator"));
    }
    if qubit >= n {
        return Err(Error::input(format!("qubit {qubit} out of range for {n} qubits")));
    }
    let shift = n - 1 - qubit;
    Ok(DenseOperator::from_fn(n, |r, c| {
        if (r ^ c) & !(1 << shift) != 0 {
            ZERO
        } else {
            op[((r >> shift) & 1, (c >> shift) & 1)]
        }
    }))
}

/// Kahan–Babuška (Neumaier) compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
