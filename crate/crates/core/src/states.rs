//! GHZ, C-GHZ and DFS-encoded states, the logical Hadamard and Haar-random
//! orthogonal pairs.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, DenseOperator, MAX_DENSE_QUBITS, ONE, ZERO};

/// `N` logical blocks of `m` physical qubits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct BlockConfig {
    /// Number of logical blocks `N`.
    pub blocks: usize,
    /// Physical qubits per block `m`.
    pub block_size: usize,
}

impl BlockConfig {
    pub fn new(blocks: usize, block_size: usize) -> Result<Self> {
        if blocks == 0 || block_size == 0 {
            return Err(Error::input(format!(
                "block configuration needs N >= 1 and m >= 1 (got N={blocks}, m={block_size})"
            )));
        }
        Ok(Self { blocks, block_size })
    }

    pub fn total_qubits(&self) -> usize {
        self.blocks * self.block_size
    }

    /// Physical qubit indices belonging to `block`.
    pub fn block_qubits(&self, block: usize) -> std::ops::Range<usize> {
        block * self.block_size..(block + 1) * self.block_size
    }

    pub(crate) fn require_dense(&self, engine: &'static str) -> Result<()> {
        if self.total_qubits() > MAX_DENSE_QUBITS {
            return Err(Error::resource(
                engine,
                format!(
                    "N*m = {} exceeds the dense limit of {MAX_DENSE_QUBITS} qubits",
                    self.total_qubits()
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Normalized pure state on `2^q` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes, rejecting non-power-of-two lengths and norms off by
    /// more than `1e-12`.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::input(format!(
                "state length {} is not a power of two",
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amps })
    }

    /// Normalizes before wrapping.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::input("cannot normalize the zero vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(amps)
    }

    /// `|0...0>` on `qubits` qubits.
    pub fn zero_state(qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << qubits];
        amps[0] = ONE;
        Self { amps }
    }

    pub fn basis_state(qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << qubits];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn qubit_count(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            amps: kron_vec(&self.amps, &other.amps),
        }
    }

    /// `|self><self|`.
    pub fn projector(&self) -> DenseOperator {
        DenseOperator::outer(&self.amps, &self.amps).expect("power-of-two length")
    }

    /// Applies a unitary (or any matrix) and returns the raw result without
    /// renormalizing.
    pub fn apply(&self, op: &DenseOperator) -> Vec<Complex64> {
        op.apply(&self.amps)
    }
}

fn require_small(m: usize, what: &str) -> Result<()> {
    if m > MAX_DENSE_QUBITS {
        return Err(Error::resource(
            "states",
            format!("{what} on {m} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"),
        ));
    }
    Ok(())
}

/// `(|0>^m ± |1>^m) / sqrt(2)`.
pub fn ghz(m: usize, sign: Sign) -> Result<StateVector> {
    if m == 0 {
        return Err(Error::input("GHZ state needs at least one qubit"));
    }
    require_small(m, "GHZ state")?;
    let mut amps = vec![ZERO; 1 << m];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << m) - 1] += Complex64::new(sign.value() * FRAC_1_SQRT_2, 0.0);
    StateVector::new(amps)
}

fn tensor_power(v: &StateVector, n: usize) -> StateVector {
    let mut out = v.clone();
    for _ in 1..n {
        out = out.tensor(v);
    }
    out
}

/// `(|GHZ_m^+>^{⊗N} + |GHZ_m^->^{⊗N}) / sqrt(2)`.
pub fn cghz(cfg: BlockConfig) -> Result<StateVector> {
    cfg.require_dense("states")?;
    let plus = tensor_power(&ghz(cfg.block_size, Sign::Plus)?, cfg.blocks);
    let minus = tensor_power(&ghz(cfg.block_size, Sign::Minus)?, cfg.blocks);
    let amps = plus
        .amps
        .iter()
        .zip(&minus.amps)
        .map(|(a, b)| (a + b) * FRAC_1_SQRT_2)
        .collect();
    StateVector::new(amps)
}

/// `(|01>^{⊗m/2} ± |10>^{⊗m/2}) / sqrt(2)`, immune to collective dephasing.
pub fn dfs_ghz(m: usize, sign: Sign) -> Result<StateVector> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::input(format!(
            "decoherence-free GHZ blocks need a positive even size (got {m})"
        )));
    }
    require_small(m, "DFS GHZ state")?;
    // 0101..01 and 1010..10 under MSB-first indexing
    let pattern_01 = (0..m / 2).fold(0usize, |acc, _| (acc << 2) | 0b01);
    let pattern_10 = pattern_01 << 1;
    let mut amps = vec![ZERO; 1 << m];
    amps[pattern_01] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[pattern_10] = Complex64::new(sign.value() * FRAC_1_SQRT_2, 0.0);
    StateVector::new(amps)
}

/// C-GHZ built from DFS-encoded blocks.
pub fn dfs_cghz(cfg: BlockConfig) -> Result<StateVector> {
    cfg.require_dense("states")?;
    let plus = tensor_power(&dfs_ghz(cfg.block_size, Sign::Plus)?, cfg.blocks);
    let minus = tensor_power(&dfs_ghz(cfg.block_size, Sign::Minus)?, cfg.blocks);
    let amps = plus
        .amps
        .iter()
        .zip(&minus.amps)
        .map(|(a, b)| (a + b) * FRAC_1_SQRT_2)
        .collect();
    StateVector::new(amps)
}

/// Doublet-wise Hadamard on `m` qubits.
///
/// For every pair `{k, complement(k)}` with the leading bit of `k` clear it
/// maps `|k> -> (|k> + |k̄>)/sqrt(2)` and `|k̄> -> (|k> - |k̄>)/sqrt(2)`. In
/// particular `|GHZ^+> <-> |0^m>` and `|GHZ^-> <-> |1^m>`. Real, symmetric and
/// self-inverse.
pub fn logical_hadamard(m: usize) -> Result<DenseOperator> {
    if m == 0 {
        return Err(Error::input("logical Hadamard needs at least one qubit"));
    }
    require_small(m, "logical Hadamard")?;
    let all = (1usize << m) - 1;
    let h = FRAC_1_SQRT_2;
    Ok(DenseOperator::from_fn(m, |r, c| {
        if r != c && r != (c ^ all) {
            return ZERO;
        }
        // row r, column c: the column is the input basis state
        let c_low = c >> (m - 1) == 0;
        let r_low = r >> (m - 1) == 0;
        let v = if !c_low && !r_low { -h } else { h };
        Complex64::new(v, 0.0)
    }))
}

/// Two Haar-distributed orthonormal vectors in `2^m` dimensions.
///
/// Draws two i.i.d. complex Gaussian columns and Gram–Schmidt orthonormalizes
/// them; the result is deterministic in `(m, seed)`.
pub fn random_orthogonal_pair(m: usize, seed: u64) -> Result<(StateVector, StateVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_orthogonal_pair_with(m, &mut rng)
}

pub fn random_orthogonal_pair_with<R: rand::Rng + ?Sized>(
    m: usize,
    rng: &mut R,
) -> Result<(StateVector, StateVector)> {
    if m == 0 || m > 6 {
        return Err(Error::input(format!(
            "random orthogonal pairs support 1 <= m <= 6 (got {m})"
        )));
    }
    let dim = 1usize << m;
    let mut gaussian = || -> Vec<Complex64> {
        (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect()
    };
    let a = StateVector::normalized(gaussian())?;
    let mut b = gaussian();
    // two Gram-Schmidt passes keep <a|b> at rounding level
    for _ in 0..2 {
        let overlap: Complex64 = a.amps.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        for (bi, ai) in b.iter_mut().zip(&a.amps) {
            *bi -= overlap * ai;
        }
    }
    let b = StateVector::normalized(b)?;
    Ok((a, b))
}

/// Hadamard on every qubit, i.e. `|0> -> |+>`, `|1> -> |->`.
pub fn hadamard_all(qubits: usize) -> DenseOperator {
    let scale = (1.0 / (1usize << qubits) as f64).sqrt();
    DenseOperator::from_fn(qubits, |r, c| {
        let sign = if (r & c).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * scale, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarize_all, NoiseParameter};
    use crate::linalg::{embed_single, kron, pauli};

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn ghz_small_cases() {
        let h = FRAC_1_SQRT_2;
        assert_eq!(ghz(1, Sign::Plus).unwrap().amplitudes(), &[r(h), r(h)]);
        assert_eq!(
            ghz(2, Sign::Minus).unwrap().amplitudes(),
            &[r(h), r(0.0), r(0.0), r(-h)]
        );
        for m in 1..=8 {
            let p = ghz(m, Sign::Plus).unwrap();
            let q = ghz(m, Sign::Minus).unwrap();
            assert!(p.inner(&q).norm() < 1e-15);
        }
        assert!(matches!(ghz(13, Sign::Plus), Err(Error::Resource { .. })));
    }

    #[test]
    fn cghz_with_unit_blocks_is_rotated_ghz() {
        for n in 1..=6 {
            let c = cghz(BlockConfig::new(n, 1).unwrap()).unwrap();
            let rotated = StateVector::new(hadamard_all(n).apply(ghz(n, Sign::Plus).unwrap().amplitudes()))
                .unwrap();
            assert!((c.fidelity(&rotated) - 1.0).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn cghz_single_block_is_all_zero() {
        for m in 1..=6 {
            let c = cghz(BlockConfig::new(1, m).unwrap()).unwrap();
            assert!((c.fidelity(&StateVector::zero_state(m)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cghz_two_by_two_support() {
        // cross terms cancel: (|0000> + |1111>)/sqrt2
        let c = cghz(BlockConfig::new(2, 2).unwrap()).unwrap();
        for (i, a) in c.amplitudes().iter().enumerate() {
            let expected = if [0b0000, 0b1111].contains(&i) {
                FRAC_1_SQRT_2
            } else {
                0.0
            };
            assert!((a - r(expected)).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn dfs_ghz_cases() {
        let h = FRAC_1_SQRT_2;
        assert_eq!(
            dfs_ghz(2, Sign::Plus).unwrap().amplitudes(),
            &[r(0.0), r(h), r(h), r(0.0)]
        );
        assert!(matches!(dfs_ghz(3, Sign::Plus), Err(Error::Input(_))));

        for m in [2, 4, 6] {
            let s = dfs_ghz(m, Sign::Minus).unwrap();
            // total sigma_z annihilates the state
            let mut total_z = DenseOperator::zeros(m);
            for q in 0..m {
                total_z = &total_z + &embed_single(&pauli(3), q, m).unwrap();
            }
            let out = total_z.apply(s.amplitudes());
            assert!(out.iter().all(|a| a.norm() < 1e-15));
        }
    }

    #[test]
    fn dfs_ghz_survives_collective_dephasing() {
        let m = 4;
        let s = dfs_ghz(m, Sign::Plus).unwrap();
        for theta in [0.3, 1.0, 2.7] {
            // exp(-i theta sum sigma_z) is diagonal with phase exp(-i theta (m - 2|x|))
            let evolved: Vec<Complex64> = s
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(x, a)| {
                    let eigen = m as f64 - 2.0 * x.count_ones() as f64;
                    a * Complex64::from_polar(1.0, -theta * eigen)
                })
                .collect();
            let evolved = StateVector::new(evolved).unwrap();
            assert!((s.fidelity(&evolved) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn logical_hadamard_properties() {
        let h1 = logical_hadamard(1).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(h1.max_abs_diff(&DenseOperator::from_real_2x2([[h, h], [h, -h]])) < 1e-15);

        for m in 1..=6 {
            let u = logical_hadamard(m).unwrap();
            let id = DenseOperator::identity(m);
            assert!((&u.adjoint() * &u).max_abs_diff(&id) < 1e-12);
            assert!((&u * &u).max_abs_diff(&id) < 1e-12);
            let plus = StateVector::new(u.apply(ghz(m, Sign::Plus).unwrap().amplitudes())).unwrap();
            let minus = StateVector::new(u.apply(ghz(m, Sign::Minus).unwrap().amplitudes())).unwrap();
            assert!((plus.fidelity(&StateVector::zero_state(m)) - 1.0).abs() < 1e-12);
            assert!((minus.fidelity(&StateVector::basis_state(m, (1 << m) - 1)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn logical_hadamard_block_diagonalizes_noisy_cghz() {
        // after the blockwise rotation, rho only couples z with z or its
        // doublet-level complement within each sector
        let cfg = BlockConfig::new(2, 2).unwrap();
        let rho = depolarize_all(&cghz(cfg).unwrap().projector(), NoiseParameter::new(0.9).unwrap());
        let u = kron(&logical_hadamard(2).unwrap(), &logical_hadamard(2).unwrap());
        let rotated = &(&u * &rho) * &u.adjoint();
        let full = 0b11;
        for row in 0..16usize {
            for col in 0..16usize {
                let (r1, r2) = (row >> 2, row & 3);
                let (c1, c2) = (col >> 2, col & 3);
                // same doublet per block: equal or complementary
                let same_doublet = |a: usize, b: usize| a == b || a == (b ^ full);
                let coupled = same_doublet(r1, c1) && same_doublet(r2, c2);
                // within a sector the state pairs z with its full complement
                let flip1 = r1 != c1;
                let flip2 = r2 != c2;
                let allowed = coupled && flip1 == flip2;
                if !allowed {
                    assert!(rotated[(row, col)].norm() < 1e-14, "({row},{col})");
                }
            }
        }
    }

    #[test]
    fn random_pairs_are_orthonormal_and_seeded() {
        for seed in 0..20 {
            let (a, b) = random_orthogonal_pair(3, seed).unwrap();
            assert!(a.inner(&b).norm() < 1e-12);
            assert!((a.norm() - 1.0).abs() < 1e-12 && (b.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(random_orthogonal_pair(4, 9).unwrap(), random_orthogonal_pair(4, 9).unwrap());
        assert_ne!(random_orthogonal_pair(4, 9).unwrap(), random_orthogonal_pair(4, 10).unwrap());
        assert!(random_orthogonal_pair(7, 0).is_err());
    }

    #[test]
    fn haar_first_moment() {
        // E|<0|a>|^2 = 2^-m for Haar vectors
        let m = 3;
        let samples = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let values: Vec<f64> = (0..samples)
            .map(|_| random_orthogonal_pair_with(m, &mut rng).unwrap().0.amplitudes()[0].norm_sqr())
            .collect();
        let mean = values.iter().sum::<f64>() / samples as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let se = (var / samples as f64).sqrt();
        let target = 1.0 / (1 << m) as f64;
        assert!((mean - target).abs() < 3.0 * se, "mean {mean}, target {target}, se {se}");
    }
}
