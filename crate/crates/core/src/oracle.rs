//! Dense ground truth for small systems.
//!
//! Everything here builds full `2^n × 2^n` operators (at most
//! [`MAX_DENSE_QUBITS`](crate::linalg::MAX_DENSE_QUBITS) qubits) and evaluates
//! definitions directly. It exists to certify [`crate::analytic`] and
//! [`crate::spectral`].

use num_complex::Complex64;

use crate::channels::{depolarize_all, NoiseParameter};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, eigvals_hermitian, partial_transpose, trace_norm, CompensatedSum, DenseOperator, ZERO};
use crate::states::{cghz, ghz, BlockConfig, Sign, StateVector};

/// Eigenvalue pairs with `λ_j + λ_k` at or below this are skipped in [`fisher_dense`].
pub const FISHER_SUPPORT_TOL: f64 = 1e-14;

/// `E^{⊗Nm}(|phi_C><phi_C|)`.
pub fn decohered_cghz(cfg: BlockConfig, p: NoiseParameter) -> Result<DenseOperator> {
    cfg.require_dense("oracle")?;
    Ok(depolarize_all(&cghz(cfg)?.projector(), p))
}

/// `E^{⊗Nm}(|GHZ_m^+><GHZ_m^-|^{⊗N})`.
pub fn decohered_coherence(cfg: BlockConfig, p: NoiseParameter) -> Result<DenseOperator> {
    cfg.require_dense("oracle")?;
    let plus = ghz(cfg.block_size, Sign::Plus)?;
    let minus = ghz(cfg.block_size, Sign::Minus)?;
    let (mut a, mut b) = (plus.clone(), minus.clone());
    for _ in 1..cfg.blocks {
        a = a.tensor(&plus);
        b = b.tensor(&minus);
    }
    let op = DenseOperator::outer(a.amplitudes(), b.amplitudes())?;
    Ok(depolarize_all(&op, p))
}

/// `||E^{⊗m}(|a><b|)||_1^N` for an arbitrary pair of `m`-qubit states.
pub fn generic_coherence_norm(
    a: &StateVector,
    b: &StateVector,
    blocks: u64,
    p: NoiseParameter,
) -> Result<f64> {
    if a.qubit_count() != b.qubit_count() {
        return Err(Error::input(format!(
            "state dimensions differ ({} vs {} qubits)",
            a.qubit_count(),
            b.qubit_count()
        )));
    }
    if a.qubit_count() > 6 {
        return Err(Error::resource("oracle", "generic coherence blocks are limited to 6 qubits"));
    }
    let op = DenseOperator::outer(a.amplitudes(), b.amplitudes())?;
    let block = trace_norm(&depolarize_all(&op, p));
    Ok(if blocks == 0 { 1.0 } else { (blocks as f64 * block.ln()).exp() })
}

/// Sum of the magnitudes of the negative eigenvalues of `ρ^{T_A}` with `A` the
/// first block.
pub fn negativity_dense(rho: &DenseOperator, cfg: BlockConfig) -> Result<f64> {
    if rho.qubit_count() != cfg.total_qubits() {
        return Err(Error::input("state size does not match the block configuration"));
    }
    let first: Vec<usize> = cfg.block_qubits(0).collect();
    let pt = partial_transpose(rho, &first)?;
    Ok(eigvals_hermitian(&pt)?
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(|l| -l)
        .collect::<CompensatedSum>()
        .value())
}

/// `F = 2 Σ_{j,k} (λ_k - λ_j)^2 / (λ_k + λ_j) |<k|A|j>|^2`.
pub fn fisher_dense(rho: &DenseOperator, generator: &DenseOperator) -> Result<f64> {
    if rho.dim() != generator.dim() {
        return Err(Error::input(format!(
            "state and generator dimensions differ ({} vs {})",
            rho.dim(),
            generator.dim()
        )));
    }
    if !generator.is_hermitian() {
        return Err(Error::input("generator is not Hermitian"));
    }
    let eig = eig_hermitian(rho)?;
    let v = &eig.vectors;
    let a = &(&v.adjoint() * generator) * v;
    let dim = rho.dim();
    let mut acc = CompensatedSum::default();
    for j in 0..dim {
        for k in 0..dim {
            let s = eig.values[j] + eig.values[k];
            if s <= FISHER_SUPPORT_TOL {
                continue;
            }
            let d = eig.values[k] - eig.values[j];
            acc.add(2.0 * d * d / s * a[(k, j)].norm_sqr());
        }
    }
    Ok(acc.value())
}

/// `Σ_blocks σ_x^{⊗m}`.
pub fn block_x_generator(cfg: BlockConfig) -> Result<DenseOperator> {
    cfg.require_dense("oracle")?;
    let n = cfg.total_qubits();
    let masks: Vec<usize> = (0..cfg.blocks)
        .map(|b| cfg.block_qubits(b).fold(0, |acc, q| acc | 1 << (n - 1 - q)))
        .collect();
    let mut g = DenseOperator::zeros(n);
    for r in 0..1usize << n {
        for &mask in &masks {
            g[(r, r ^ mask)] += Complex64::new(1.0, 0.0);
        }
    }
    Ok(g)
}

/// `Σ_qubits σ_z`.
pub fn single_z_generator(cfg: BlockConfig) -> Result<DenseOperator> {
    cfg.require_dense("oracle")?;
    let n = cfg.total_qubits();
    let mut g = DenseOperator::zeros(n);
    for r in 0..1usize << n {
        g[(r, r)] = Complex64::new(n as f64 - 2.0 * r.count_ones() as f64, 0.0);
    }
    Ok(g)
}

/// One branch of the distillation protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistillOutcome {
    /// Probability of this measurement record given a successful projection.
    pub probability: f64,
    /// Logical Bell fidelity of the kept pair after correction.
    pub fidelity: f64,
}

/// Projection of the decohered state onto the logical code space
/// `span{|0^m>, |1^m>}^{⊗N}`, as a `2^N × 2^N` matrix (unnormalized).
fn logical_projection(cfg: BlockConfig, p: NoiseParameter) -> Result<Vec<Vec<Complex64>>> {
    let rho = decohered_cghz(cfg, p)?;
    let (n, m) = (cfg.blocks, cfg.block_size);
    let ones = (1usize << m) - 1;
    let embed = |y: usize| -> usize {
        (0..n).fold(0usize, |acc, b| {
            let bit = (y >> (n - 1 - b)) & 1;
            (acc << m) | if bit == 1 { ones } else { 0 }
        })
    };
    let idx: Vec<usize> = (0..1usize << n).map(embed).collect();
    Ok(idx.iter().map(|&r| idx.iter().map(|&c| rho[(r, c)]).collect()).collect())
}

/// Runs the distillation protocol for one measurement record.
///
/// Every block is projected onto `span{|0^m>, |1^m>}`. The blocks outside
/// `kept_pair` are measured in `{|0_L>, |1_L>}` with results `outcomes` (in
/// block order). An odd outcome parity is corrected by a logical `X` on the
/// first kept block, and the fidelity with `(|0_L 0_L> + |1_L 1_L>)/sqrt 2` is
/// returned together with the outcome probability.
pub fn distill_protocol_fidelity(
    cfg: BlockConfig,
    p: NoiseParameter,
    kept_pair: (usize, usize),
    outcomes: &[u8],
) -> Result<DistillOutcome> {
    let rho_l = logical_projection(cfg, p)?;
    branch(&rho_l, cfg, kept_pair, outcomes)
}

fn branch(
    rho_l: &[Vec<Complex64>],
    cfg: BlockConfig,
    kept_pair: (usize, usize),
    outcomes: &[u8],
) -> Result<DistillOutcome> {
    let n = cfg.blocks;
    let (i, j) = kept_pair;
    if n < 2 || i == j || i >= n || j >= n {
        return Err(Error::input(format!("invalid kept pair ({i}, {j}) for N = {n}")));
    }
    if outcomes.len() != n - 2 || outcomes.iter().any(|&o| o > 1) {
        return Err(Error::input(format!("expected {} binary outcomes", n - 2)));
    }
    let measured: Vec<usize> = (0..n).filter(|&b| b != i && b != j).collect();
    let parity = outcomes.iter().map(|&o| o as usize).sum::<usize>() % 2;
    let index = |bi: usize, bj: usize| -> usize {
        let mut y = 0usize;
        let set = |y: &mut usize, block: usize, bit: usize| *y |= bit << (n - 1 - block);
        set(&mut y, i, bi ^ parity);
        set(&mut y, j, bj);
        for (&b, &o) in measured.iter().zip(outcomes) {
            set(&mut y, b, o as usize);
        }
        y
    };
    // corrected two-block state, basis |bi bj>
    let mut sigma = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            sigma[r][c] = rho_l[index(r >> 1, r & 1)][index(c >> 1, c & 1)];
        }
    }
    let prob: f64 = (0..4).map(|k| sigma[k][k].re).sum();
    let total: f64 = (0..rho_l.len()).map(|k| rho_l[k][k].re).sum();
    if prob <= 1e-15 * total {
        return Err(Error::ZeroProbabilityOutcome { outcome: outcomes.to_vec() });
    }
    let bell = 0.5 * (sigma[0][0] + sigma[0][3] + sigma[3][0] + sigma[3][3]).re;
    Ok(DistillOutcome {
        probability: prob / total,
        fidelity: bell / prob,
    })
}

/// Exhaustive average over all `2^(N-2)` records: `(Σ prob·F, Σ prob)`.
pub fn distill_protocol_average(
    cfg: BlockConfig,
    p: NoiseParameter,
    kept_pair: (usize, usize),
) -> Result<(f64, f64)> {
    let rho_l = logical_projection(cfg, p)?;
    let k = cfg.blocks.saturating_sub(2);
    let mut fid = CompensatedSum::default();
    let mut prob = CompensatedSum::default();
    for rec in 0..1usize << k {
        let outcomes: Vec<u8> = (0..k).map(|b| ((rec >> (k - 1 - b)) & 1) as u8).collect();
        match branch(&rho_l, cfg, kept_pair, &outcomes) {
            Ok(o) => {
                fid.add(o.probability * o.fidelity);
                prob.add(o.probability);
            }
            Err(Error::ZeroProbabilityOutcome { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((fid.value(), prob.value()))
}
