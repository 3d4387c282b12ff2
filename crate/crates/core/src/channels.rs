//! Single-qubit depolarizing noise.
//!
//! `E(M) = p M + (1 - p)/4 Σ_{j=0..3} σ_j M σ_j`, with `σ_0 = I`. The dense
//! form is evaluated literally as the four-term Pauli sum. The engines in
//! [`crate::analytic`] and [`crate::spectral`] only need its action on the
//! computational basis, captured by [`TransferCoefficients`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::DenseOperator;

/// Depolarizing survival probability `p`, optionally derived from `p = exp(-κt)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NoiseParameter {
    p: f64,
    rate_time: Option<(f64, f64)>,
}

impl NoiseParameter {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("noise parameter p = {p} is outside [0, 1]")));
        }
        Ok(Self { p, rate_time: None })
    }

    /// `p = exp(-kappa * t)`.
    pub fn from_rate(kappa: f64, t: f64) -> Result<Self> {
        if !(kappa >= 0.0 && t >= 0.0 && kappa.is_finite() && t.is_finite()) {
            return Err(Error::input(format!(
                "rate and time must be finite and nonnegative (kappa={kappa}, t={t})"
            )));
        }
        Ok(Self {
            p: (-kappa * t).exp(),
            rate_time: Some((kappa, t)),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rate_time(&self) -> Option<(f64, f64)> {
        self.rate_time
    }
}

/// Single-qubit action of the channel on basis operators:
/// `E(|0><0|) = a|0><0| + b|1><1|` and `E(|0><1|) = offdiag |0><1|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoefficients {
    pub a: f64,
    pub b: f64,
    pub offdiag: f64,
}

pub fn transfer_coefficients(p: NoiseParameter) -> TransferCoefficients {
    let p = p.p();
    TransferCoefficients {
        a: (1.0 + p) / 2.0,
        b: (1.0 - p) / 2.0,
        offdiag: p,
    }
}

// (phase on |0>, phase on |1>, flips the bit)
fn pauli_action(j: usize) -> ([Complex64; 2], bool) {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    match j {
        0 => ([one, one], false),
        1 => ([one, one], true),
        // Y|0> = i|1>, Y|1> = -i|0>: row 0 picks up -i, row 1 picks up i
        2 => ([-i, i], true),
        3 => ([one, -one], false),
        _ => unreachable!(),
    }
}

/// Applies the depolarizing channel to one qubit of `m`.
///
/// `m` may be any operator; coherence operators `|a><b|` are not Hermitian.
pub fn depolarize(m: &DenseOperator, qubit: usize, p: NoiseParameter) -> Result<DenseOperator> {
    let n = m.qubit_count();
    if qubit >= n {
        return Err(Error::input(format!("qubit {qubit} out of range for {n} qubits")));
    }
    let shift = n - 1 - qubit;
    let bit = 1usize << shift;
    let dim = m.dim();
    let weight = (1.0 - p.p()) / 4.0;
    let mut out = m.scale_real(p.p());
    for j in 0..4 {
        let (phase, flips) = pauli_action(j);
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for r in 0..dim {
            let pr = phase[(r >> shift) & 1];
            let rs = if flips { r ^ bit } else { r };
            for c in 0..dim {
                let pc = phase[(c >> shift) & 1].conj();
                let cs = if flips { c ^ bit } else { c };
                dst[r * dim + c] += src[rs * dim + cs] * pr * pc * weight;
            }
        }
    }
    Ok(out)
}

/// Depolarizes every qubit, in index order.
pub fn depolarize_all(m: &DenseOperator, p: NoiseParameter) -> DenseOperator {
    let order: Vec<usize> = (0..m.qubit_count()).collect();
    depolarize_in_order(m, p, &order).expect("indices in range")
}

/// Depolarizes the listed qubits in the given order.
pub fn depolarize_in_order(
    m: &DenseOperator,
    p: NoiseParameter,
    order: &[usize],
) -> Result<DenseOperator> {
    let mut out = m.clone();
    for &q in order {
        out = depolarize(&out, q, p)?;
    }
    Ok(out)
}
