//! Exact spectra of depolarized C-GHZ states by sector enumeration.
//!
//! A depolarized GHZ block operator `E^{⊗m}(|GHZ^a><GHZ^b|)` is block diagonal
//! over doublets `{x, complement(x)}`. Doublets fall into classes by the
//! smaller Hamming weight `w` of the pair; only the `w = 0` doublet
//! `{0^m, 1^m}` carries the `p^m` coherence. In the doublet-wise Hadamard frame
//! `(|x> ± |x̄>)/sqrt 2` the four operators become
//!
//! ```text
//! w = 0:  B++ = diag(α, β)    B-- = diag(β, α)    B+- = [[0, γ], [δ, 0]]    B-+ = B+-ᵀ
//! w > 0:  B++ = B-- = s I     B+- = B-+ = t X
//! ```
//!
//! The state `ρ = ½ Σ_ab B_ab^{⊗N}` then splits into sectors: one doublet per
//! block, with only the multiset of classes mattering. Inside a sector the
//! operator is a direct sum of 2×2 blocks `[[D, O], [O, D]]` pairing a bit
//! string with its complement, so every eigenvalue is `D ± O` in closed form.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::analytic::ln_binomial_row;
use crate::channels::{transfer_coefficients, NoiseParameter};
use crate::error::{Error, Result};
use crate::linalg::CompensatedSum;
use crate::states::{BlockConfig, Sign};

/// Largest block size the sector engine accepts.
pub const MAX_BLOCK_SIZE: usize = 8;
/// Largest number of blocks the sector engine accepts.
pub const MAX_BLOCKS: usize = 64;
/// Default cap on the number of sectors enumerated in one call.
pub const DEFAULT_SECTOR_BUDGET: u64 = 4_000_000;

/// Doublets of one weight class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoubletClass {
    pub weight: usize,
    pub count: u64,
}

/// The 2×2 restrictions of `E^{⊗m}(|GHZ^a><GHZ^b|)` to each doublet class.
#[derive(Debug, Clone)]
pub struct DoubletAlgebra {
    m: usize,
    p: NoiseParameter,
    classes: Vec<DoubletClass>,
    // (u_w, v_w) = (a^(m-w) b^w, a^w b^(m-w))
    weights: Vec<(f64, f64)>,
    coherence: f64,
}

fn binomial_u64(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn sign_index(s: Sign) -> f64 {
    s.value()
}

impl DoubletAlgebra {
    pub fn new(m: usize, p: NoiseParameter) -> Result<Self> {
        if m == 0 || m > 62 {
            return Err(Error::input(format!("block size {m} outside 1..=62")));
        }
        let t = transfer_coefficients(p);
        let classes: Vec<DoubletClass> = (0..=m / 2)
            .map(|w| {
                let count = if w == 0 {
                    1
                } else if 2 * w == m {
                    binomial_u64(m, w) / 2
                } else {
                    binomial_u64(m, w)
                };
                DoubletClass { weight: w, count }
            })
            .collect();
        let weights = classes
            .iter()
            .map(|c| {
                let w = c.weight as i32;
                let mi = m as i32;
                (t.a.powi(mi - w) * t.b.powi(w), t.a.powi(w) * t.b.powi(mi - w))
            })
            .collect();
        Ok(Self {
            m,
            p,
            classes,
            weights,
            coherence: p.p().powi(m as i32),
        })
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn noise(&self) -> NoiseParameter {
        self.p
    }

    pub fn classes(&self) -> &[DoubletClass] {
        &self.classes
    }

    /// Doublet representatives of class `w`: the lighter string of each pair,
    /// or the one with the leading bit clear when both weigh `m/2`.
    pub fn representatives(&self, w: usize) -> Vec<usize> {
        let m = self.m;
        let full = (1usize << m) - 1;
        (0..1usize << m)
            .filter(|&x| {
                let wt = x.count_ones() as usize;
                wt == w && (2 * w < m || x < (x ^ full))
            })
            .collect()
    }

    /// `B_ab` on a class-`w` doublet in the basis `(x, x̄)`, `x` the
    /// representative.
    pub fn operator(&self, w: usize, a: Sign, b: Sign) -> [[f64; 2]; 2] {
        let (u, v) = self.weights[w];
        let (sa, sb) = (sign_index(a), sign_index(b));
        let ab = sa * sb;
        let coh = if w == 0 { 0.5 * self.coherence } else { 0.0 };
        [
            [0.5 * (u + ab * v), sb * coh],
            [sa * coh, 0.5 * (v + ab * u)],
        ]
    }

    /// `B_ab` in the frame `(|x> + |x̄>, |x> - |x̄>)/sqrt 2`.
    pub fn hadamard_operator(&self, w: usize, a: Sign, b: Sign) -> [[f64; 2]; 2] {
        let m = self.operator(w, a, b);
        let (p, q, r, s) = (m[0][0], m[0][1], m[1][0], m[1][1]);
        [
            [0.5 * (p + q + r + s), 0.5 * (p - q + r - s)],
            [0.5 * (p + q - r - s), 0.5 * (p - q - r + s)],
        ]
    }

    fn frame(&self) -> FrameScalars {
        let (am, bm) = self.weights[0];
        let d = am + bm;
        let o = am - bm;
        let pm = self.coherence;
        let ln = |x: f64| x.ln();
        FrameScalars {
            ln_alpha: ln((d + pm) / 2.0),
            ln_beta: ln(((d - pm) / 2.0).max(0.0)),
            ln_gamma: ln((o + pm) / 2.0),
            ln_delta: ln(((o - pm) / 2.0).max(0.0)),
            ln_s: self.weights.iter().map(|&(u, v)| ln((u + v) / 2.0)).collect(),
            ln_t: self.weights.iter().map(|&(u, v)| ln(((u - v) / 2.0).max(0.0))).collect(),
            ln_count: self.classes.iter().map(|c| (c.count as f64).ln()).collect(),
        }
    }
}

/// Logarithms of the Hadamard-frame scalars.
struct FrameScalars {
    ln_alpha: f64,
    ln_beta: f64,
    ln_gamma: f64,
    ln_delta: f64,
    ln_s: Vec<f64>,
    ln_t: Vec<f64>,
    ln_count: Vec<f64>,
}

/// `k * ln x`, with `0 * ln 0 = 0`.
fn ln_pow(ln_x: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_x
    }
}

fn ln_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// `ln(x^i y^j + y^i x^j)`.
fn ln_pair(ln_x: f64, ln_y: f64, i: usize, j: usize) -> f64 {
    ln_add(ln_pow(ln_x, i) + ln_pow(ln_y, j), ln_pow(ln_y, i) + ln_pow(ln_x, j))
}

/// Per-sector data shared by all queries.
#[derive(Debug, Clone)]
struct Sector {
    counts: Vec<usize>,
    logical: usize,
    rest: usize,
    ln_mult: f64,
    ln_s: f64,
    ln_t: f64,
}

impl Sector {
    /// `ln D` for a block whose logical bits have `zeros` zeros.
    fn ln_diag(&self, f: &FrameScalars, zeros: usize, ones: usize) -> f64 {
        -std::f64::consts::LN_2 + self.ln_s + ln_pair(f.ln_alpha, f.ln_beta, zeros, ones)
    }

    /// `ln O` for the same block.
    fn ln_offdiag(&self, f: &FrameScalars, zeros: usize, ones: usize) -> f64 {
        -std::f64::consts::LN_2 + self.ln_t + ln_pair(f.ln_gamma, f.ln_delta, ones, zeros)
    }
}

fn sector_count(blocks: usize, classes: usize) -> u64 {
    // C(blocks + classes - 1, classes - 1), small enough for f64 rounding here
    let r = classes - 1;
    let mut acc = 1f64;
    for i in 0..r {
        acc = acc * (blocks + r - i) as f64 / (i + 1) as f64;
    }
    acc.round() as u64
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in (0..=left).rev() {
            cur.push(first);
            rec(left - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}

fn check_supported(cfg: BlockConfig) -> Result<()> {
    if cfg.block_size > MAX_BLOCK_SIZE || cfg.blocks > MAX_BLOCKS {
        return Err(Error::resource(
            "spectral",
            format!(
                "N={} m={} outside the supported range N <= {MAX_BLOCKS}, m <= {MAX_BLOCK_SIZE}",
                cfg.blocks, cfg.block_size
            ),
        ));
    }
    Ok(())
}

/// Sectors of `blocks` blocks (a composition over the weight classes).
fn sectors(alg: &DoubletAlgebra, frame: &FrameScalars, blocks: usize) -> Result<Vec<Sector>> {
    let classes = alg.classes.len();
    let count = sector_count(blocks, classes);
    if count > DEFAULT_SECTOR_BUDGET {
        return Err(Error::resource(
            "spectral",
            format!("{count} sectors exceed the budget of {DEFAULT_SECTOR_BUDGET}"),
        ));
    }
    let lf = ln_factorials(blocks);
    Ok(compositions(blocks, classes)
        .into_iter()
        .map(|counts| {
            let mut ln_mult = lf[blocks];
            let (mut ln_s, mut ln_t) = (0.0, 0.0);
            for (w, &n) in counts.iter().enumerate() {
                ln_mult += ln_pow(frame.ln_count[w], n) - lf[n];
                if w > 0 {
                    ln_s += ln_pow(frame.ln_s[w], n);
                    ln_t += ln_pow(frame.ln_t[w], n);
                }
            }
            Sector {
                logical: counts[0],
                rest: blocks - counts[0],
                counts,
                ln_mult,
                ln_s,
                ln_t,
            }
        })
        .collect())
}

fn exact_multiplicity(alg: &DoubletAlgebra, counts: &[usize], factorials: &[BigUint]) -> BigUint {
    let total: usize = counts.iter().sum();
    let mut m = factorials[total].clone();
    for &n in counts {
        m /= &factorials[n];
    }
    for (c, &n) in alg.classes.iter().zip(counts) {
        m *= BigUint::from(c.count).pow(n as u32);
    }
    m
}

/// One eigenvalue with its multiplicity and the sector it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: BigUint,
    /// Index into [`SectorSpectrum::sectors`].
    pub sector: usize,
}

/// The full spectrum of a depolarized C-GHZ state.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub qubits: usize,
    /// Class counts `(n_0, n_1, ..)` of each sector.
    pub sectors: Vec<Vec<usize>>,
    pub entries: Vec<SpectrumEntry>,
}

impl SectorSpectrum {
    pub fn total_multiplicity(&self) -> BigUint {
        self.entries.iter().map(|e| &e.multiplicity).sum()
    }

    /// `Σ λ · multiplicity`.
    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.value * e.multiplicity.to_f64().unwrap_or(f64::INFINITY))
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(f64::INFINITY, f64::min)
    }

    /// Checks total dimension (exactly), unit trace and positivity.
    pub fn check(&self) -> Result<()> {
        let dim = BigUint::one() << self.qubits;
        let total = self.total_multiplicity();
        if total != dim {
            return Err(Error::Consistency(format!(
                "multiplicities sum to {total}, expected 2^{}",
                self.qubits
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::Consistency(format!("spectrum trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-12 {
            return Err(Error::Consistency(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    /// All eigenvalues, repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Result<Vec<f64>> {
        if self.qubits > 24 {
            return Err(Error::resource(
                "spectral",
                format!("refusing to expand a 2^{} spectrum", self.qubits),
            ));
        }
        let mut out = Vec::with_capacity(1 << self.qubits);
        for e in &self.entries {
            let k = e.multiplicity.to_usize().expect("bounded by 2^24");
            out.extend(std::iter::repeat_n(e.value, k));
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

/// Exact spectrum of `E^{⊗Nm}(|phi_C><phi_C|)`.
pub fn cghz_spectrum(cfg: BlockConfig, p: NoiseParameter) -> Result<SectorSpectrum> {
    check_supported(cfg)?;
    let alg = DoubletAlgebra::new(cfg.block_size, p)?;
    let frame = alg.frame();
    let secs = sectors(&alg, &frame, cfg.blocks)?;
    let n = cfg.blocks;
    let mut factorials = vec![BigUint::one()];
    for k in 1..=n {
        let next = &factorials[k - 1] * BigUint::from(k);
        factorials.push(next);
    }
    let per_sector: Vec<Vec<SpectrumEntry>> = secs
        .par_iter()
        .enumerate()
        .map(|(idx, sec)| {
            let mult = exact_multiplicity(&alg, &sec.counts, &factorials);
            let (l, r) = (sec.logical, sec.rest);
            let mut out = Vec::new();
            let mut push = |value: f64, m: BigUint| {
                if !m.is_zero() {
                    out.push(SpectrumEntry { value, multiplicity: m, sector: idx });
                }
            };
            if l == 0 {
                // pairs {r, r̄}: 2^(R-1) of them, eigenvalues S ± T
                let s = sec.ln_s.exp();
                let t = sec.ln_t.exp();
                let m = &mult << (r - 1);
                push(s + t, m.clone());
                push(s - t, m);
            } else {
                // pivot: the first logical bit is 0; k zeros among the other L-1
                for k in 0..l {
                    let (zeros, ones) = (k + 1, l - 1 - k);
                    let d = sec.ln_diag(&frame, zeros, ones).exp();
                    let o = sec.ln_offdiag(&frame, zeros, ones).exp();
                    let m = (&mult * BigUint::from(binomial_u64(l - 1, k))) << r;
                    push(d + o, m.clone());
                    push(d - o, m);
                }
            }
            out
        })
        .collect();
    Ok(SectorSpectrum {
        qubits: cfg.total_qubits(),
        sectors: secs.into_iter().map(|s| s.counts).collect(),
        entries: per_sector.into_iter().flatten().collect(),
    })
}

/// `(||ρ^{T_1}||_1 - 1) / 2` with the partial transpose on the first block.
///
/// Only sectors whose first block sits in the logical doublet can go negative;
/// elsewhere the first block's factors are symmetric and the transpose is
/// trivial. On the logical doublet the transpose swaps `γ` and `δ`.
pub fn negativity(cfg: BlockConfig, p: NoiseParameter) -> Result<f64> {
    check_supported(cfg)?;
    let alg = DoubletAlgebra::new(cfg.block_size, p)?;
    let frame = alg.frame();
    let others = sectors(&alg, &frame, cfg.blocks - 1)?;
    let terms: Vec<f64> = others
        .par_iter()
        .map(|sec| {
            let (lp, r) = (sec.logical, sec.rest);
            let ln_binom = ln_binomial_row(lp);
            let mut acc = CompensatedSum::default();
            for (k, ln_c) in ln_binom.iter().enumerate() {
                // the first block has bit 0; k zeros among the other logical bits
                let (zeros, ones) = (k + 1, lp - k);
                let ln_d = sec.ln_diag(&frame, zeros, ones);
                let ln_o = -std::f64::consts::LN_2
                    + sec.ln_t
                    + ln_pair(frame.ln_gamma, frame.ln_delta, ones + 1, zeros - 1);
                if ln_o <= ln_d {
                    continue;
                }
                let ln_m = sec.ln_mult + ln_c + r as f64 * std::f64::consts::LN_2;
                acc.add((ln_m + ln_o).exp() - (ln_m + ln_d).exp());
            }
            acc.value()
        })
        .collect();
    Ok(terms.into_iter().collect::<CompensatedSum>().value())
}

/// Generator for [`fisher_information`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
pub enum Generator {
    /// `Σ_blocks σ_x^{⊗m}`.
    BlockX,
    /// `Σ_qubits σ_z`.
    SingleZ,
}

/// `(x - y)^2 / (x + y)`, zero when `x + y = 0`.
fn qfi_weight(x: f64, y: f64) -> f64 {
    let s = x + y;
    if s > 0.0 {
        (x - y) * (x - y) / s
    } else {
        0.0
    }
}

/// Quantum Fisher information
/// `F = 2 Σ_{j,k} (λ_k - λ_j)^2 / (λ_k + λ_j) |<k|A|j>|^2`
/// of the depolarized C-GHZ state for the given generator.
pub fn fisher_information(cfg: BlockConfig, p: NoiseParameter, generator: Generator) -> Result<f64> {
    check_supported(cfg)?;
    let alg = DoubletAlgebra::new(cfg.block_size, p)?;
    let frame = alg.frame();
    let secs = sectors(&alg, &frame, cfg.blocks)?;
    let m = cfg.block_size as f64;
    let terms: Vec<f64> = secs
        .par_iter()
        .map(|sec| match generator {
            Generator::BlockX => block_x_sector(sec, &frame),
            Generator::SingleZ => single_z_sector(sec, &frame, m),
        })
        .collect();
    Ok(terms.into_iter().collect::<CompensatedSum>().value())
}

/// In the Hadamard frame `σ_x^{⊗m}` is `Z` on every doublet, so the generator
/// is diagonal and only couples the two eigenvectors of each 2×2 block.
fn block_x_sector(sec: &Sector, frame: &FrameScalars) -> f64 {
    let (l, r) = (sec.logical, sec.rest);
    let ln_binom = ln_binomial_row(l);
    let mut acc = CompensatedSum::default();
    for (k, ln_c) in ln_binom.iter().enumerate() {
        let ln_d = sec.ln_diag(frame, k, l - k);
        if ln_d == f64::NEG_INFINITY {
            continue;
        }
        let ln_o = sec.ln_offdiag(frame, k, l - k);
        let c = 2.0 * k as f64 - l as f64;
        let ln_m = sec.ln_mult + ln_c + r as f64 * std::f64::consts::LN_2;
        acc.add(4.0 * (c * c + r as f64) * (ln_m + 2.0 * ln_o - ln_d).exp());
    }
    acc.value()
}

/// `Σσ_z` acts as `m X` on each logical doublet (in the Hadamard frame) and
/// commutes with the sector operator on the other doublets. `X` on one logical
/// bit maps each 2×2 block onto a neighbouring block with the same sign.
fn single_z_sector(sec: &Sector, frame: &FrameScalars, m: f64) -> f64 {
    let (l, r) = (sec.logical, sec.rest);
    let eig = |zeros: usize| {
        let ln_d = sec.ln_diag(frame, zeros, l - zeros);
        let ln_o = sec.ln_offdiag(frame, zeros, l - zeros);
        (ln_d, ln_o)
    };
    // weight of f(λ(zeros=i), λ(zeros=j)) scaled by exp(shift)
    let scaled = |i: usize, j: usize, sign: f64| -> (f64, f64) {
        let ((di, oi), (dj, oj)) = (eig(i), eig(j));
        let shift = di.max(dj);
        if shift == f64::NEG_INFINITY {
            return (shift, 0.0);
        }
        let li = (di - shift).exp() + sign * (oi - shift).exp();
        let lj = (dj - shift).exp() + sign * (oj - shift).exp();
        (shift, qfi_weight(li, lj))
    };
    let ln_m2 = sec.ln_mult + 2.0 * m.ln();
    if r == 0 && l <= 2 {
        // the flipped blocks can coincide with complements; handle directly
        if l < 2 {
            return 0.0;
        }
        // X_1 + X_2 maps the + eigenvector of {00, 11} to twice that of {01, 10}
        let (shift, f) = scaled(2, 1, 1.0);
        return 16.0 * f * (ln_m2 + shift).exp();
    }
    let ln_binom = ln_binomial_row(l);
    let mut acc = CompensatedSum::default();
    for (k, ln_c) in ln_binom.iter().enumerate() {
        let base = ln_m2 + ln_c + r as f64 * std::f64::consts::LN_2;
        for sign in [1.0, -1.0] {
            if k > 0 {
                let (shift, f) = scaled(k, k - 1, sign);
                acc.add(k as f64 * f * (base + shift).exp());
            }
            if k < l {
                let (shift, f) = scaled(k, k + 1, sign);
                acc.add((l - k) as f64 * f * (base + shift).exp());
            }
        }
    }
    acc.value()
}

/// Cramér–Rao bound `1 / sqrt(n F)` on the phase uncertainty.
pub fn cramer_rao_bound(fisher: f64, repetitions: u64) -> Result<f64> {
    if fisher.is_nan() || fisher <= 0.0 || repetitions == 0 {
        return Err(Error::input(format!(
            "Cramér-Rao bound needs F > 0 and n >= 1 (F={fisher}, n={repetitions})"
        )));
    }
    Ok(1.0 / (repetitions as f64 * fisher).sqrt())
}
