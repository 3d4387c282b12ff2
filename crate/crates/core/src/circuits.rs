//! Mølmer–Sørensen preparation circuits for C-GHZ states.
//!
//! The only entangling gate is the global MS gate
//! `U(ξ) = Π_{k<l} exp(i ξ X_k X_l)`. Conjugating it with
//! `Z(G) = Π_{k∈G} i σ_z^k` flips the sign of `ξ` on every pair with exactly
//! one qubit in `G`. A schedule of MS gates separated by Z layers therefore
//! realizes any pairwise phase pattern `Σ_j ξ_j s_j(k) s_j(l)` with sign
//! vectors `s_j`, and the C-GHZ state needs the pattern "π/4 inside a block,
//! 0 across blocks".
//!
//! Phases are exact rational multiples of π.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::MAX_DENSE_QUBITS;
use crate::states::{BlockConfig, StateVector};

/// Named single-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalGate {
    X,
    Z,
    /// `diag(1, i)`.
    S,
    /// `diag(1, -i)`.
    Sdg,
    /// `H S H`, the phase gate in the X basis.
    Sx,
    /// `H S† H`.
    Sxdg,
    H,
}

impl LocalGate {
    pub const ALL: [LocalGate; 7] = [
        LocalGate::X,
        LocalGate::Z,
        LocalGate::S,
        LocalGate::Sdg,
        LocalGate::Sx,
        LocalGate::Sxdg,
        LocalGate::H,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LocalGate::X => "X",
            LocalGate::Z => "Z",
            LocalGate::S => "S",
            LocalGate::Sdg => "SDG",
            LocalGate::Sx => "SX",
            LocalGate::Sxdg => "SXDG",
            LocalGate::H => "H",
        }
    }

    /// Row-major 2×2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            LocalGate::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            LocalGate::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
            LocalGate::S => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
            LocalGate::Sdg => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
            LocalGate::Sx => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            LocalGate::Sxdg => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
            LocalGate::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        }
    }
}

impl FromStr for LocalGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LocalGate::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::input(format!("unknown local gate '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    /// Global MS gate with `ξ = phase · π`.
    Ms(Rational64),
    /// `Π_{k∈G} i σ_z^k`.
    ZLayer(Vec<usize>),
    Local { gate: LocalGate, qubit: usize },
}

/// An ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Self { qubits, gates: Vec::new() }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let bad = match &gate {
            Gate::Ms(_) => None,
            Gate::ZLayer(g) => g.iter().copied().find(|&q| q >= self.qubits),
            Gate::Local { qubit, .. } => (*qubit >= self.qubits).then_some(*qubit),
        };
        if let Some(q) = bad {
            return Err(Error::input(format!(
                "qubit {q} out of range for a {}-qubit circuit",
                self.qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.qubits != self.qubits {
            return Err(Error::input("cannot concatenate circuits of different widths"));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Appends `gate^(k mod 4)` as a single gate, for `gate` in `{S, SX}`.
    fn local(&mut self, gate: LocalGate, qubit: usize, k: usize) {
        let g = match (gate, k % 4) {
            (_, 0) => return,
            (LocalGate::S, 2) => LocalGate::Z,
            (LocalGate::S, 3) => LocalGate::Sdg,
            (LocalGate::Sx, 2) => LocalGate::X,
            (LocalGate::Sx, 3) => LocalGate::Sxdg,
            (g, _) => g,
        };
        self.gates.push(Gate::Local { gate: g, qubit });
    }

    /// Line-oriented text form: `QUBITS n`, then one of `MS <phase/π>`,
    /// `Z <qubits..>` or `L <gate> <qubit>` per line.
    pub fn export(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.qubits);
        for g in &self.gates {
            match g {
                Gate::Ms(xi) => out.push_str(&format!("MS {xi}\n")),
                Gate::ZLayer(set) => {
                    out.push('Z');
                    for q in set {
                        out.push_str(&format!(" {q}"));
                    }
                    out.push('\n');
                }
                Gate::Local { gate, qubit } => out.push_str(&format!("L {} {qubit}\n", gate.name())),
            }
        }
        out
    }

    /// Inverse of [`Circuit::export`]. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: String| Error::Parse { line, msg };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut parts = body.split_whitespace();
            let head = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            let index = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad qubit index '{s}'")));
            let Some(c) = circuit.as_mut() else {
                if head != "QUBITS" || rest.len() != 1 {
                    return Err(err("expected 'QUBITS <n>' header".into()));
                }
                circuit = Some(Circuit::new(index(rest[0])?));
                continue;
            };
            let gate = match head {
                "MS" if rest.len() == 1 => Gate::Ms(
                    Rational64::from_str(rest[0]).map_err(|_| err(format!("bad phase '{}'", rest[0])))?,
                ),
                "Z" => Gate::ZLayer(rest.iter().map(|s| index(s)).collect::<Result<_>>()?),
                "L" if rest.len() == 2 => Gate::Local {
                    gate: rest[0].parse().map_err(|e: Error| err(e.to_string()))?,
                    qubit: index(rest[1])?,
                },
                _ => return Err(err(format!("unrecognized line '{body}'"))),
            };
            c.push(gate).map_err(|e| err(e.to_string()))?;
        }
        circuit.ok_or(Error::Parse { line: 0, msg: "empty circuit text".into() })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.export())
    }
}

/// `x mod 2`, in `[0, 2)`.
fn reduce_mod_two(x: Rational64) -> Rational64 {
    let two = Rational64::from_integer(2);
    let r = x % two;
    if r.is_negative() {
        r + two
    } else {
        r
    }
}

/// Accumulated pairwise XX phases (as multiples of π, mod 2π) together with
/// the qubits left carrying an odd number of Z-layer factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseMatrix {
    n: usize,
    xi: Vec<Rational64>,
    residual_z: Vec<usize>,
}

impl PhaseMatrix {
    pub fn qubit_count(&self) -> usize {
        self.n
    }

    /// Phase on pair `(k, l)` as a multiple of π, in `[0, 2)`.
    pub fn get(&self, k: usize, l: usize) -> Rational64 {
        self.xi[k * self.n + l]
    }

    /// Qubits whose net Z-layer factor is `i σ_z` (up to sign).
    pub fn residual_z(&self) -> &[usize] {
        &self.residual_z
    }

    /// True when every intra-block pair carries `intra` and every inter-block
    /// pair `inter` (both taken mod 2).
    pub fn has_block_pattern(&self, cfg: BlockConfig, intra: Rational64, inter: Rational64) -> bool {
        if cfg.total_qubits() != self.n {
            return false;
        }
        let (intra, inter) = (reduce_mod_two(intra), reduce_mod_two(inter));
        let m = cfg.block_size;
        (0..self.n).all(|k| {
            (0..self.n).all(|l| {
                let want = if k == l {
                    Rational64::zero()
                } else if k / m == l / m {
                    intra
                } else {
                    inter
                };
                self.get(k, l) == want
            })
        })
    }
}

/// Exact phase bookkeeping for circuits of MS gates and Z layers.
///
/// A Z layer toggles a sign flag on its qubits; each later MS gate adds
/// `±ξ` to pair `(k, l)` with sign `flag_k · flag_l`.
pub fn apply_phase_algebra(c: &Circuit) -> Result<PhaseMatrix> {
    let n = c.qubits;
    let mut flipped = vec![false; n];
    let mut xi = vec![Rational64::zero(); n * n];
    for g in &c.gates {
        match g {
            Gate::Ms(phase) => {
                for k in 0..n {
                    for l in 0..n {
                        if k != l {
                            let v = if flipped[k] == flipped[l] { *phase } else { -*phase };
                            xi[k * n + l] += v;
                        }
                    }
                }
            }
            Gate::ZLayer(set) => {
                for &q in set {
                    flipped[q] = !flipped[q];
                }
            }
            Gate::Local { .. } => {
                return Err(Error::input("phase algebra is undefined for local gates"));
            }
        }
    }
    Ok(PhaseMatrix {
        n,
        xi: xi.into_iter().map(reduce_mod_two).collect(),
        residual_z: (0..n).filter(|&q| flipped[q]).collect(),
    })
}

/// Sign vectors (one entry per block) of the MS gates in the bisection
/// schedule. Columns are pairwise orthogonal and the first row is all `+1`.
fn sign_rows(blocks: usize) -> Vec<Vec<i8>> {
    if blocks == 1 {
        return vec![vec![1]];
    }
    let left = sign_rows(blocks.div_ceil(2));
    let right = sign_rows(blocks / 2);
    let k = left.len().max(right.len());
    // sizes are powers of two, so repeating the shorter set keeps orthogonality
    let pad = |rows: &Vec<Vec<i8>>| -> Vec<Vec<i8>> { rows.iter().cycle().take(k).cloned().collect() };
    let (left, right) = (pad(&left), pad(&right));
    let mut rows = Vec::with_capacity(2 * k);
    for sign in [1i8, -1] {
        for (a, b) in left.iter().zip(&right) {
            rows.push(a.iter().copied().chain(b.iter().map(|x| x * sign)).collect());
        }
    }
    rows
}

/// Circuit for `V = Π_blocks exp(i π/4 Σ_{k<l in block} X_k X_l)`, up to a
/// trailing Z layer (see [`PhaseMatrix::residual_z`]).
///
/// Recursive bisection: `K = 2^ceil(log2 N)` MS gates of `ξ = π/(4K)`
/// separated by `K - 1` Z layers.
pub fn synthesize_v(cfg: BlockConfig) -> Circuit {
    let rows = sign_rows(cfg.blocks);
    let xi = Rational64::new(1, 4 * rows.len() as i64);
    let mut c = Circuit::new(cfg.total_qubits());
    for (j, row) in rows.iter().enumerate() {
        if j > 0 {
            let set: Vec<usize> = (0..cfg.blocks)
                .filter(|&b| row[b] != rows[j - 1][b])
                .flat_map(|b| cfg.block_qubits(b))
                .collect();
            if !set.is_empty() {
                c.gates.push(Gate::ZLayer(set));
            }
        }
        c.gates.push(Gate::Ms(xi));
    }
    c
}

/// Full preparation of the C-GHZ state from `|0...0>`:
///
/// 1. `MS(π/4)`, a GHZ state up to local gates;
/// 2. `SX^(n mod 4)` on every qubit and `S^((N+1) mod 4)` on qubit 0;
/// 3. the [`synthesize_v`] schedule;
/// 4. `Z` on the residual qubits of step 3, `SX^(m mod 4)` on every qubit and
///    `S` on the first qubit of each block.
///
/// The result equals the C-GHZ state up to a global phase.
pub fn synthesize_full_preparation(cfg: BlockConfig) -> Circuit {
    let n = cfg.total_qubits();
    let mut c = Circuit::new(n);
    c.gates.push(Gate::Ms(Rational64::new(1, 4)));
    for q in 0..n {
        c.local(LocalGate::Sx, q, n % 4);
    }
    c.local(LocalGate::S, 0, (cfg.blocks + 1) % 4);
    let v = synthesize_v(cfg);
    let residual = apply_phase_algebra(&v).expect("V has no local gates").residual_z;
    c.gates.extend(v.gates);
    for q in residual {
        c.local(LocalGate::Z, q, 1);
    }
    for q in 0..n {
        c.local(LocalGate::Sx, q, cfg.block_size % 4);
    }
    for b in 0..cfg.blocks {
        c.local(LocalGate::S, b * cfg.block_size, 1);
    }
    c
}

/// Gate counts and the MS phase budget `Σ|ξ|` (as a multiple of π).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateAccounting {
    pub ms_count: usize,
    pub zlayer_count: usize,
    pub local_count: usize,
    pub total_ms_phase: Rational64,
}

pub fn gate_accounting(c: &Circuit) -> GateAccounting {
    let mut acc = GateAccounting {
        ms_count: 0,
        zlayer_count: 0,
        local_count: 0,
        total_ms_phase: Rational64::zero(),
    };
    for g in &c.gates {
        match g {
            Gate::Ms(xi) => {
                acc.ms_count += 1;
                acc.total_ms_phase += xi.abs();
            }
            Gate::ZLayer(_) => acc.zlayer_count += 1,
            Gate::Local { .. } => acc.local_count += 1,
        }
    }
    acc
}

/// In-place normalized Hadamard on every qubit.
fn hadamard_transform(amps: &mut [Complex64]) {
    let n = amps.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (amps[j], amps[j + h]);
                amps[j] = a + b;
                amps[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
}

fn phase_of(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64 * std::f64::consts::PI
}

/// `Π_{k<l} exp(i ξ_kl X_k X_l)` applied through the X basis.
fn apply_pairwise_xx(amps: &mut [Complex64], n: usize, xi: impl Fn(usize, usize) -> f64) {
    hadamard_transform(amps);
    for (x, a) in amps.iter_mut().enumerate() {
        let z = |q: usize| if (x >> (n - 1 - q)) & 1 == 0 { 1.0 } else { -1.0 };
        let mut angle = 0.0;
        for k in 0..n {
            for l in k + 1..n {
                angle += xi(k, l) * z(k) * z(l);
            }
        }
        *a *= Complex64::from_polar(1.0, angle);
    }
    hadamard_transform(amps);
}

fn apply_ms(amps: &mut [Complex64], n: usize, xi: f64) {
    // Σ_{k<l} X_k X_l = (S^2 - n)/2 with S = Σ X_k
    hadamard_transform(amps);
    for (x, a) in amps.iter_mut().enumerate() {
        let s = n as f64 - 2.0 * x.count_ones() as f64;
        *a *= Complex64::from_polar(1.0, xi * (s * s - n as f64) / 2.0);
    }
    hadamard_transform(amps);
}

fn apply_local(amps: &mut [Complex64], n: usize, u: [[Complex64; 2]; 2], qubit: usize) {
    let bit = 1usize << (n - 1 - qubit);
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = u[0][0] * a + u[0][1] * b;
            amps[i | bit] = u[1][0] * a + u[1][1] * b;
        }
    }
}

/// Applies `c` to `input` gate by gate.
pub fn simulate_circuit(c: &Circuit, input: &StateVector) -> Result<StateVector> {
    let n = c.qubits;
    if n > MAX_DENSE_QUBITS {
        return Err(Error::resource(
            "circuits",
            format!("{n} qubits exceed the simulation limit of {MAX_DENSE_QUBITS}"),
        ));
    }
    if input.qubit_count() != n {
        return Err(Error::input(format!(
            "input has {} qubits, circuit has {n}",
            input.qubit_count()
        )));
    }
    let mut amps = input.amplitudes().to_vec();
    let iz = [
        [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
    ];
    for g in &c.gates {
        match g {
            Gate::Ms(xi) => apply_ms(&mut amps, n, phase_of(*xi)),
            Gate::ZLayer(set) => set.iter().for_each(|&q| apply_local(&mut amps, n, iz, q)),
            Gate::Local { gate, qubit } => apply_local(&mut amps, n, gate.matrix(), *qubit),
        }
    }
    StateVector::normalized(amps)
}

/// The unitary predicted by [`apply_phase_algebra`], applied to `input`:
/// pairwise XX phases followed by `σ_z` on the residual qubits (up to a
/// global phase).
pub fn apply_phase_matrix(pm: &PhaseMatrix, input: &StateVector) -> Result<StateVector> {
    let n = pm.n;
    if input.qubit_count() != n || n > MAX_DENSE_QUBITS {
        return Err(Error::input("phase matrix and state sizes differ"));
    }
    let mut amps = input.amplitudes().to_vec();
    apply_pairwise_xx(&mut amps, n, |k, l| phase_of(pm.get(k, l)));
    for &q in &pm.residual_z {
        apply_local(&mut amps, n, LocalGate::Z.matrix(), q);
    }
    StateVector::normalized(amps)
}
