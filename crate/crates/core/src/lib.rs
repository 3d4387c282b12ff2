//! Noise robustness of concatenated GHZ (C-GHZ) states.
//!
//! A C-GHZ state on `N` logical blocks of `m` physical qubits is
//!
//! ```text
//! |phi_C> = (|GHZ_m^+>^{⊗N} + |GHZ_m^->^{⊗N}) / sqrt(2)
//! ```
//!
//! and this crate measures how much of its "cat-ness" survives independent
//! single-qubit depolarizing noise. It offers four routes to the same numbers:
//!
//! - [`analytic`]: closed forms for the coherence trace norm, its Stirling
//!   lower bound, the logical Bell fidelity of the distillation protocol and
//!   exponential tail fits. These evaluate in log space and reach `N = 10^12`.
//! - [`spectral`]: an exact spectrum engine. Depolarized GHZ blocks are block
//!   diagonal over doublets `{x, complement(x)}`, and permuting blocks only
//!   relabels sectors, so the full `2^{Nm}` spectrum collapses to a sum over
//!   compositions of `N` with multinomial multiplicities. Negativity and
//!   quantum Fisher information are computed sector by sector.
//! - [`oracle`]: brute-force dense density matrices (up to 12 qubits) used to
//!   certify the other two.
//! - [`circuits`]: the Mølmer–Sørensen preparation schedule, its exact phase
//!   algebra, a state-vector simulator and a line-oriented circuit format.
//!
//! [`cli`] wires these into the `cghz` binary (`eval`, `sweep`,
//! `random-compare`, `synthesize`).

#![forbid(unsafe_code)]

pub mod analytic;
pub mod channels;
pub mod circuits;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod spectral;
pub mod states;

pub use channels::NoiseParameter;
pub use error::{Error, Result};
pub use linalg::DenseOperator;
pub use states::{BlockConfig, Sign, StateVector};
