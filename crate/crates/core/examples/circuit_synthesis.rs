// Mølmer-Sørensen preparation schedule: gate accounting, the exact phase
// matrix of the entangling stage, and a state-vector check of the output.

use cghz::circuits::{apply_phase_algebra, gate_accounting, simulate_circuit, synthesize_full_preparation, synthesize_v};
use cghz::states::cghz;
use cghz::{BlockConfig, StateVector};
use num_rational::Rational64;
use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let mut out = String::new();
    for (n, m) in [(2, 2), (3, 2), (4, 2), (8, 3)] {
        let cfg = BlockConfig::new(n, m)?;
        let full = synthesize_full_preparation(cfg);
        let acc = gate_accounting(&full);
        let pattern = apply_phase_algebra(&synthesize_v(cfg))?.has_block_pattern(
            cfg,
            Rational64::new(1, 4),
            Rational64::new(0, 1),
        );
        write!(
            out,
            "N={n} m={m}: {} MS, {} Z layers, MS phase {}pi, block pattern {pattern}",
            acc.ms_count, acc.zlayer_count, acc.total_ms_phase
        )
        .unwrap();
        if cfg.total_qubits() <= 10 {
            let state = simulate_circuit(&full, &StateVector::zero_state(cfg.total_qubits()))?;
            write!(out, ", fidelity {:.12}", state.fidelity(&cghz(cfg)?)).unwrap();
        }
        writeln!(out).unwrap();
    }
    writeln!(out, "{}", synthesize_full_preparation(BlockConfig::new(2, 2)?).export()).unwrap();
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
