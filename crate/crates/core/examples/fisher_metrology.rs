// Quantum Fisher information for a collective logical rotation, compared
// with the standard quantum limit F = N, and the resulting Cramér-Rao bound.

use cghz::spectral::{cramer_rao_bound, fisher_information, Generator};
use cghz::{BlockConfig, NoiseParameter};
use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let p = NoiseParameter::new(0.9)?;
    let mut out = String::new();
    writeln!(out, "{:>4} {:>4} {:>12} {:>8} {:>12}", "N", "m", "F", "F/N", "dtheta(100)").unwrap();
    for m in [1, 3, 5] {
        for n in [2, 10, 30, 50] {
            let f = fisher_information(BlockConfig::new(n, m)?, p, Generator::BlockX)?;
            writeln!(
                out,
                "{n:>4} {m:>4} {f:>12.4} {:>8.3} {:>12.4e}",
                f / n as f64,
                cramer_rao_bound(f, 100)?
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
