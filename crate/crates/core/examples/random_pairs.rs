// Single-block coherence of Haar-random orthogonal pairs against the GHZ pair.

use cghz::cli::random_compare;
use cghz::NoiseParameter;
use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let mut out = String::new();
    for m in 1..=4 {
        let (_, s) = random_compare(m, 200, NoiseParameter::new(0.9)?, 2024)?;
        writeln!(
            out,
            "m = {m}: GHZ pair {:.6}, best of {} random pairs {:.6}, exceeding {}",
            s.cghz_block_norm,
            s.samples - 1,
            s.max_random_norm,
            s.exceed_count
        )
        .unwrap();
    }
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
