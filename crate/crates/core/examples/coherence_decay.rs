// Coherence norm of the decohered C-GHZ state against N, for fixed and
// logarithmically growing block sizes, next to the weak-noise lower bound.

use cghz::analytic::{coherence_bound, coherence_norm};
use cghz::{BlockConfig, NoiseParameter};
use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let p = NoiseParameter::new(0.9)?;
    let mut out = String::new();
    writeln!(out, "{:>8} {:>4} {:>14} {:>14}", "N", "m", "norm", "bound").unwrap();
    for m in [1, 2, 4, 8] {
        for n in [1, 10, 100, 1000] {
            let cfg = BlockConfig::new(n, m)?;
            writeln!(
                out,
                "{n:>8} {m:>4} {:>14.6e} {:>14.6e}",
                coherence_norm(cfg, p),
                coherence_bound(cfg, p)
            )
            .unwrap();
        }
    }
    writeln!(out, "growing blocks, m = ceil(log2 N):").unwrap();
    for k in [4, 8, 12, 16, 20] {
        let n = 1usize << k;
        let cfg = BlockConfig::new(n, k)?;
        writeln!(out, "{n:>8} {k:>4} {:>14.6}", coherence_norm(cfg, p)).unwrap();
    }
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
