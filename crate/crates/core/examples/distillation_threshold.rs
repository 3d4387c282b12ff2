// Two-block Bell-pair fidelity after measuring the other blocks, and the
// largest N that still distills above 1/2.

use cghz::analytic::{distill_fidelity, distill_threshold, Threshold};
use cghz::{BlockConfig, NoiseParameter};
use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let mut out = String::new();
    let p = NoiseParameter::new(0.9)?;
    let flagship = distill_fidelity(BlockConfig::new(1_000_000_000_000, 10)?, p)?;
    writeln!(out, "F(N=1e12, m=10, p=0.9) = {flagship:.6}").unwrap();
    for m in 1..=10 {
        let t = match distill_threshold(m, p)? {
            Threshold::Bounded(n) => n.to_string(),
            Threshold::UnboundedInTestedRange { cap } => format!("> {cap}"),
            Threshold::NotDistillable => "none".into(),
        };
        writeln!(out, "m = {m:>2}: largest N with F > 1/2 is {t}").unwrap();
    }
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
