// Negativity across the first-block cut from the sector engine, with an
// exponential tail fit per block size.

use cghz::analytic::fit_exponential_tail;
use cghz::spectral::negativity;
use cghz::{BlockConfig, NoiseParameter};
use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let p = NoiseParameter::new(0.9)?;
    let mut out = String::new();
    for m in 1..=3 {
        let points = (6..=20)
            .map(|n| Ok((n as f64, negativity(BlockConfig::new(n, m)?, p)?)))
            .collect::<cghz::Result<Vec<_>>>()?;
        let fit = fit_exponential_tail(&points, Some(6.0..=20.0))?;
        writeln!(
            out,
            "m = {m}: N(6) = {:.4e}, N(20) = {:.4e}, fitted rate {:.4}",
            points[0].1,
            points[points.len() - 1].1,
            fit.rate
        )
        .unwrap();
    }
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
