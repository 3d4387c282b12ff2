// Cross-checks the sector engine against dense density matrices: spectrum,
// negativity and Fisher information of the decohered state.

use cghz::linalg::eigvals_hermitian;
use cghz::oracle::{block_x_generator, decohered_cghz, fisher_dense, negativity_dense};
use cghz::spectral::{cghz_spectrum, fisher_information, negativity, Generator};
use cghz::{BlockConfig, NoiseParameter};
use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let p = NoiseParameter::new(0.9)?;
    let mut out = String::new();
    for (n, m) in [(2, 2), (3, 2), (2, 4), (4, 2)] {
        let cfg = BlockConfig::new(n, m)?;
        let rho = decohered_cghz(cfg, p)?;
        let mut dense = eigvals_hermitian(&rho)?;
        let mut sector = cghz_spectrum(cfg, p)?.expanded()?;
        dense.sort_by(f64::total_cmp);
        sector.sort_by(f64::total_cmp);
        let spectrum_gap = dense.iter().zip(&sector).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let neg_gap = (negativity(cfg, p)? - negativity_dense(&rho, cfg)?).abs();
        let fisher_gap =
            (fisher_information(cfg, p, Generator::BlockX)? - fisher_dense(&rho, &block_x_generator(cfg)?)?).abs();
        writeln!(
            out,
            "N={n} m={m}: spectrum {spectrum_gap:.1e}, negativity {neg_gap:.1e}, fisher {fisher_gap:.1e}"
        )
        .unwrap();
    }
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
