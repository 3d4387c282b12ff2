// Drives the command line in-process: a negativity sweep with tail fits.

use std::fmt::Write;

pub fn run_example() -> cghz::Result<String> {
    let args = ["cghz", "sweep", "negativity", "--N", "6..12", "--m", "1,2", "--p", "0.9", "--fit"];
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = cghz::cli::run(args, &mut stdout, &mut stderr);
    let mut out = String::from_utf8_lossy(&stdout).into_owned();
    if code != 0 {
        return Err(cghz::Error::Consistency(String::from_utf8_lossy(&stderr).into_owned()));
    }
    writeln!(out, "exit code {code}").unwrap();
    Ok(out)
}

fn main() -> cghz::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
