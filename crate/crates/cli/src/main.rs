mod args;
mod output;
mod physics;
mod shape;
mod xi;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::{input_error, Failure};

/// Caps the rayon pool when `NP_SPECTRA_THREADS` is set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("NP_SPECTRA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| input_error(format!("NP_SPECTRA_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(input_error)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    let ts = cli.no_timestamp;
    match &cli.command {
        Command::Spectrum(a) => physics::spectrum(a, ts),
        Command::Resonance(a) => physics::resonance(a, ts),
        Command::Excite(a) => physics::excite(a, ts),
        Command::Fredholm(a) => physics::fredholm(a, ts),
        Command::Xi(a) => xi::xi(a, ts),
        Command::GrommerCheck(a) => xi::grommer_check(a, ts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("np-spectra: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
