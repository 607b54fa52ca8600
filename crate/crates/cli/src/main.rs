use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;

use args::Cli;

/// Exit status for a failed run: 2 when a budget or precision ladder ran
/// out, 1 for everything else.
fn failure_code(err: &gal_core::Error) -> u8 {
    if err.is_exhaustion() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set thread count: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let result = commands::run(&cli);
    eprintln!("# wall time {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(failure_code(&e))
        }
        Err(commands::Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
