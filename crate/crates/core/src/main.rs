use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nivat::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::FAILURE;
        }
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(o) => {
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{}", o.json);
            let _ = writeln!(std::io::stderr().lock(), "{}", o.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr().lock(), "error: {e}");
            ExitCode::FAILURE
        }
    }
}
