use clap::Parser;

use hardsphere_harness::cli;
use hardsphere_harness::HarnessError;

fn main() {
    let parsed = cli::Cli::parse();
    match cli::run(parsed) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                HarnessError::Parse(_) => 2,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}
