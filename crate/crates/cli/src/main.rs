use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qmat_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            let _ = std::io::stdout().flush();
            if let Some(msg) = outcome.diagnostic {
                eprintln!("qmat: {msg}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("qmat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
