use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = mtmct_cli::Cli::parse();
    let stdout = std::io::stdout();
    match mtmct_cli::run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
