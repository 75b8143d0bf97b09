use std::process::ExitCode;

use clap::Parser;
use wcop::cli::{self, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(cli::EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    cli::run(cli)
}
