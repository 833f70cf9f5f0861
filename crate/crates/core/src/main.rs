use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use entangle_core::cli::{budget_from_env, run, Cli};

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = budget_from_env().and_then(|budget| {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        let r = run(cli, budget, &mut out);
        out.flush().ok();
        r
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
