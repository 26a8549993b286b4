use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use dbsim::cli::{self, Cli};

fn main() -> ExitCode {
    // Help and version requests print and exit 0 through clap.
    if let Err(e) = Cli::try_parse() {
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            e.exit();
        }
    }
    let result = cli::workers_from_env()
        .and_then(|w| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build_global()
                .map_err(|e| dbsim::Error::Configuration(e.to_string()))
        })
        .and_then(|_| cli::manifest_from_args(std::env::args_os()))
        .and_then(|m| cli::run(&m));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dbsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
