use std::process::ExitCode;

use clap::Parser;
use sensorplace::cli::{help_json, run, Cli};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--help-json") {
        let path: Vec<String> = args[1..].iter().filter(|a| !a.starts_with('-')).cloned().collect();
        println!("{}", serde_json::to_string_pretty(&help_json(&path)).expect("plain JSON values"));
        return ExitCode::SUCCESS;
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let category = e.category();
            eprintln!("error ({category:?}): {e}");
            ExitCode::from(category.exit_code() as u8)
        }
    }
}
