use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dephase::cli::{config_failure, exit, run_command, write_outputs, Command, RunConfig};

/// Dephasing-channel decompositions, Fock-space oracle and restoration runs.
#[derive(Debug, Parser)]
#[command(name = "dephase", version)]
struct Args {
    /// coefficients | decompose | fock | basis | restore
    command: Command,
    /// JSON run configuration; `-` reads stdin.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and CSV tables.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn read_config(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match read_config(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("dephase: cannot read {}: {e}", args.config.display());
            return ExitCode::from(exit::OTHER as u8);
        }
    };
    let output = match RunConfig::from_json(&text) {
        Ok(cfg) => run_command(args.command, &cfg, args.seed),
        Err(e) => {
            eprintln!("dephase: {e}");
            config_failure(args.command, &e)
        }
    };
    print!("{}", output.report_text());
    if let Err(e) = write_outputs(&args.out, &output) {
        eprintln!("dephase: cannot write to {}: {e}", args.out.display());
        return ExitCode::from(exit::OTHER as u8);
    }
    ExitCode::from(output.exit_code as u8)
}
