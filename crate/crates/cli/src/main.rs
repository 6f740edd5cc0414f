use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use martinwalk_cli::{CliError, Command, Format, Overrides, EXIT_CONFIG};

/// Run a martinwalk suite from a JSON config.
#[derive(Parser, Debug)]
#[command(name = "martinwalk", version)]
struct Args {
    /// Suite to run; must agree with the config's "command" if it has one.
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match execute(&args) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("martinwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let overrides = Overrides {
        command: Some(args.command),
        seed: args.seed,
        workers: args.workers,
        out: args.out.clone(),
        format: args.format,
    };
    let config = martinwalk_cli::parse_config_with(&text, &overrides)?;
    let outcome = martinwalk_cli::run(&config)?;
    let bytes = martinwalk_cli::emit(&outcome.report, config.format);
    match &config.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    Ok(outcome.status)
}
