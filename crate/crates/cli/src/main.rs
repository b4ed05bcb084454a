use std::path::{Path, PathBuf};
use std::process::ExitCode;

use billiard_wigner_cli::{cmd_check, cmd_current, cmd_project, cmd_wigner, CliError, ConfigError, RunConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "billiard-wigner", version, about = "Wigner functions and currents of quantum billiards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export W on the configured grid at each time.
    Wigner(RunArgs),
    /// Export W, the Wigner current and the W = 0 contours at each time.
    Current(RunArgs),
    /// Run the configured verification suites.
    Check(RunArgs),
    /// Print the Gaussian projection coefficients.
    Project(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set grid.nx=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (Command::Wigner(args) | Command::Current(args) | Command::Check(args) | Command::Project(args)) = &cli.command;
    let raw = std::fs::read_to_string(&args.config)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = RunConfig::parse(&raw, &args.set)?;
    let out = args.out.clone().unwrap_or_else(|| Path::new(&cfg.output.dir).to_path_buf());
    match &cli.command {
        Command::Wigner(_) | Command::Current(_) => {
            let r = if matches!(cli.command, Command::Wigner(_)) {
                cmd_wigner(&cfg, Some(&raw), &out)?
            } else {
                cmd_current(&cfg, Some(&raw), &out)?
            };
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            for f in &r.files {
                println!("{}", f.display());
            }
            Ok(0)
        }
        Command::Check(_) => {
            let report = cmd_check(&cfg, Some(&raw), &out)?;
            print!("{}", report.table());
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Project(_) => {
            print!("{}", cmd_project(&cfg, Some(&raw))?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
