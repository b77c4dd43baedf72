mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Output;
use crate::error::CliError;

/// Runs function-space experiments from JSON configs and writes JSON and CSV reports.
#[derive(Parser)]
#[command(name = "envlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving `<subcommand>.json` and `<subcommand>.csv`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Exit with status 4 on inconclusive verdicts.
    #[arg(long)]
    strict: bool,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a step function in a Lebesgue, Lorentz, mixed or variable space.
    Norm(Common),
    /// Non-increasing rearrangement as a value/width table.
    Rearrange(Common),
    /// Certified lower envelope curve with an optional power-law fit.
    Envelope(Common),
    /// Hardy-functional ratios along a witness cascade.
    IndexProbe(Common),
    /// Non-embedding witness norms and envelope ratio tests.
    EmbeddingCheck(Common),
    /// Hardy brackets for analytic profiles and seeded random cross-checks.
    HardyCheck(Common),
    /// Log-Hölder quantity on shrinking cubes.
    LoghoelderCheck(Common),
}

fn write_outputs(dir: &Path, name: &str, out: &Output) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(&out.json).expect("json values serialize");
    json.push('\n');
    std::fs::write(dir.join(format!("{name}.json")), json)?;
    std::fs::write(dir.join(format!("{name}.csv")), &out.csv)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common) = match &cli.command {
        Command::Norm(c) => ("norm", c),
        Command::Rearrange(c) => ("rearrange", c),
        Command::Envelope(c) => ("envelope", c),
        Command::IndexProbe(c) => ("index-probe", c),
        Command::EmbeddingCheck(c) => ("embedding-check", c),
        Command::HardyCheck(c) => ("hardy-check", c),
        Command::LoghoelderCheck(c) => ("loghoelder-check", c),
    };
    let path = common.config.as_path();
    let out = match &cli.command {
        Command::Norm(_) => commands::norm(path),
        Command::Rearrange(_) => commands::rearrange_cmd(path),
        Command::Envelope(_) => commands::envelope(path),
        Command::IndexProbe(_) => commands::index_probe_cmd(path),
        Command::EmbeddingCheck(_) => commands::embedding_check(path),
        Command::HardyCheck(_) => commands::hardy_check(path, common.seed),
        Command::LoghoelderCheck(_) => commands::loghoelder_check(path),
    }?;
    write_outputs(&common.out_dir, name, &out)?;
    match out.inconclusive {
        Some(msg) if common.strict => Err(CliError::Inconclusive(msg)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("envlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
