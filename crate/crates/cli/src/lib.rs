//! Configuration-driven runs: models, constructions and analyses written as
//! hashed, byte-reproducible artifact directories.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::{CliError, CliResult};
use output::{Format, Run};

#[derive(Parser, Debug)]
#[command(name = "shiftlab", version, about = "Distributional chaos constructions and finite-horizon analysis on shift spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "shiftlab-out")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub horizon: Option<String>,
    #[arg(long, global = true)]
    pub stages: Option<usize>,
    /// Weight name (sqrt, logceil, pow<p>/<q>) or a file of integer values.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Digits of the expansion of 1 computed for β models.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Recorded rng seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Transitivity, primitivity index and period of the model.
    Check,
    /// Cyclic classes of an irreducible transition system.
    Decompose,
    /// Scrambled family with DC1 pair reports.
    ConstructDc1,
    /// Family tracking a segment of measures between two level values.
    ConstructLevelSet,
    /// Polynomial-metric family with weighted closeness.
    ConstructPolynomial,
    /// Closeness curves and a verdict for one pair of streams.
    AnalyzePair,
    /// Greedy β-expansion of a rational.
    BetaExpand,
    /// Re-verify the hashes of a finished run directory.
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Decompose => "decompose",
            Command::ConstructDc1 => "construct-dc1",
            Command::ConstructLevelSet => "construct-level-set",
            Command::ConstructPolynomial => "construct-polynomial",
            Command::AnalyzePair => "analyze-pair",
            Command::BetaExpand => "beta-expand",
            Command::Report => "report",
        }
    }
}

/// Flags override the file.
pub fn effective_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if cli.horizon.is_some() {
        cfg.horizon = cli.horizon.clone();
    }
    if cli.stages.is_some() {
        cfg.stages = cli.stages;
    }
    if cli.alpha.is_some() {
        cfg.alpha = cli.alpha.clone();
    }
    if cli.precision.is_some() {
        cfg.precision = cli.precision;
    }
    if cli.seed.is_some() {
        cfg.rng_seed = cli.seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> CliResult<serde_json::Value> {
    if cli.command == Command::Report {
        return commands::report(&cli.out);
    }
    let cfg = effective_config(cli)?;
    let mut run = Run::new(cli.format);
    match cli.command {
        Command::Check => commands::check(&cfg, &mut run)?,
        Command::Decompose => commands::decompose(&cfg, &mut run)?,
        Command::ConstructDc1 => commands::construct_dc1(&cfg, &mut run)?,
        Command::ConstructLevelSet => commands::construct_level_set(&cfg, &mut run)?,
        Command::ConstructPolynomial => commands::construct_polynomial(&cfg, &mut run)?,
        Command::AnalyzePair => commands::analyze_pair(&cfg, &mut run)?,
        Command::BetaExpand => commands::beta_expand_cmd(&cfg, &mut run)?,
        Command::Report => unreachable!(),
    }
    output::mkdir(&cli.out)?;
    let mut echo = serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    echo["format"] = serde_json::json!(format!("{:?}", cli.format).to_lowercase());
    run.finish(&cli.out, cli.command.name(), echo)
}

/// Process entry: prints the result (or the error) and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(v) => {
            let shown = if cli.command == Command::Report { v } else { v["result"].clone() };
            // a closed pipe is not a failed run
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&shown).expect("json values serialize"));
            0
        }
        Err(e) => {
            eprintln!("shiftlab {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
