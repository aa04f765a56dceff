use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use leftre_cli::{oracle, run, validate, Construction, OracleMode, RunConfig};

/// Finite-horizon runs of left-r.e. constructions.
#[derive(Parser)]
#[command(name = "leftre", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one construction and check its invariants.
    Run {
        /// Construction name; may be omitted when --config names one.
        construction: Option<Construction>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long)]
        bits: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Extra input file, as NAME=PATH. Repeatable.
        #[arg(long = "input", value_name = "NAME=PATH")]
        inputs: Vec<String>,
        /// Directory for trace.jsonl and verdict.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every process in a numbering file for lex monotonicity.
    Validate { file: PathBuf },
    /// Brute-force INC or LEX relation of a numbering file, as CSV.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value = "lex")]
        mode: OracleMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cmd: Command) -> anyhow::Result<bool> {
    match cmd {
        Command::Run { construction, config, stages, bits, seed, inputs, out } => {
            let mut cfg = match (config, construction) {
                (Some(path), c) => {
                    let cfg = RunConfig::load(&path)?;
                    if c.is_some_and(|c| c != cfg.construction) {
                        bail!("{} configures {}, not {}", path.display(), cfg.construction, c.unwrap());
                    }
                    cfg
                }
                (None, Some(c)) => RunConfig::new(c),
                (None, None) => bail!("name a construction or pass --config"),
            };
            cfg.stages = stages.or(cfg.stages);
            cfg.bits = bits.or(cfg.bits);
            cfg.seed = seed.unwrap_or(cfg.seed);
            for pair in inputs {
                let (name, path) = pair.split_once('=').with_context(|| format!("--input {pair:?} is not NAME=PATH"))?;
                cfg = cfg.with_input(name, path);
            }
            let report = run(&cfg)?;
            if let Some(dir) = out {
                report.write(&dir)?;
            }
            print!("{}", report.verdict_json());
            Ok(report.passed())
        }
        Command::Validate { file } => {
            let report = validate(&file)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.ok)
        }
        Command::Oracle { file, mode, out } => {
            let csv = oracle(&file, mode)?.to_csv();
            match out {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(true)
        }
    }
}
