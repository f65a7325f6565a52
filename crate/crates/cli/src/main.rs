//! `thickspray`: dispersion scans, root finding, mode simulations and
//! stability checks driven by JSON configs or bundled scenarios.

mod config;
mod error;
mod manifest;
mod plotdata;
mod run;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use config::{merge, Command, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "thickspray", version, about = "Stability analysis of a kinetic-fluid spray model")]
struct Cli {
    /// Overrides the command of the config or scenario.
    #[arg(value_enum)]
    command: Option<Command>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled scenario used as the base config.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(scenarios::NAMES))]
    scenario: Option<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

const DEFAULT_OUTPUT_DIR: &str = "thickspray-out";

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let user = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if !v.is_object() {
                return Err(CliError::Config(format!("{}: expected a JSON object", path.display())));
            }
            Some(v)
        }
        None => None,
    };
    if user.is_none() && cli.scenario.is_none() {
        return Err(CliError::Config("nothing to run: pass --config or --scenario".into()));
    }
    let scenario = cli
        .scenario
        .clone()
        .or_else(|| user.as_ref()?.get("seed_scenario")?.as_str().map(String::from));
    let mut merged = match &scenario {
        Some(name) => scenarios::get(name).ok_or_else(|| CliError::Config(format!("unknown scenario {name:?}")))?,
        None => Value::Object(Default::default()),
    };
    if let Some(u) = user {
        merge(&mut merged, u);
    }
    if let Some(name) = scenario {
        merged["seed_scenario"] = Value::String(name);
    }
    if let Some(c) = cli.command {
        merged["command"] = serde_json::to_value(c).expect("command serializes");
    }
    if let Some(out) = &cli.out {
        merged["output_dir"] = serde_json::to_value(out).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cfg: RunConfig = serde_json::from_value(merged).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(PathBuf, manifest::Manifest), CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cfg = load(cli)?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let outcome = run::execute(&cfg, &dir)?;
    let m = manifest::build(&cfg, outcome.warnings, outcome.outputs, outcome.summary);
    write_manifest(&dir, &m)?;
    Ok((dir, m))
}

fn write_manifest(dir: &Path, m: &manifest::Manifest) -> Result<(), CliError> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(m).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(CliError::io(&path))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((dir, m)) => {
            if !cli.quiet {
                println!("{}: wrote {} files to {}", m.command, m.outputs.len() + 1, dir.display());
                for w in &m.warnings {
                    println!("warning: {w}");
                }
                println!("{}", m.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = serde_json::to_string(&e.report()).expect("report serializes");
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
