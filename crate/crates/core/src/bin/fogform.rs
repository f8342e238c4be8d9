use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fogform::config::{parse_config, DEFAULT_CONFIG_TOML};
use fogform::manifest::write_experiment;
use fogform::scenario::{generate_scenario, iteration_rng, node_set};
use fogform::{load_config, offline_top_j, solve_distribution, Error, Experiment, Override, PathKind, ScenarioConfig};

#[derive(Parser)]
#[command(name = "fogform", version, about = "Fog network formation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Scenario config (TOML) or a run manifest. Falls back to
    /// $FOGFORM_CONFIG, then to the built-in defaults.
    #[arg(long, env = "FOGFORM_CONFIG")]
    config: Option<PathBuf>,

    /// Override a config key, e.g. `--set x_i=12 --set radio.tx_power_dbm=23`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the task distribution for the best J neighbors of one scenario.
    Solve {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run a named experiment and write <name>.csv and <name>.manifest.
    Experiment {
        /// One of: offline-sweep, online-vs-offline, ratio-cdf, distance-sweep, choose-j
        name: String,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for Monte Carlo iterations; results do not depend on it.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load(args: &ConfigArgs) -> Result<ScenarioConfig, Failure> {
    let overrides = args.overrides.iter().map(|s| s.parse::<Override>()).collect::<Result<Vec<_>, _>>()?;
    let cfg = match &args.config {
        Some(path) => load_config(path, &overrides)?,
        None => parse_config(DEFAULT_CONFIG_TOML, &overrides)?,
    };
    Ok(cfg)
}

fn solve(args: &ConfigArgs) -> Result<(), Failure> {
    let cfg = load(args)?;
    let candidates = generate_scenario(&cfg, &mut iteration_rng(cfg.seed, 0))?;
    let best = offline_top_j(&candidates, cfg.j)?;
    let nodes = node_set(&cfg, cfg.local_prof, &best.chosen)?;
    let report = solve_distribution(&nodes, cfg.eta, cfg.tolerance)?;

    println!("x_i = {} packets/s, J = {}, eta = {} s", cfg.x_i, cfg.j, cfg.eta);
    println!("{:<18} {:>12} {:>12} {:>14}", "path", "mu_tx", "alpha", "delay_s");
    let alphas = report.distribution.path_fractions(&nodes);
    let mut fog = 0;
    for (k, path) in nodes.paths().iter().enumerate() {
        let (label, mu_tx) = match path.kind() {
            PathKind::Local => ("local".to_string(), f64::NAN),
            PathKind::Cloud => ("cloud".to_string(), nodes.cloud.map(|c| c.mu_tx).unwrap_or(f64::NAN)),
            PathKind::Fog => {
                let c = &best.chosen[fog];
                fog += 1;
                (format!("fog #{} (n={})", c.id, c.arrival_index), c.mu_tx)
            }
        };
        let mark = if report.active_mask[k] { "" } else { "  (unused)" };
        println!("{label:<18} {mu_tx:>12.4} {:>12.6} {:>14.6}{mark}", alphas[k], report.per_path_delays[k]);
    }
    println!("common delay D = {:.9} s", report.common_delay);
    println!("max delay      = {:.9} s", report.max_delay);
    println!("total cost     = {:.9} s", report.total_cost);
    Ok(())
}

fn experiment(name: &str, args: &ConfigArgs, out: &Path, seed: Option<u64>, workers: usize) -> Result<(), Failure> {
    let experiment: Experiment = name.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let mut cfg = load(args)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if workers == 0 {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    let output = write_experiment(experiment, &cfg, out, workers)?;
    println!("{}: {} rows", experiment, output.table.rows.len());
    println!("  csv:      {}", output.csv_path.display());
    println!("  manifest: {}", output.manifest_path.display());
    if experiment == Experiment::ChooseJ {
        let table = &output.table;
        if let Some(row) = table.rows.iter().find(|r| r[table.columns.len() - 1].as_f64() == 1.0) {
            println!("  chosen J = {}", row[0].as_f64());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { config } => solve(config),
        Command::Experiment { name, config, out, seed, workers } => experiment(name, config, out, *seed, *workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
