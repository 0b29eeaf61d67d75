//! Thin command-line front end: loads a config, applies flag overrides,
//! dispatches to the experiment drivers, and writes their output.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use cellhop::config::ExperimentConfig;
use cellhop::experiment::{cmd_constants, cmd_gain, cmd_sweep, cmd_throughput};
use cellhop::montecarlo::RelayScheme;

#[derive(Parser)]
#[command(
    name = "cellhop",
    about = "Two-hop cellular relaying: Monte-Carlo sweeps and analytic outage curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the lattice interference constants C(alpha).
    Constants {
        /// Path-loss exponents to evaluate.
        #[arg(long = "alpha", value_delimiter = ',', default_values_t = vec![3.0, 4.0])]
        alpha: Vec<f64>,
    },
    /// Outage probabilities over the (SNR, beta) grid.
    Sweep(RunArgs),
    /// Relaying gain over the grid plus its analytic limit.
    Gain(RunArgs),
    /// Spatial throughput density over the grid.
    Throughput(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trials per grid point.
    #[arg(long)]
    trials: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relay selection scheme.
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<RelayScheme>,
    /// Override the beta grid (comma-separated).
    #[arg(long = "beta", value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Override the SNR grid in dB (comma-separated).
    #[arg(long = "snr-db", value_delimiter = ',')]
    snr_db: Option<Vec<f64>>,
}

fn parse_scheme(s: &str) -> Result<RelayScheme, String> {
    RelayScheme::from_label(s).ok_or_else(|| "expected retransmit|nearest|best".to_string())
}

impl RunArgs {
    fn into_config(self) -> Result<(ExperimentConfig, Option<PathBuf>), String> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path).map_err(|e| e.to_string())?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(scheme) = self.scheme {
            cfg.scheme = scheme;
        }
        if let Some(betas) = self.beta {
            cfg.sweep_betas = betas;
        }
        if let Some(snrs) = self.snr_db {
            cfg.sweep_snr_db = snrs;
        }
        let out = self.out.or_else(|| cfg.out.as_ref().map(PathBuf::from));
        Ok((cfg, out))
    }
}

fn main() {
    if let Err(msg) = run(Cli::parse()) {
        eprintln!("error: {msg}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let (text, out) = match cli.cmd {
        Cmd::Constants { alpha } => (cmd_constants(&alpha).map_err(|e| e.to_string())?, None),
        Cmd::Sweep(args) => {
            let (cfg, out) = args.into_config()?;
            (cmd_sweep(&cfg).map_err(|e| e.to_string())?, out)
        }
        Cmd::Gain(args) => {
            let (cfg, out) = args.into_config()?;
            (cmd_gain(&cfg).map_err(|e| e.to_string())?, out)
        }
        Cmd::Throughput(args) => {
            let (cfg, out) = args.into_config()?;
            (cmd_throughput(&cfg).map_err(|e| e.to_string())?, out)
        }
    };
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
