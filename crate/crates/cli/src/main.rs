use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qperc_cli::commands::{depth, markov, train, xor};
use qperc_cli::{CliError, ExperimentConfig};

/// Derivative-free quantum perceptron experiments.
#[derive(Parser)]
#[command(name = "qperc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derivative-free trainer against backprop on XOR.
    XorBench(Common),
    /// Per-layer update cost for increasing depth.
    DepthBench(Common),
    /// Markov chain driven by a preset unitary.
    Markov(Common),
    /// Train the configured method on a dataset file.
    Train {
        #[command(flatten)]
        common: Common,
        /// Dataset file; overrides `dataset` in the config.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run a single seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seeds = vec![seed];
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::XorBench(c) => xor::cmd_xor_bench(&c.load()?),
        Command::DepthBench(c) => depth::cmd_depth_bench(&c.load()?),
        Command::Markov(c) => markov::cmd_markov(&c.load()?),
        Command::Train { common, dataset } => {
            let cfg = common.load()?;
            let path = dataset
                .or_else(|| cfg.dataset.clone())
                .ok_or_else(|| CliError::Usage("train needs --dataset or a `dataset` config key".into()))?;
            train::cmd_train(&cfg, &path)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
