//! Batch driver for half-space RTM experiments: synthesize data, image it,
//! profile the point spread function and run the numerical self-checks.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

pub use commands::{cmd_image, cmd_psf, cmd_synthesize, cmd_validate, RunOptions};
pub use config::ExperimentConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "hsrtm", version, about = "Half-space elastic RTM experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to the config's output_dir, then ".".
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Noise seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the forward problem and write one dataset per frequency.
    Synthesize,
    /// Image datasets on the configured grid.
    Image {
        /// Dataset files; defaults to the synthesize outputs in the output directory.
        #[arg(long, num_args = 1..)]
        data: Vec<PathBuf>,
    },
    /// Sweep the point spread function over the imaging window.
    Psf,
    /// Run the Green tensor and PSF self-checks.
    Validate,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let loaded = match &cli.common.config {
        Some(p) => Some(ExperimentConfig::load(p)?),
        None => None,
    };
    let cfg = loaded.as_ref().map(|l| &l.0);
    let out = cli
        .common
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let mut opts = RunOptions {
        out,
        seed: cli.common.seed,
        config_sha256: loaded.as_ref().map(|l| output::sha256_hex(&l.1)),
        data: Vec::new(),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    let need = || cfg.ok_or_else(|| CliError::Config("--config is required".into()));
    pool.install(|| match cli.command {
        Command::Synthesize => cmd_synthesize(need()?, &opts).map(|_| ()),
        Command::Image { data } => {
            opts.data = data;
            cmd_image(need()?, &opts).map(|_| ())
        }
        Command::Psf => cmd_psf(need()?, &opts).map(|_| ()),
        Command::Validate => cmd_validate(cfg, cli.common.out.as_deref()).map(|_| ()),
    })
}
