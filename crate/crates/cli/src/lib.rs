//! Command-line experiment runner.
//!
//! Exit status: 0 on success, 1 on runtime failure (I/O, malformed data),
//! 2 on usage or configuration errors.

pub mod commands;
pub mod config;
pub mod grid_file;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<creyes_core::Error> for CliError {
    fn from(e: creyes_core::Error) -> Self {
        use creyes_core::Error as E;
        match e {
            E::Config(_) | E::Usage(_) | E::Domain(_) => CliError::Usage(e.to_string()),
            E::MaskViolation { .. } | E::Data { .. } | E::Io { .. } | E::Csv(_) => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Parser)]
#[command(name = "creyes", version, about = "Foveated game-playing agent: training, rollouts and gaze analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Experiment config (flat `section.key = value` file).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides `run.out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a network and write its checkpoint and metrics.
    Train {
        #[command(flatten)]
        common: Common,
    },
    /// Play episodes with a trained checkpoint and write their logs.
    Rollout {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Overrides `eval.episodes`.
        #[arg(long)]
        episodes: Option<usize>,
        /// Overrides `game.pausing`.
        #[arg(long, value_enum)]
        pausing: Option<Switch>,
    },
    /// Histograms, saliency maps, scanpaths and AUC for episode logs.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Episode log files or directories containing `episode_*.csv`.
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        /// Reference episode logs or gaze logs.
        #[arg(long, num_args = 1..)]
        reference: Vec<PathBuf>,
        /// Cut reference episodes to the mean agent episode length.
        #[arg(long)]
        truncate_reference: bool,
    },
    /// Calibrate the pause and saccade penalties against a reference histogram.
    GridSearch {
        #[command(flatten)]
        common: Common,
        /// Grid file with `c_pause = …` and `c_sacc = …` value lists.
        #[arg(long)]
        grid: PathBuf,
        /// Reference frame-duration histogram CSV.
        #[arg(long)]
        reference: PathBuf,
    },
    /// Convert a human gaze log into reference histogram, fixations and heatmap.
    ImportGaze {
        #[command(flatten)]
        common: Common,
        input: PathBuf,
        /// Keep at most this many frames per episode.
        #[arg(long)]
        max_frames: Option<usize>,
    },
}

pub fn resolve_config(common: &Common) -> CliResult<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train { common } => commands::train(&resolve_config(&common)?),
        Command::Rollout {
            common,
            checkpoint,
            episodes,
            pausing,
        } => {
            let mut cfg = resolve_config(&common)?;
            if let Some(n) = episodes {
                cfg.eval.episodes = n;
            }
            if let Some(p) = pausing {
                cfg.pausing = p == Switch::On;
            }
            commands::rollout(&cfg, &checkpoint)
        }
        Command::Eval {
            common,
            logs,
            reference,
            truncate_reference,
        } => commands::eval(&resolve_config(&common)?, &logs, &reference, truncate_reference),
        Command::GridSearch { common, grid, reference } => {
            commands::grid_search(&resolve_config(&common)?, &grid, &reference)
        }
        Command::ImportGaze {
            common,
            input,
            max_frames,
        } => commands::import_gaze(&resolve_config(&common)?, &input, max_frames),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
