//! Command-line pipeline: `simulate`, `integrate`, `gen-synthetic`,
//! `train`, `detect` and `noise-sweep`.

mod commands;
mod config;
pub mod corpus;

pub use commands::{
    cmd_detect, cmd_gen_synthetic, cmd_integrate, cmd_noise_sweep, cmd_simulate, cmd_train, integrate_stream,
    Context, DetectArgs, SweepArgs,
};
pub use config::{PathConfig, RunConfig, DEFAULT_NOISE_FRACTIONS};

use crate::event::EventFormat;
use crate::Result;
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "dvs-snn", version, about = "Event-camera UAV detection with a spiking convolutional network")]
pub struct Cli {
    /// TOML run configuration; unset keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for weight init, generators and noise (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for inference and evaluation [default: all cores].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Event file encoding for outputs [default: from the file extension].
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Bin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a directory of frames (with frames.txt) into an event file.
    Simulate {
        frames_dir: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Integrate an event file into a corpus of timestamp frames.
    Integrate {
        events: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Window lengths in microseconds (overrides the config).
        #[arg(long, value_delimiter = ',')]
        lengths_us: Option<Vec<u64>>,
        /// Window overlap fractions (overrides the config).
        #[arg(long, value_delimiter = ',')]
        overlaps: Option<Vec<f64>>,
    },
    /// Generate the labelled synthetic UAV / distractor corpus.
    GenSynthetic {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        uav: Option<usize>,
        #[arg(long)]
        distractors: Option<usize>,
    },
    /// Train the network layer by layer with STDP.
    Train {
        corpus: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Training log path [default: <out>.log].
        #[arg(long)]
        log: Option<PathBuf>,
        /// Presentation budget for every learned layer (overrides the config).
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Run detection on a corpus directory or an event file.
    Detect {
        input: PathBuf,
        #[arg(short, long)]
        weights: PathBuf,
        #[arg(long, value_enum, default_value = "on")]
        pent: Switch,
        /// Score against labels; without a value, the corpus' labels.txt.
        #[arg(long, num_args = 0..=1)]
        labels: Option<Option<PathBuf>>,
    },
    /// Accuracy under additive noise at several pixel fractions.
    NoiseSweep {
        corpus: PathBuf,
        #[arg(short, long)]
        weights: PathBuf,
        #[arg(long, value_delimiter = ',')]
        fractions: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "on")]
        pent: Switch,
        #[arg(long)]
        labels: Option<PathBuf>,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Integrate { lengths_us, overlaps, .. } => {
            if let Some(l) = lengths_us {
                cfg.windows.lengths = l.clone();
            }
            if let Some(o) = overlaps {
                cfg.windows.overlaps = o.clone();
            }
        }
        Command::GenSynthetic { uav, distractors, .. } => {
            if let Some(n) = uav {
                cfg.synthetic.uav_frames = *n;
            }
            if let Some(n) = distractors {
                cfg.synthetic.distractor_frames = *n;
            }
        }
        Command::Train { log, frames, .. } => {
            if let Some(l) = log {
                cfg.paths.train_log = Some(l.clone());
            }
            if let Some(n) = frames {
                cfg.schedule.frames_layer1 = *n;
                cfg.schedule.frames_layer2 = *n;
                cfg.schedule.frames_layer3 = *n;
            }
        }
        _ => {}
    }
    cfg.resolved()
}

/// Runs one parsed command line, writing reports to `out` and diagnostics
/// to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let config = build_config(&cli)?;
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let format = cli.format.map(|f| match f {
        FormatArg::Csv => EventFormat::Csv,
        FormatArg::Bin => EventFormat::Bin,
    });
    let mut ctx = Context {
        config,
        jobs,
        format,
        out,
        err,
    };
    match &cli.command {
        Command::Simulate { frames_dir, out } => cmd_simulate(&mut ctx, frames_dir, out),
        Command::Integrate { events, out, .. } => cmd_integrate(&mut ctx, events, out),
        Command::GenSynthetic { out, .. } => cmd_gen_synthetic(&mut ctx, out),
        Command::Train { corpus, out, .. } => cmd_train(&mut ctx, corpus, out),
        Command::Detect {
            input,
            weights,
            pent,
            labels,
        } => cmd_detect(
            &mut ctx,
            DetectArgs {
                input,
                weights,
                pent: *pent == Switch::On,
                labels: labels.as_ref().map(|l| l.as_deref()),
            },
        ),
        Command::NoiseSweep {
            corpus,
            weights,
            fractions,
            pent,
            labels,
        } => cmd_noise_sweep(
            &mut ctx,
            SweepArgs {
                corpus,
                weights,
                pent: *pent == Switch::On,
                labels: labels.as_deref(),
                fractions: fractions.clone(),
            },
        ),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
