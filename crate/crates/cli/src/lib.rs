//! Command-line experiment runner: training, layer and noise sweeps,
//! invariant checks and device inspection.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{ExperimentConfig, VariantChoice};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pulseforge", version, about = "Gate- and pulse-based re-uploading classifiers on a simulated transmon pair")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON experiment config; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Training seed; repeat for several.
    #[arg(long = "seed", global = true)]
    pub seeds: Vec<u64>,

    /// Comma-separated layer counts.
    #[arg(long, global = true, value_delimiter = ',')]
    pub layers: Option<Vec<usize>>,

    /// Comma-separated depolarizing probabilities for sweep-noise.
    #[arg(long = "noise-p", global = true, value_delimiter = ',')]
    pub noise_p: Option<Vec<f64>>,

    #[arg(long, global = true, value_enum)]
    pub variant: Option<VariantChoice>,

    /// Disable every noise channel and SPAM error.
    #[arg(long, global = true)]
    pub no_noise: bool,

    /// `builtin-brisbane` or a device JSON file.
    #[arg(long, global = true)]
    pub device: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train each selected variant and seed at the first layer count.
    Train,
    /// Accuracy against the number of layers.
    SweepLayers,
    /// Accuracy against the depolarizing probability.
    SweepNoise,
    /// Run the fast invariant suite.
    Verify,
    /// Show the resolved device model.
    Device,
    /// Write a synthetic circle dataset as CSV.
    GenData {
        #[arg(long, default_value_t = 400)]
        n_samples: usize,
        /// Output CSV (default: <out>/circle.csv).
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

impl Cli {
    /// Config file (or defaults) with flag overrides applied.
    pub fn resolve_config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds.clone();
        }
        if let Some(l) = &self.layers {
            cfg.layers = l.clone();
        }
        if let Some(p) = &self.noise_p {
            cfg.noise.p_grid = p.clone();
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if self.no_noise {
            cfg.noise.enabled = false;
            cfg.noise.spam_enabled = false;
        }
        if let Some(d) = &self.device {
            cfg.device = d.clone();
        }
        Ok(cfg)
    }
}

/// Caps rayon's worker count from `PULSEFORGE_THREADS`. Only the first
/// call in a process has an effect.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PULSEFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("PULSEFORGE_THREADS must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(CliError::Config("PULSEFORGE_THREADS must be at least 1".into()));
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    init_threads()?;
    let cfg = cli.resolve_config()?;
    match &cli.command {
        Command::Train => commands::cmd_train(&cfg, out).map(drop),
        Command::SweepLayers => commands::cmd_sweep_layers(&cfg, out).map(drop),
        Command::SweepNoise => commands::cmd_sweep_noise(&cfg, out).map(drop),
        Command::Verify => match verify::verify(&cfg.device, out)? {
            0 => Ok(()),
            n => Err(CliError::Verification(n)),
        },
        Command::Device => commands::cmd_device(&cfg.device, out).map(drop),
        Command::GenData { n_samples, path } => {
            let seed = cfg.seeds[0];
            let path = path.clone().unwrap_or_else(|| cfg.out_dir.join("circle.csv"));
            commands::cmd_gen_data(*n_samples, seed, &path, out).map(drop)
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Errors go to `err`.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
