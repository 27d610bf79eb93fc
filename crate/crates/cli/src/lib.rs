//! Command-line pipeline for the kicked-top experiment: classical mask,
//! Floquet spectrum, overlap indices, OTOC sweeps and statistics, each stage
//! cached by content hash under one output directory.

pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod stages;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use manifest::RunManifest;
pub use stages::Pipeline;

use config::{parse_count, parse_thresholds, ThresholdPair, FULL_FIDELITY_MASK_KICKS};

#[derive(Debug, Parser)]
#[command(name = "kicktop", version, about = "Quantum kicked top: eigenstate classification and OTOC pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical Poincare section.
    Poincare,
    /// Chaotic-sea mask on the phase grid.
    Mask,
    /// Floquet quasienergies and eigenvectors.
    Spectrum,
    /// Husimi overlap indices (needs mask and spectrum).
    Chi,
    /// OTOC series, long-time averages and snapshot fields (needs spectrum and chi).
    Otoc {
        /// Only this eigenstate; written to otoc_k<K>.csv outside the cache.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Profiles, histograms and correlations; with --profiles, a sweep over sizes.
    Analyze {
        #[arg(long, num_args = 1..)]
        profiles: Vec<PathBuf>,
    },
    /// Every stage in order.
    All,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// JSON config file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Spin S.
    #[arg(long = "S", global = true)]
    pub spin: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    #[arg(long = "mask-kicks", global = true, value_parser = parse_count)]
    pub mask_kicks: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Growth-rate window; defaults to nint(ln(2S+1)).
    #[arg(long, global = true)]
    pub tau: Option<u32>,
    #[arg(long, global = true)]
    pub t0: Option<u32>,
    /// Long-time averaging window.
    #[arg(long = "T", global = true)]
    pub window: Option<u32>,
    /// Comma-separated snapshot times.
    #[arg(long, global = true, value_delimiter = ',')]
    pub snapshots: Option<Vec<u32>>,
    /// REGULAR,CHAOTIC classification thresholds.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_thresholds)]
    pub thresholds: Option<ThresholdPair>,
    /// sx or sy.
    #[arg(long, global = true)]
    pub observable: Option<String>,
    /// Power of Q_k in the analytic long-time average (4 or 2).
    #[arg(long = "analytic-power", global = true)]
    pub analytic_power: Option<u32>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Mask orbit of 1e8 kicks unless --mask-kicks is given.
    #[arg(long = "full-fidelity", global = true)]
    pub full_fidelity: bool,
}

impl Overrides {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident <- $flag:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$field = v; })*
            };
        }
        set!(
            spin <- spin,
            alpha <- alpha,
            kappa <- kappa,
            grid_n <- grid_n,
            seed <- seed,
            t0 <- t0,
            window <- window,
            snapshot_times <- snapshots,
            thresholds <- thresholds,
            observable <- observable,
            analytic_power <- analytic_power,
            output_dir <- out,
        );
        if self.tau.is_some() {
            cfg.tau_override = self.tau;
        }
        cfg.full_fidelity |= self.full_fidelity;
        match self.mask_kicks {
            Some(k) => cfg.mask_kicks = k,
            None if cfg.full_fidelity && cfg.mask_kicks == config::DEFAULT_MASK_KICKS => {
                cfg.mask_kicks = FULL_FIDELITY_MASK_KICKS
            }
            None => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Executes one parsed invocation.
pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.overrides.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let cfg = cli.overrides.resolve()?;
    if let Command::Analyze { profiles } = &cli.command {
        if !profiles.is_empty() {
            for p in stages::analyze_profiles(profiles, &cfg.output_dir)? {
                log::info!("wrote {}", p.display());
            }
            return Ok(());
        }
    }
    let mut pipeline = Pipeline::open(cfg)?;
    match &cli.command {
        Command::Poincare => pipeline.poincare().map(drop),
        Command::Mask => pipeline.mask().map(drop),
        Command::Spectrum => pipeline.spectrum().map(drop),
        Command::Chi => pipeline.chi().map(drop),
        Command::Otoc { k: None } => pipeline.otoc().map(drop),
        Command::Otoc { k: Some(k) } => {
            for p in pipeline.otoc_single(*k)? {
                log::info!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Analyze { .. } => pipeline.analyze().map(drop),
        Command::All => pipeline.run_all(),
    }
}
