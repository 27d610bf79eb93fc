//! Experiment configuration: defaults, JSON file, command-line overrides.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kicked_top::otoc::{growth_time, AnalyticForm};
use kicked_top::{Observable, Spin, Thresholds};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_MASK_KICKS: u64 = 10_000_000;
pub const FULL_FIDELITY_MASK_KICKS: u64 = 100_000_000;
/// Kick strengths with a mixed classical phase space.
pub const MIXED_KAPPA: (f64, f64) = (2.0, 5.4);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    pub regular: f64,
    pub chaotic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "S")]
    pub spin: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub grid_n: usize,
    pub mask_kicks: u64,
    pub full_fidelity: bool,
    pub seed: u64,
    pub tau_override: Option<u32>,
    pub t0: u32,
    #[serde(rename = "T_window")]
    pub window: u32,
    pub snapshot_times: Vec<u32>,
    pub thresholds: ThresholdPair,
    pub observable: String,
    pub output_dir: PathBuf,
    pub poincare_trajectories: usize,
    pub poincare_kicks: usize,
    pub histogram_bins: usize,
    /// Power of `Q_k` in the diagonal term of the analytic long-time average.
    pub analytic_power: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            spin: 150.0,
            alpha: 13.0 * PI / 19.0,
            kappa: 3.0,
            grid_n: 300,
            mask_kicks: DEFAULT_MASK_KICKS,
            full_fidelity: false,
            seed: 2024,
            tau_override: None,
            t0: 100,
            window: 500,
            snapshot_times: vec![0, 5, 20, 100],
            thresholds: ThresholdPair {
                regular: -0.8,
                chaotic: 0.8,
            },
            observable: "sx".into(),
            output_dir: PathBuf::from("kicktop-out"),
            poincare_trajectories: 121,
            poincare_kicks: 300,
            histogram_bins: 40,
            analytic_power: 4,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        self.spin_checked()?;
        if !self.alpha.is_finite() || !self.kappa.is_finite() {
            return usage("alpha and kappa must be finite".into());
        }
        if self.grid_n < 2 {
            return usage(format!("grid_n must be at least 2, got {}", self.grid_n));
        }
        if self.t0 < 1 || self.window < 1 {
            return usage("t0 and T must both be at least 1".into());
        }
        if self.tau_override == Some(0) {
            return usage("tau_override must be positive".into());
        }
        if self.histogram_bins < 2 {
            return usage("histogram_bins must be at least 2".into());
        }
        if self.poincare_trajectories == 0 || self.poincare_kicks == 0 {
            return usage("poincare section needs trajectories and kicks".into());
        }
        self.thresholds_checked()?;
        self.observable_checked()?;
        self.analytic_form()?;
        Ok(())
    }

    pub fn warn_regime(&self) {
        let (lo, hi) = MIXED_KAPPA;
        if !(lo..=hi).contains(&self.kappa) {
            log::warn!(
                "kappa = {} lies outside [{lo}, {hi}]; the classical phase space is not expected to be mixed",
                self.kappa
            );
        }
    }

    pub fn spin_checked(&self) -> Result<Spin> {
        Spin::new(self.spin).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn thresholds_checked(&self) -> Result<Thresholds> {
        Thresholds::new(self.thresholds.regular, self.thresholds.chaotic).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn observable_checked(&self) -> Result<Observable> {
        self.observable.parse().map_err(|e: kicked_top::Error| CliError::Usage(e.to_string()))
    }

    pub fn analytic_form(&self) -> Result<AnalyticForm> {
        AnalyticForm::from_power(self.analytic_power).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn tau(&self) -> Result<u32> {
        Ok(self.tau_override.unwrap_or(growth_time(self.spin_checked()?)))
    }
}

/// `1e7`, `10000000` and `1_000_000` are all accepted.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let clean = s.replace('_', "");
    if let Ok(v) = clean.parse::<u64>() {
        return Ok(v);
    }
    match clean.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer count, got {s:?}")),
    }
}

/// `"-0.8,0.8"`
pub fn parse_thresholds(s: &str) -> std::result::Result<ThresholdPair, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected REGULAR,CHAOTIC, got {s:?}"));
    }
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("not a number: {p:?}"));
    Ok(ThresholdPair {
        regular: num(parts[0])?,
        chaotic: num(parts[1])?,
    })
}
