//! Flat keyed run configuration. Defaults mirror the published N=20 setup,
//! so `mqcoh paper-run` without a config file reproduces it.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Chain length.
    #[serde(default = "defaults::n")]
    pub n: usize,
    /// Sender/receiver block size.
    #[serde(default = "defaults::m")]
    pub m: usize,
    /// Extended receiver size (restore).
    #[serde(default = "defaults::m_ext")]
    pub m_ext: usize,
    /// Coupling constant.
    #[serde(default = "defaults::d")]
    pub d: f64,
    /// Inverse temperature of transmission line and receiver.
    #[serde(default = "defaults::b")]
    pub b: f64,
    /// Fixed registration time (units of 1/d); when absent, commands that
    /// need one search [t_min, t_max] for the optimum.
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default = "defaults::t_min")]
    pub t_min: f64,
    #[serde(default = "defaults::t_max")]
    pub t_max: f64,
    #[serde(default = "defaults::grid_points")]
    pub grid_points: usize,
    /// Kept excitation cap; when absent, the smallest cap with thermal tail
    /// weight below `tail_tol` is used.
    #[serde(default)]
    pub l_max: Option<usize>,
    #[serde(default = "defaults::tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "defaults::optimizer_starts")]
    pub optimizer_starts: usize,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    /// Amplitude of the special sender family used by scan and paper-run.
    #[serde(default = "defaults::sender_a")]
    pub sender_a: f64,
    /// Second-order sender element [re, im] used by scan.
    #[serde(default = "defaults::sender_c14")]
    pub sender_c14: [f64; 2],
}

mod defaults {
    pub fn n() -> usize {
        20
    }
    pub fn m() -> usize {
        2
    }
    pub fn m_ext() -> usize {
        2
    }
    pub fn d() -> f64 {
        1.0
    }
    pub fn b() -> f64 {
        10.0
    }
    pub fn t_min() -> f64 {
        0.0
    }
    pub fn t_max() -> f64 {
        50.0
    }
    pub fn grid_points() -> usize {
        2000
    }
    pub fn tail_tol() -> f64 {
        1e-8
    }
    pub fn optimizer_starts() -> usize {
        64
    }
    pub fn seed() -> u64 {
        7
    }
    pub fn sender_a() -> f64 {
        0.1
    }
    pub fn sender_c14() -> [f64; 2] {
        [0.05, 0.0]
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config uses defaults")
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>, seed_override: Option<u64>) -> Result<Self> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("config {}: {e}", p.display())))?
            }
            None => Self::default(),
        };
        if let Some(seed) = seed_override {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || 2 * self.m > self.n {
            return Err(CliError::Validation(format!(
                "need 2*m <= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if self.m_ext < self.m || self.m_ext > self.n {
            return Err(CliError::Validation(format!(
                "m_ext = {} outside {}..={}",
                self.m_ext, self.m, self.n
            )));
        }
        if self.d == 0.0 || !self.d.is_finite() {
            return Err(CliError::Validation(
                "coupling d must be finite and nonzero".into(),
            ));
        }
        if !self.b.is_finite() {
            return Err(CliError::Validation(
                "inverse temperature b must be finite".into(),
            ));
        }
        if self.t_max.partial_cmp(&self.t_min) != Some(std::cmp::Ordering::Greater) {
            return Err(CliError::Validation(format!(
                "empty time range [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.grid_points < 2 {
            return Err(CliError::Validation(
                "grid_points must be at least 2".into(),
            ));
        }
        if self.tail_tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(CliError::Validation("tail_tol must be positive".into()));
        }
        Ok(())
    }
}
