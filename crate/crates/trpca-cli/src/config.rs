//! TOML defaults for any flag not given on the command line. Flags always
//! win; a missing file section just means built-in defaults.

use anyhow::{Context, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub phase: PhaseSection,
    #[serde(default)]
    pub learn: LearnSection,
    #[serde(default)]
    pub denoise: DenoiseSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub dims: Option<String>,
    pub rank: Option<usize>,
    pub kappa: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(rename = "in")]
    pub input: Option<String>,
    pub rank: Option<usize>,
    pub eta: Option<f64>,
    pub tau: Option<f64>,
    pub zeta0: Option<f64>,
    pub zeta1: Option<f64>,
    pub iters: Option<usize>,
    pub truth: Option<String>,
    pub algo: Option<String>,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
    pub out: Option<String>,
    pub report: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    pub dims: Option<String>,
    pub r_grid: Option<String>,
    pub alpha_grid: Option<String>,
    pub kappa: Option<f64>,
    pub trials: Option<usize>,
    pub success_rse: Option<f64>,
    pub iters: Option<usize>,
    pub eta: Option<f64>,
    pub tau: Option<f64>,
    pub seed: Option<u64>,
    pub algo: Option<String>,
    pub out: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnSection {
    pub train: Option<Vec<String>>,
    pub rank: Option<usize>,
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub k_unroll: Option<usize>,
    pub out: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenoiseSection {
    pub frames: Option<String>,
    pub rank: Option<usize>,
    pub iters: Option<usize>,
    pub tau: Option<f64>,
    pub eta: Option<f64>,
    pub zeta0: Option<f64>,
    pub zeta1: Option<f64>,
    pub clean: Option<String>,
    pub out: Option<String>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
