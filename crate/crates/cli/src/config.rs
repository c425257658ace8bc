use std::path::{Path, PathBuf};

use diffopt_core::bounds::{AssemblyMode, RunSchedule};
use diffopt_core::verify::{CouplingConfig, DistantConfig, RadialSampling};
use diffopt_core::{ChainConfig, SampleConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZooSelection {
    pub name: String,
    #[serde(default)]
    pub params: Value,
}

/// Which diffusion drives the chain: the entry's designed one or the Gibbs Langevin baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffusionChoice {
    #[default]
    Designed,
    Langevin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifierName {
    Growth,
    Dissipativity,
    Uniform,
    Distant,
    Smoothness,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyPlan {
    pub verifiers: Vec<VerifierName>,
    pub radial: RadialSampling,
    pub pairs: SampleConfig,
    /// Order p of the uniform-dissipativity rate.
    pub uniform_p: u8,
    pub distant: DistantConfig,
    /// s of the distant-dissipativity inequality (required when `distant` is listed).
    pub distant_s: Option<f64>,
    /// Pseudo-Lipschitz order of the smoothness estimate.
    pub smoothness_n: u32,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        Self {
            verifiers: vec![VerifierName::Growth, VerifierName::Dissipativity, VerifierName::Uniform],
            radial: RadialSampling::default(),
            pairs: SampleConfig::default(),
            uniform_p: 2,
            distant: DistantConfig::default(),
            distant_s: None,
            smoothness_n: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    #[default]
    Analytic,
    Fitted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsPlan {
    pub n: u32,
    pub n_e: u32,
    pub theta: f64,
    pub mode: AssemblyMode,
    pub source: ConstantSource,
    /// Defaults to (chain.eta, chain.steps, ‖chain.x0‖).
    pub schedule: Option<RunSchedule>,
}

impl Default for BoundsPlan {
    fn default() -> Self {
        Self { n: 1, n_e: 6, theta: 1.0, mode: AssemblyMode::Strict, source: ConstantSource::Analytic, schedule: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingPlan {
    #[serde(default)]
    pub config: CouplingConfig,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn one() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub zoo: ZooSelection,
    #[serde(default)]
    pub diffusion: DiffusionChoice,
    pub chain: Option<ChainConfig>,
    #[serde(default = "one")]
    pub replicas: usize,
    /// f-level for first-passage reporting.
    pub passage_threshold: Option<f64>,
    #[serde(default)]
    pub fail_on_divergence: bool,
    #[serde(default)]
    pub verify: VerifyPlan,
    #[serde(default)]
    pub bounds: BoundsPlan,
    pub coupling: Option<CouplingPlan>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(CliError::Config("replicas must be at least 1".into()));
        }
        let (n, n_e) = (self.bounds.n, self.bounds.n_e);
        if n_e % 2 != 0 || n_e < n + 4 {
            return Err(CliError::Config(format!("bounds.n_e = {n_e} must be even and ≥ n + 4 = {}", n + 4)));
        }
        if !(self.bounds.theta > 0.0 && self.bounds.theta <= 1.0) {
            return Err(CliError::Config(format!("bounds.theta = {} must lie in (0, 1]", self.bounds.theta)));
        }
        if let Some(t) = self.passage_threshold {
            if !t.is_finite() {
                return Err(CliError::Config("passage_threshold must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn chain(&self) -> Result<&ChainConfig> {
        self.chain.as_ref().ok_or_else(|| CliError::Config("`chain` section is required for this command".into()))
    }

    pub fn schedule(&self) -> Result<RunSchedule> {
        if let Some(s) = self.bounds.schedule {
            return Ok(s);
        }
        let c = self.chain.as_ref().ok_or_else(|| {
            CliError::Config("bounds need `bounds.schedule` or a `chain` section to take η, M and x₀ from".into())
        })?;
        let x0_norm = c.x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(RunSchedule { eta: c.eta, m: c.steps as u64, x0_norm })
    }
}
