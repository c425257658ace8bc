use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Result, ZooError};
use crate::linalg::standard_normal_vector;
use crate::rng::stream_rng;

/// Outcome model of the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// y = ⟨v, w*⟩ + noise.
    #[default]
    Regression,
    /// y = sign(⟨v, w*⟩ + noise) ∈ {−1, 1}.
    Classification,
}

/// Covariates v_l and outcomes y_l.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub covariates: Vec<Vec<f64>>,
    pub outcomes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub points: usize,
    pub dim: usize,
    pub noise: f64,
    pub outcome: Outcome,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self { points: 50, dim: 2, noise: 0.1, outcome: Outcome::Regression, seed: 0 }
    }
}

impl Dataset {
    pub fn new(covariates: Vec<Vec<f64>>, outcomes: Vec<f64>) -> Result<Self> {
        if covariates.is_empty() {
            return Err(ZooError::Data("dataset is empty".into()));
        }
        if covariates.len() != outcomes.len() {
            return Err(ZooError::Data(format!(
                "{} covariate rows but {} outcomes",
                covariates.len(),
                outcomes.len()
            )));
        }
        let d = covariates[0].len();
        if d == 0 || covariates.iter().any(|v| v.len() != d) {
            return Err(ZooError::Data("covariate rows must share a positive length".into()));
        }
        if covariates.iter().flatten().chain(&outcomes).any(|v| !v.is_finite()) {
            return Err(ZooError::Data("dataset contains non-finite values".into()));
        }
        Ok(Self { covariates, outcomes })
    }

    pub fn dim(&self) -> usize {
        self.covariates[0].len()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Gaussian covariates with a Gaussian ground-truth weight vector.
    pub fn synthetic(cfg: &SyntheticConfig) -> Result<Self> {
        if cfg.points == 0 || cfg.dim == 0 || !(cfg.noise >= 0.0) {
            return Err(ZooError::Data("synthetic data needs points ≥ 1, dim ≥ 1, noise ≥ 0".into()));
        }
        let mut rng = stream_rng(cfg.seed, 0);
        let w = standard_normal_vector(&mut rng, cfg.dim);
        let mut covariates = Vec::with_capacity(cfg.points);
        let mut outcomes = Vec::with_capacity(cfg.points);
        for _ in 0..cfg.points {
            let v = standard_normal_vector(&mut rng, cfg.dim);
            let eps: f64 = rng.sample(rand_distr::StandardNormal);
            let y = v.dot(&w) + cfg.noise * eps;
            outcomes.push(match cfg.outcome {
                Outcome::Regression => y,
                Outcome::Classification => {
                    if y >= 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            });
            covariates.push(v.iter().copied().collect());
        }
        Self::new(covariates, outcomes)
    }

    /// Headerless CSV rows `v_1, …, v_d, y`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| ZooError::Data(format!("{}: {e}", path.display())))?;
        let (mut covariates, mut outcomes) = (Vec::new(), Vec::new());
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| ZooError::Data(format!("{}: {e}", path.display())))?;
            let row: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| ZooError::Data(format!("{} row {}: {e}", path.display(), i + 1)))?;
            if row.len() < 2 {
                return Err(ZooError::Data(format!("{} row {}: need at least two columns", path.display(), i + 1)));
            }
            outcomes.push(row[row.len() - 1]);
            covariates.push(row[..row.len() - 1].to_vec());
        }
        Self::new(covariates, outcomes)
    }
}
