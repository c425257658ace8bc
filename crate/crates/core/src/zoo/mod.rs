//! Built-in objectives with matching diffusions and closed-form constants.

mod data;
mod ou;
mod quadratic;
pub mod radial;
mod regularized;
mod sublinear;

pub use data::{Dataset, Outcome, SyntheticConfig};
pub use ou::{ou_baseline, ou_euler_bias, ou_euler_stationary_variance};
pub use quadratic::quadratic_example;
pub use regularized::{
    regularized_coefficients, regularized_loss_example, DeltaConstants, LossKind, Regularizer,
};
pub use sublinear::{sublinear_coefficients, sublinear_example};

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bounds::CoefficientConstants;
use crate::diffusion::{langevin, DiffusionError, DiffusionSpec, TargetMeasure};
use crate::objective::{ObjectiveError, ObjectiveSpec, SmoothnessEstimate};
use crate::verify::{DissipativityConstants, GrowthConstants, RateModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("parameter `{name}` = {value} out of range: {reason}")]
    ParamOutOfRange { name: &'static str, value: f64, reason: String },
    #[error("unknown zoo entry `{0}`")]
    UnknownEntry(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dataset: {0}")]
    Data(String),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

pub type Result<T> = std::result::Result<T, ZooError>;

/// Closed-form constants of an entry (any subset may be known).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticConstants {
    pub growth: Option<GrowthConstants>,
    pub dissipativity: Option<DissipativityConstants>,
    pub rate: Option<RateModel>,
    pub smoothness: Option<SmoothnessEstimate>,
    pub coefficients: Option<CoefficientConstants>,
    /// μ₂(f) for the suboptimality term.
    pub mu2_f: Option<f64>,
}

/// Objective, diffusion and target built from a parameter map.
#[derive(Clone)]
pub struct ZooEntry {
    pub name: String,
    pub params: Value,
    pub objective: ObjectiveSpec,
    pub diffusion: DiffusionSpec,
    pub target: TargetMeasure,
    pub gamma: f64,
    pub analytic: AnalyticConstants,
    pub notes: String,
}

impl fmt::Debug for ZooEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZooEntry")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("diffusion", &self.diffusion.label())
            .field("gamma", &self.gamma)
            .finish()
    }
}

impl ZooEntry {
    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Gibbs-measure Langevin diffusion for the same objective and γ (the usual baseline).
    pub fn langevin(&self) -> Result<DiffusionSpec> {
        Ok(langevin(&self.objective, self.gamma)?)
    }
}

/// Registry row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogItem {
    pub name: &'static str,
    pub description: &'static str,
    pub default_params: Value,
}

fn params<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    let v = if v.is_null() { Value::Object(Default::default()) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| ZooError::InvalidParams(e.to_string()))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OuParams {
    d: usize,
    gamma: f64,
}

impl Default for OuParams {
    fn default() -> Self {
        Self { d: 2, gamma: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SublinearParams {
    c: f64,
    d: usize,
    gamma: f64,
}

impl Default for SublinearParams {
    fn default() -> Self {
        Self { c: 10.0, d: 2, gamma: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DataSource {
    Synthetic(SyntheticConfig),
    Csv(String),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum LossName {
    Sigmoid,
    SigmoidMargin,
    StudentT,
    BlakeZisserman,
}

impl LossName {
    fn kind(self, epsilon: f64) -> LossKind {
        match self {
            LossName::Sigmoid => LossKind::Sigmoid,
            LossName::SigmoidMargin => LossKind::SigmoidMargin,
            LossName::StudentT => LossKind::StudentT,
            LossName::BlakeZisserman => LossKind::BlakeZisserman { epsilon },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RegularizedParams {
    loss: LossName,
    /// Blake–Zisserman ε.
    epsilon: f64,
    regularizer: Regularizer,
    gamma: f64,
    data: DataSource,
}

impl Default for RegularizedParams {
    fn default() -> Self {
        Self {
            loss: LossName::StudentT,
            epsilon: 0.01,
            regularizer: Regularizer::PseudoHuber { lambda: 1.0 },
            gamma: 1.0,
            data: DataSource::Synthetic(SyntheticConfig::default()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QuadraticParams {
    /// Row-major SPD matrix; identity of size `d` when absent.
    a: Option<Vec<Vec<f64>>>,
    b: Option<Vec<f64>>,
    d: usize,
    gamma: f64,
    theta: f64,
}

impl Default for QuadraticParams {
    fn default() -> Self {
        Self { a: None, b: None, d: 2, gamma: 1.0, theta: 1.0 }
    }
}

fn defaults(p: impl Serialize) -> Value {
    serde_json::to_value(p).expect("parameter structs serialize")
}

/// Names, descriptions and default parameters of every entry.
pub fn catalog() -> Vec<CatalogItem> {
    vec![
        CatalogItem {
            name: "ou_baseline",
            description: "f = ‖x‖²/2 with the Langevin (Ornstein–Uhlenbeck) diffusion",
            default_params: defaults(OuParams::default()),
        },
        CatalogItem {
            name: "sublinear",
            description: "f = c·log(1+‖x‖²/2) with σ = √(1+‖x‖²/2)·I",
            default_params: defaults(SublinearParams::default()),
        },
        CatalogItem {
            name: "regularized_loss",
            description: "robust loss + ridge/pseudo-Huber regularizer with the radial a(x) design",
            default_params: defaults(RegularizedParams::default()),
        },
        CatalogItem {
            name: "quadratic",
            description: "f = ⟨x−b, A(x−b)⟩ with a generalized-Gibbs target",
            default_params: defaults(QuadraticParams::default()),
        },
    ]
}

/// Builds an entry by name from a JSON parameter map (missing keys take defaults).
pub fn build(name: &str, p: &Value) -> Result<ZooEntry> {
    let mut entry = match name {
        "ou_baseline" | "ou" => {
            let q: OuParams = params(p)?;
            ou_baseline(q.d, q.gamma)?
        }
        "sublinear" => {
            let q: SublinearParams = params(p)?;
            sublinear_example(q.c, q.d, q.gamma)?
        }
        "regularized_loss" => {
            let q: RegularizedParams = params(p)?;
            let data = match &q.data {
                DataSource::Synthetic(cfg) => Dataset::synthetic(cfg)?,
                DataSource::Csv(path) => Dataset::from_csv(path)?,
            };
            regularized_loss_example(q.loss.kind(q.epsilon), &data, q.regularizer, q.gamma)?
        }
        "quadratic" => {
            let q: QuadraticParams = params(p)?;
            let a = match q.a {
                Some(rows) => {
                    let n = rows.len();
                    if n == 0 || rows.iter().any(|r| r.len() != n) {
                        return Err(ZooError::InvalidParams("`a` must be a nonempty square matrix".into()));
                    }
                    crate::linalg::Matrix::from_fn(n, n, |i, j| rows[i][j])
                }
                None => crate::linalg::Matrix::identity(q.d, q.d),
            };
            let b = crate::linalg::Vector::from_vec(q.b.unwrap_or_else(|| vec![0.0; a.nrows()]));
            quadratic_example(&a, &b, q.gamma, q.theta)?
        }
        other => return Err(ZooError::UnknownEntry(other.to_string())),
    };
    entry.params = p.clone();
    Ok(entry)
}

fn check(name: &'static str, value: f64, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ZooError::ParamOutOfRange { name, value, reason: reason.to_string() })
    }
}
