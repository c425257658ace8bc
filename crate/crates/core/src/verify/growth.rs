use serde::{Deserialize, Serialize};

use super::{finite, Result, VerifyError};
use crate::diffusion::DiffusionSpec;
use crate::linalg::{frobenius, log_grid, op_norm, unit_vector, Vector};
use crate::provenance::Provenance;
use crate::rng::stream_rng;

/// Origin plus `radii` log-spaced radii on [r_min, r_max], `directions` random unit vectors each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadialSampling {
    pub r_min: f64,
    pub r_max: f64,
    pub radii: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for RadialSampling {
    fn default() -> Self {
        Self { r_min: 1e-3, r_max: 1e3, radii: 200, directions: 8, seed: 0 }
    }
}

impl RadialSampling {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > 100.0 * self.r_min) {
            return Err(VerifyError::InvalidParameter("need 0 < r_min and r_max > 100·r_min".into()));
        }
        if self.radii < 20 || self.directions == 0 {
            return Err(VerifyError::InvalidParameter("need ≥ 20 radii and ≥ 1 direction".into()));
        }
        Ok(())
    }
}

/// Sample points of the plan; the origin comes first.
pub fn radial_points(dim: usize, cfg: &RadialSampling) -> Vec<Vector> {
    let mut pts = vec![Vector::zeros(dim)];
    for (i, r) in log_grid(cfg.r_min, cfg.r_max, cfg.radii).into_iter().enumerate() {
        for j in 0..cfg.directions {
            let mut rng = stream_rng(cfg.seed, (i * cfg.directions + j) as u64);
            pts.push(unit_vector(&mut rng, dim) * r);
        }
    }
    pts
}

/// Condition 1: ‖b‖ ≤ λ_b/4 (1+‖x‖), ‖σ‖_F ≤ λ_σ/4 (1+‖x‖), ‖σσᵀ‖_op ≤ λ_a/4 (1+‖x‖^r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthConstants {
    pub lambda_b: f64,
    pub lambda_sigma: f64,
    pub lambda_a: f64,
    pub r: u8,
    pub provenance: Provenance,
}

impl GrowthConstants {
    pub fn analytic(lambda_b: f64, lambda_sigma: f64, lambda_a: f64, r: u8) -> Self {
        Self { lambda_b, lambda_sigma, lambda_a, r, provenance: Provenance::Analytic }
    }
}

/// Max of `ratio` over the whole plan, rejecting ratios that still grow in the last decade.
fn bounded_max(norms: &[f64], ratios: &[f64], r_max: f64) -> Option<f64> {
    let mut outer = 0.0_f64;
    let mut previous = 0.0_f64;
    for (n, v) in norms.iter().zip(ratios) {
        if *n >= r_max / 10.0 {
            outer = outer.max(*v);
        } else if *n >= r_max / 100.0 {
            previous = previous.max(*v);
        }
    }
    (outer <= 1.5 * previous + 1e-300).then(|| ratios.iter().copied().fold(0.0, f64::max))
}

/// Fits (λ_b, λ_σ, λ_a, r) with r minimal in {1, 2}.
pub fn fit_growth(spec: &DiffusionSpec, cfg: &RadialSampling) -> Result<GrowthConstants> {
    cfg.validate()?;
    let pts = radial_points(spec.dim(), cfg);
    let mut norms = Vec::with_capacity(pts.len());
    let (mut rb, mut rs, mut ra1, mut ra2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for x in &pts {
        let n = x.norm();
        let a = finite(op_norm(&spec.covariance(x)))?;
        norms.push(n);
        rb.push(finite(spec.drift(x).norm())? / (1.0 + n));
        rs.push(finite(frobenius(&spec.sigma(x)))? / (1.0 + n));
        ra1.push(a / (1.0 + n));
        ra2.push(a / (1.0 + n * n));
    }
    let lambda_b = 4.0 * bounded_max(&norms, &rb, cfg.r_max).ok_or(VerifyError::GrowthExceeded { coefficient: "drift" })?;
    let lambda_sigma =
        4.0 * bounded_max(&norms, &rs, cfg.r_max).ok_or(VerifyError::GrowthExceeded { coefficient: "sigma" })?;
    let (lambda_a, r) = match bounded_max(&norms, &ra1, cfg.r_max) {
        Some(v) => (4.0 * v, 1),
        None => (
            4.0 * bounded_max(&norms, &ra2, cfg.r_max).ok_or(VerifyError::GrowthExceeded { coefficient: "covariance" })?,
            2,
        ),
    };
    Ok(GrowthConstants { lambda_b, lambda_sigma, lambda_a, r, provenance: Provenance::Fitted })
}
