use serde::{Deserialize, Serialize};

use super::{radial_points, RadialSampling, Result, VerifyError};
use crate::diffusion::{generator_sq_norm, DiffusionSpec};
use crate::linalg::log_grid;
use crate::provenance::Provenance;

/// Condition 2: A‖x‖² ≤ −α‖x‖² + β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipativityConstants {
    pub alpha: f64,
    pub beta: f64,
    pub provenance: Provenance,
}

impl DissipativityConstants {
    pub fn analytic(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, provenance: Provenance::Analytic }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub alpha: f64,
    pub beta: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipativityFit {
    pub constants: DissipativityConstants,
    /// min of −A‖x‖²/‖x‖² over the outermost radius decade.
    pub asymptotic_slope: f64,
    pub frontier: Vec<FrontierPoint>,
    pub samples: usize,
}

const GRID: usize = 64;

/// Largest α on a log grid in (0, k̂] whose β(α) = max[A‖x‖² + α‖x‖²] is attained
/// inside radius r_max/10 (finite-sample stable).
pub fn fit_dissipativity(spec: &DiffusionSpec, cfg: &RadialSampling) -> Result<DissipativityFit> {
    cfg.validate()?;
    let pts = radial_points(spec.dim(), cfg);
    let mut samples = Vec::with_capacity(pts.len());
    for x in &pts {
        samples.push((x.norm_squared(), generator_sq_norm(spec, x)?));
    }
    let slope_min = |lo: f64, hi: f64| {
        samples
            .iter()
            .filter(|(r2, _)| *r2 >= lo * lo && *r2 <= hi * hi)
            .map(|(r2, g)| -g / r2)
            .fold(f64::INFINITY, f64::min)
    };
    let outer = slope_min(cfg.r_max / 10.0, cfg.r_max);
    let previous = slope_min(cfg.r_max / 100.0, cfg.r_max / 10.0);
    // A slope that keeps shrinking towards zero is not a dissipative asymptote.
    if !(outer > 0.0) || outer < 0.5 * previous {
        return Err(VerifyError::NotDissipative { slope: outer });
    }
    let inner_r2 = (cfg.r_max / 10.0).powi(2);
    let frontier: Vec<FrontierPoint> = log_grid(1e-3 * outer, outer, GRID)
        .into_iter()
        .map(|alpha| {
            let (mut all, mut inner) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for (r2, g) in &samples {
                let v = g + alpha * r2;
                all = all.max(v);
                if *r2 <= inner_r2 {
                    inner = inner.max(v);
                }
            }
            let stable = all <= inner + 1e-6 * inner.abs() + 1e-9;
            FrontierPoint { alpha, beta: all, stable }
        })
        .collect();
    let chosen = frontier
        .iter()
        .rev()
        .find(|p| p.stable && p.beta > 0.0)
        .ok_or(VerifyError::NotDissipative { slope: outer })?;
    Ok(DissipativityFit {
        constants: DissipativityConstants { alpha: chosen.alpha, beta: chosen.beta, provenance: Provenance::Fitted },
        asymptotic_slope: outer,
        frontier,
        samples: samples.len(),
    })
}
