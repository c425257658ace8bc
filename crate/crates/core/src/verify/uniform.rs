use rayon::prelude::*;

use super::{finite, RateModel, Result, VerifyError};
use crate::diffusion::DiffusionSpec;
use crate::linalg::{op_norm, Vector};
use crate::objective::{sample_pair, SampleConfig, DEGENERATE_PAIR};

/// [2⟨b(x)−b(y), x−y⟩ + ‖σ(x)−σ(y)‖_F² + (p−2)‖σ(x)−σ(y)‖_op²] / ‖x−y‖².
pub fn uniform_lhs(spec: &DiffusionSpec, x: &Vector, y: &Vector, p: u8) -> f64 {
    let dx = x - y;
    let ds = spec.sigma(x) - spec.sigma(y);
    let op = if p == 2 { 0.0 } else { op_norm(&ds).powi(2) };
    (2.0 * (spec.drift(x) - spec.drift(y)).dot(&dx) + ds.norm_squared() + (p as f64 - 2.0) * op) / dx.norm_squared()
}

/// Constant-σ form 2⟨b(x)−b(y), x−y⟩/‖x−y‖².
pub fn uniform_lhs_constant_sigma(spec: &DiffusionSpec, x: &Vector, y: &Vector) -> f64 {
    let dx = x - y;
    2.0 * (spec.drift(x) - spec.drift(y)).dot(&dx) / dx.norm_squared()
}

/// Uniform-dissipativity rate k = −max over pairs of the normalised LHS, as ϱ_p(t) = e^{−kt/2}.
pub fn uniform_dissipativity_rate(spec: &DiffusionSpec, p: u8, cfg: &SampleConfig) -> Result<RateModel> {
    if p != 1 && p != 2 {
        return Err(VerifyError::InvalidParameter(format!("p must be 1 or 2, got {p}")));
    }
    cfg.validate()?;
    let max_lhs = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let (x, y) = sample_pair(cfg, spec.dim(), i);
            if (&x - &y).norm() < DEGENERATE_PAIR {
                return Ok(f64::NEG_INFINITY);
            }
            finite(uniform_lhs(spec, &x, &y, p))
        })
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))?;
    if max_lhs >= 0.0 {
        return Err(VerifyError::NotUniform { max_lhs });
    }
    Ok(RateModel::uniform(p, -max_lhs, format!("uniform dissipativity (p={p}, {} pairs)", cfg.samples)))
}
