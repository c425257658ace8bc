use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::{positive, BoundsError, Result};
use crate::linalg::{Matrix, Vector};
use crate::rng::stream_rng;
use crate::sampler::mean_and_std_error;

/// [(d/(2γ))((1/θ)log(2γ/d) + log(eβμ₂(f)/(2α)))]^{1/θ}.
pub fn suboptimality_generalized_gibbs(gamma: f64, theta: f64, d: usize, alpha: f64, beta: f64, mu2f: f64) -> Result<f64> {
    positive(gamma, "gamma")?;
    positive(alpha, "alpha")?;
    positive(beta, "beta")?;
    positive(mu2f, "mu_2(f)")?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(BoundsError::InvalidParameter(format!("theta must lie in (0, 1], got {theta}")));
    }
    let df = d as f64;
    let inner = df / (2.0 * gamma)
        * ((2.0 * gamma / df).ln() / theta + (std::f64::consts::E * beta * mu2f / (2.0 * alpha)).ln());
    if inner < 0.0 {
        return Err(BoundsError::NegativeLogArgument { value: inner });
    }
    Ok(inner.powf(1.0 / theta))
}

/// (d/(2θ))log(2C/d) + (d/2)log(eβ/α).
pub fn suboptimality_entropy_form(c: f64, theta: f64, d: usize, alpha: f64, beta: f64) -> Result<f64> {
    positive(c, "C")?;
    positive(theta, "theta")?;
    positive(alpha, "alpha")?;
    positive(beta, "beta")?;
    let df = d as f64;
    Ok(df / (2.0 * theta) * (2.0 * c / df).ln() + 0.5 * df * (std::f64::consts::E * beta / alpha).ln())
}

/// ((k(1+d/2)−1)/γ)^k.
pub fn suboptimality_quadratic(gamma: f64, k: u32, d: usize) -> Result<f64> {
    positive(gamma, "gamma")?;
    if k == 0 {
        return Err(BoundsError::InvalidParameter("k must be a positive integer".into()));
    }
    let kf = k as f64;
    Ok(((kf * (1.0 + d as f64 / 2.0) - 1.0) / gamma).powi(k as i32))
}

/// Exact p_{γ,1/k}(f) − f* = Γ(dk/2+k)/(Γ(dk/2)γ^k) = Π_{i<k}(dk/2+i)/γ^k.
pub fn quadratic_gamma_ratio(gamma: f64, k: u32, d: usize) -> Result<f64> {
    positive(gamma, "gamma")?;
    let base = d as f64 * k as f64 / 2.0;
    Ok((0..k).map(|i| (base + i as f64) / gamma).product())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSampleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of p_{γ,α}(f) − f* for f = ⟨x−b, A(x−b)⟩ and density ∝ exp(−γ(f−f*)^α).
///
/// After y = A^{1/2}(x−b) the density is radial in y: u = γ‖y‖^{2α} ~ Gamma(d/(2α), 1),
/// and f − f* = ‖y‖² = (u/γ)^{1/α}.
pub fn quadratic_gibbs_sampler(
    gamma: f64,
    alpha_exp: f64,
    a: &Matrix,
    b: &Vector,
    seed: u64,
    nsamples: usize,
) -> Result<QuadraticSampleEstimate> {
    positive(gamma, "gamma")?;
    positive(alpha_exp, "alpha exponent")?;
    let d = b.len();
    if d == 0 || a.nrows() != d || a.ncols() != d {
        return Err(BoundsError::InvalidParameter(format!("A must be {d}x{d} to match b")));
    }
    if a.clone().cholesky().is_none() {
        return Err(BoundsError::InvalidParameter("A must be symmetric positive definite".into()));
    }
    if nsamples < 2 {
        return Err(BoundsError::InvalidParameter("need at least two samples".into()));
    }
    let dist = Gamma::new(d as f64 / (2.0 * alpha_exp), 1.0)
        .map_err(|e| BoundsError::InvalidParameter(format!("gamma distribution: {e}")))?;
    let mut rng = stream_rng(seed, 0);
    let draws: Vec<f64> = (0..nsamples).map(|_| (dist.sample(&mut rng) / gamma).powf(1.0 / alpha_exp)).collect();
    let (mean, std_error) = mean_and_std_error(&draws);
    Ok(QuadraticSampleEstimate { mean, std_error, samples: nsamples })
}
