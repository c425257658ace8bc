use serde::{Deserialize, Serialize};

use super::{nonnegative, positive, BoundsError, Result};
use crate::linalg::double_factorial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CConstants {
    pub c_1: f64,
    pub c_2: f64,
    pub c_3: f64,
}

fn check_orders(n: u32, n_e: u32) -> Result<()> {
    if n == 0 {
        return Err(BoundsError::BadN(n));
    }
    if n_e % 2 != 0 || n_e < n + 4 {
        return Err(BoundsError::BadMomentOrder { n_e, min: n + 4 });
    }
    Ok(())
}

/// c₁ = 6ζ₁,
/// c₂ = (1/16)[2ζ₂λ_b² + ζ₃λ_bλ_σ² + ζ₄(1+3^{n−1})λ_σ⁴],
/// c₃ = (1/48)[ζ₃λ_b³ + ζ₄λ_b⁴(1+3^{n−1}) + 4ζ₄(1.5ⁿ/n⁴)(λ_b⁴+n_e²λ_σ⁴)(λ_bⁿ + n!!λ_σⁿ)].
pub fn c_constants(zeta: &[f64; 4], lambda_b: f64, lambda_sigma: f64, n: u32, n_e: u32) -> Result<CConstants> {
    check_orders(n, n_e)?;
    for z in zeta {
        nonnegative(*z, "zeta")?;
    }
    nonnegative(lambda_b, "lambda_b")?;
    nonnegative(lambda_sigma, "lambda_sigma")?;
    let [z1, z2, z3, z4] = *zeta;
    let (lb, ls) = (lambda_b, lambda_sigma);
    let nf = n as f64;
    let three = 1.0 + 3f64.powi(n as i32 - 1);
    let c_1 = 6.0 * z1;
    let c_2 = (2.0 * z2 * lb * lb + z3 * lb * ls * ls + z4 * three * ls.powi(4)) / 16.0;
    let tail = 4.0 * z4 * 1.5f64.powi(n as i32) / nf.powi(4)
        * (lb.powi(4) + (n_e as f64).powi(2) * ls.powi(4))
        * (lb.powi(n as i32) + double_factorial(n as i64) * ls.powi(n as i32));
    let c_3 = (z3 * lb.powi(3) + z4 * lb.powi(4) * three + tail) / 48.0;
    Ok(CConstants { c_1, c_2, c_3 })
}

/// 1 + (1 ∧ n/2).
pub fn eta_exponent(n: u32) -> f64 {
    1.0 + (n as f64 / 2.0).min(1.0)
}

/// (c₁/(ηM) + c₂η + c₃η^{1+(1∧n/2)})(κ_r(n_e) + ‖x₀‖^{n_e}), without the step-size check.
pub fn integration_error_bound(c: &CConstants, eta: f64, m: u64, n: u32, kappa_ne: f64, x0_moment: f64) -> Result<f64> {
    positive(eta, "eta")?;
    if m == 0 {
        return Err(BoundsError::InvalidParameter("M must be at least 1".into()));
    }
    let lead = c.c_1 / (eta * m as f64) + c.c_2 * eta + c.c_3 * eta.powf(eta_exponent(n));
    Ok(lead * (kappa_ne + x0_moment))
}

/// As [`integration_error_bound`], rejecting η ≥ threshold.
pub fn checked_integration_error_bound(
    c: &CConstants,
    eta: f64,
    m: u64,
    n: u32,
    kappa_ne: f64,
    x0_moment: f64,
    threshold: f64,
) -> Result<f64> {
    if !(eta < threshold) {
        return Err(BoundsError::StepTooLarge { eta, threshold });
    }
    integration_error_bound(c, eta, m, n, kappa_ne, x0_moment)
}
