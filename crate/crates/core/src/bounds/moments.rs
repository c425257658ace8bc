use super::{nonnegative, positive, BoundsError, Result};
use crate::linalg::double_factorial;

/// α̃₁ = α, α̃₂ = [α − nλ_a/4]₊ (zero is rejected as degenerate).
pub fn alpha_tilde(r: u8, alpha: f64, lambda_a: f64, n: u32) -> Result<f64> {
    positive(alpha, "alpha")?;
    nonnegative(lambda_a, "lambda_a")?;
    match r {
        1 => Ok(alpha),
        2 => {
            let reduction = n as f64 * lambda_a / 4.0;
            let at = (alpha - reduction).max(0.0);
            if at > 0.0 {
                Ok(at)
            } else {
                Err(BoundsError::DegenerateAlphaTilde { alpha, reduction })
            }
        }
        _ => Err(BoundsError::InvalidParameter(format!("r must be 1 or 2, got {r}"))),
    }
}

/// ((nλ_a + 6rβ)/(2rα̃))ⁿ and α̃ for the shared power term.
fn power_term(alpha: f64, beta: f64, lambda_a: f64, r: u8, n: u32) -> Result<(f64, f64)> {
    nonnegative(beta, "beta")?;
    let at = alpha_tilde(r, alpha, lambda_a, n)?;
    let rf = r as f64;
    let base = (n as f64 * lambda_a + 6.0 * rf * beta) / (2.0 * rf * at);
    Ok((at, base.powi(n as i32)))
}

/// β_{r,n} = β + nλ_a/8 + (α̃_r/2)((nλ_a+6rβ)/(2rα̃_r))ⁿ, so that A‖x‖ⁿ ≤ −α‖x‖ⁿ + β_{r,n}.
pub fn beta_rn(alpha: f64, beta: f64, lambda_a: f64, r: u8, n: u32) -> Result<f64> {
    let (at, pw) = power_term(alpha, beta, lambda_a, r, n)?;
    Ok(beta + n as f64 * lambda_a / 8.0 + 0.5 * at * pw)
}

/// κ_r(n) = 2 + 2β/α + nλ_a/(4α) + (α̃_r/α)((nλ_a+6rβ)/(2rα̃_r))ⁿ = 2 + 2β_{r,n}/α.
pub fn kappa_r(n: u32, alpha: f64, beta: f64, lambda_a: f64, r: u8) -> Result<f64> {
    let (at, pw) = power_term(alpha, beta, lambda_a, r, n)?;
    Ok(2.0 + 2.0 * beta / alpha + n as f64 * lambda_a / (4.0 * alpha) + at / alpha * pw)
}

/// η_max = 1 ∧ α/(2(n_e−1)!!(1+λ_b/2+λ_σ/2)^{n_e}).
pub fn step_threshold(alpha: f64, lambda_b: f64, lambda_sigma: f64, n_e: u32) -> f64 {
    let denom = 2.0 * double_factorial(n_e as i64 - 1) * (1.0 + 0.5 * lambda_b + 0.5 * lambda_sigma).powi(n_e as i32);
    (alpha / denom).min(1.0)
}

/// κ_r(n_e) + ‖x₀‖^{n_e}: the Markov-chain moment bound for a deterministic start.
pub fn moment_bound(kappa_ne: f64, x0_norm: f64, n_e: u32) -> f64 {
    kappa_ne + x0_norm.powi(n_e as i32)
}
