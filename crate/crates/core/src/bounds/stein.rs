use serde::{Deserialize, Serialize};

use super::{beta_rn, finite, integrate_half_line, semigroup_constants, BoundsError, CoefficientConstants, Result};
use super::{nonnegative, positive, SemigroupConstantTable};
use crate::objective::SmoothnessEstimate;
use crate::verify::{DissipativityConstants, GrowthConstants, RateModel, VerifyError};

const QUAD_REL_TOL: f64 = 1e-13;

/// α̃ inside ω_r: α̃₁ = α, α̃₂ = inf_t [α − nλ_a(1 ∨ ϱ̃₂(t))]₊.
///
/// For exponential rates ϱ̃₂(t) = 2log A₂/(k₁t) + (k₁−k₂)/k₁, whose supremum is +∞ when
/// A₂ > 1 and (k₁−k₂)/k₁ otherwise.
pub fn alpha_tilde_omega(r: u8, alpha: f64, lambda_a: f64, n: u32, rate: &RateModel) -> Result<f64> {
    positive(alpha, "alpha")?;
    nonnegative(lambda_a, "lambda_a")?;
    match r {
        1 => Ok(alpha),
        2 => {
            let rho2 = rate.rho2.ok_or(VerifyError::MissingL2Rate)?;
            let sup_rel = if rho2.amplitude > 1.0 { f64::INFINITY } else { (rate.rho1.k - rho2.k) / rate.rho1.k };
            let reduction = n as f64 * lambda_a * sup_rel.max(1.0);
            let at = alpha - reduction;
            if at > 0.0 {
                Ok(at)
            } else {
                Err(BoundsError::DegenerateAlphaTilde { alpha, reduction })
            }
        }
        _ => Err(BoundsError::InvalidParameter(format!("r must be 1 or 2, got {r}"))),
    }
}

/// ω_r(t) = 1 + 4ϱ₁(t)^{1/r−1}ϱ₁(0)^{1/2}(1 + (2/α̃ⁿ){[1∨ϱ̃_r(t)]2λ_a n + 3rβ}ⁿ).
pub fn omega_r(t: f64, rate: &RateModel, lambda_a: f64, beta: f64, n: u32, r: u8, alpha_tilde: f64) -> Result<f64> {
    positive(alpha_tilde, "alpha_tilde")?;
    let rel = rate.relative(r, t)?.max(1.0);
    let rf = r as f64;
    let brace = rel * 2.0 * lambda_a * n as f64 + 3.0 * rf * beta;
    let inner = 1.0 + 2.0 / alpha_tilde.powi(n as i32) * brace.powi(n as i32);
    let v = 1.0 + 4.0 * rate.rho1(t).powf(1.0 / rf - 1.0) * rate.rho1(0.0).sqrt() * inner;
    finite(v, "omega_r")
}

/// ∫₀^∞ ϱ₁(t)ω_r(t+s)dt.
pub fn omega_integral(shift: f64, rate: &RateModel, lambda_a: f64, beta: f64, n: u32, r: u8, alpha_tilde: f64) -> Result<f64> {
    positive(rate.k(), "rate k")?;
    // Validate once so the integrand cannot fail silently.
    omega_r(shift, rate, lambda_a, beta, n, r, alpha_tilde)?;
    let integrand =
        |t: f64| rate.rho1(t) * omega_r(t + shift, rate, lambda_a, beta, n, r, alpha_tilde).unwrap_or(f64::NAN);
    let scale = 2.0 * r as f64 / rate.k();
    Ok(integrate_half_line(integrand, scale, QUAD_REL_TOL, 0.0)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaIntegrals {
    /// ∫ϱ₁(t)ω_r(t)dt (ζ₁, ζ₂).
    pub shift_0: f64,
    /// ∫ϱ₁(t)ω_r(t+1)dt (ζ₃).
    pub shift_1: f64,
    /// ∫ϱ₁(t)ω_r(t+2)dt (ζ₄).
    pub shift_2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinFactorSet {
    pub zeta_1: f64,
    pub zeta_2: f64,
    pub zeta_3: f64,
    pub zeta_4: f64,
    pub xi_2: f64,
    pub xi_3: f64,
    pub xi_4: f64,
    pub n: u32,
    pub r: u8,
    pub alpha_tilde: f64,
    pub beta_r6n: f64,
    pub omega_0: f64,
    pub omega_1: f64,
    pub omega_integrals: OmegaIntegrals,
    pub table: SemigroupConstantTable,
}

impl SteinFactorSet {
    pub fn zeta(&self) -> [f64; 4] {
        [self.zeta_1, self.zeta_2, self.zeta_3, self.zeta_4]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SteinInputs<'a> {
    pub rate: &'a RateModel,
    pub growth: &'a GrowthConstants,
    pub dissipativity: &'a DissipativityConstants,
    pub smoothness: &'a SmoothnessEstimate,
    pub coefficients: &'a CoefficientConstants,
    pub n: u32,
}

/// ζ₁ from the pseudo-Lipschitz semigroup bound; ζ₂–ζ₄ from the explicit short-time +
/// long-time decompositions of the Poisson solution's derivatives.
pub fn stein_factors(inp: &SteinInputs) -> Result<SteinFactorSet> {
    let (n, r) = (inp.n, inp.growth.r);
    let (alpha, beta, lambda_a) = (inp.dissipativity.alpha, inp.dissipativity.beta, inp.growth.lambda_a);
    positive(inp.rate.k(), "rate k")?;
    let mu_t = nonnegative(inp.smoothness.mu_tilde_1n, "mu_tilde_1n")?;
    let c = inp.coefficients;
    let table = semigroup_constants(c, n)?;
    let at = alpha_tilde_omega(r, alpha, lambda_a, n, inp.rate)?;

    let w = |t: f64| omega_r(t, inp.rate, lambda_a, beta, n, r, at);
    let integral = |s: f64| omega_integral(s, inp.rate, lambda_a, beta, n, r, at);
    let (w0, w1) = (w(0.0)?, w(1.0)?);
    let ints = OmegaIntegrals { shift_0: integral(0.0)?, shift_1: integral(1.0)?, shift_2: integral(2.0)? };
    let r0 = inp.rate.rho1(0.0);

    let beta_r6n = beta_rn(alpha, beta, lambda_a, r, 6 * n)?;
    let b6 = 1.0 + (beta_r6n / alpha).powf(1.0 / 6.0);

    let g = |i, m| table.gamma(i, m);
    let th = |i, m| table.theta(i, m);
    let (g22, g23, g24, g26) = (g(2, 2)?, g(2, 3)?, g(2, 4)?, g(2, 6)?);
    let (g32, g33, g42) = (g(3, 2)?, g(3, 3)?, g(4, 2)?);
    let (th22, th34, th42) = (th(2, 2)?, th(3, 4)?, th(4, 2)?);

    let missing = |what: &str| BoundsError::MissingCoefficient(what.to_string());
    let pi_f_13 = inp.smoothness.pi_range(1, 3).ok_or_else(|| missing("pi_tilde_{1:3,n}(f)"))?;
    let pi_f_14 = inp.smoothness.pi_range(1, 4).ok_or_else(|| missing("pi_tilde_{1:4,n}(f)"))?;

    let zeta_1 = mu_t * ints.shift_0;

    let xi_2 = 4.0 * mu_t * b6 * r0 * w1 * c.pi_sigma_inv[0] * (1.0 + g22.sqrt() + c.mu_sigma[0]) * (th22 / 2.0).exp();
    let zeta_2 = 2.0 * xi_2 * r0 * w0 + xi_2 * ints.shift_0;

    let xi_3 = 4.0
        * mu_t
        * c.pi_sigma[0]
        * c.pi_sigma_range(1, 2)
        * c.pi_sigma_inv[0]
        * c.pi_sigma_inv_range(0, 1)
        * r0
        * w1
        * (th34 / 2.0).exp()
        * (7.0 + 7.0 * g22.sqrt() + g23.cbrt() + g32.sqrt())
        * b6.powi(2);
    let zeta_3 = 4.0 * pi_f_13 * (1.0 + 3.0 * g23.cbrt() + g32.sqrt()) * (th34 / 2.0).exp() * b6 + xi_3 * ints.shift_1;

    let bracket_4 = 42.0
        + 32.0 * g22.sqrt()
        + 6.0 * g22
        + 2.0 * g23.cbrt()
        + 3.0 * g23.powf(2.0 / 3.0)
        + 24.0 * g24.powf(0.25)
        + 3.0 * g24.sqrt()
        + 12.0 * g26.powf(1.0 / 6.0)
        + 5.0 * g32.sqrt()
        + 5.0 * g33.cbrt()
        + g42.sqrt()
        + 6.0 * g22.sqrt() * g26.powf(1.0 / 6.0);
    let xi_4 = 4.0
        * mu_t
        * c.pi_sigma[0].powi(2)
        * c.pi_sigma_range(1, 3)
        * c.pi_sigma_inv[0].powi(2)
        * c.pi_sigma_inv_range(0, 2)
        * th42.exp()
        * r0
        * w1
        * b6.powi(3)
        * bracket_4;
    let short_4 = 1.0 + 6.0 * g24.powf(0.25) + 4.0 * g23 + 3.0 * g23.powf(2.0 / 3.0) + 4.0 * g33.cbrt() + g42.sqrt();
    let zeta_4 = 6.0 * pi_f_14 * short_4 * (1.5 * th42).exp() * b6 + xi_4 * ints.shift_2;

    Ok(SteinFactorSet {
        zeta_1: finite(zeta_1, "zeta_1")?,
        zeta_2: finite(zeta_2, "zeta_2")?,
        zeta_3: finite(zeta_3, "zeta_3")?,
        zeta_4: finite(zeta_4, "zeta_4")?,
        xi_2,
        xi_3,
        xi_4,
        n,
        r,
        alpha_tilde: at,
        beta_r6n,
        omega_0: w0,
        omega_1: w1,
        omega_integrals: ints,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provenance::Provenance;
    use crate::verify::ExponentialRate;

    #[test]
    fn omega_r1_constant_case() {
        // λ_a = β = 0, n = 1: ω₁ = 1 + 4√A.
        let a = 2.5;
        let rate = RateModel::with_l2(ExponentialRate::new(a, 1.0), ExponentialRate::new(a, 1.0), "t");
        for t in [0.0, 0.7, 3.0] {
            let w = omega_r(t, &rate, 0.0, 0.0, 1, 1, 1.0).unwrap();
            assert!((w - (1.0 + 4.0 * a.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_r2_with_equal_rates_uses_unit_relative_rate() {
        let rate = RateModel::uniform(2, 7.5, "t");
        let (la, b, n) = (4.0, 2.0, 1);
        let at = alpha_tilde_omega(2, 7.5, la, n, &rate).unwrap();
        assert_eq!(at, 3.5);
        let w = omega_r(1.0, &rate, la, b, n, 2, at).unwrap();
        let expected = 1.0 + 4.0 * (-7.5f64 / 2.0).exp().powf(-0.5) * (1.0 + 2.0 * (2.0 * la + 6.0 * b) / at);
        assert!((w - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn constant_omega_integral_matches_closed_form() {
        let rate = RateModel::with_l2(ExponentialRate::new(1.5, 0.8), ExponentialRate::new(1.5, 0.8), "t");
        let w = omega_r(0.0, &rate, 0.3, 0.2, 2, 1, 2.0).unwrap();
        let q = omega_integral(0.0, &rate, 0.3, 0.2, 2, 1, 2.0).unwrap();
        assert!((q - 1.5 * w * 2.0 / 0.8).abs() < 1e-8 * q);
    }

    fn ou_inputs() -> (RateModel, GrowthConstants, DissipativityConstants, SmoothnessEstimate, CoefficientConstants) {
        let rate = RateModel::uniform(2, 2.0, "ou");
        let growth = GrowthConstants::analytic(4.0, 8.0, 8.0, 1);
        let diss = DissipativityConstants::analytic(2.0, 4.0);
        let smooth = SmoothnessEstimate::analytic(1, 0.5, [1.0, 1.0, 0.0, 0.0], [f64::INFINITY, f64::INFINITY, 1.0]);
        let coeffs = CoefficientConstants {
            mu_b: [1.0, 0.0, 0.0, 0.0],
            mu_sigma: [0.0; 4],
            phi_sigma: [0.0; 4],
            pi_sigma: [0.0; 3],
            pi_sigma_inv: [0.5f64.sqrt() / 2.0, 0.0, 0.0],
            provenance: Provenance::Analytic,
        };
        (rate, growth, diss, smooth, coeffs)
    }

    #[test]
    fn ou_stein_factors_are_finite_and_zero_for_constant_f() {
        let (rate, growth, diss, smooth, coeffs) = ou_inputs();
        let inp = SteinInputs {
            rate: &rate,
            growth: &growth,
            dissipativity: &diss,
            smoothness: &smooth,
            coefficients: &coeffs,
            n: 1,
        };
        let s = stein_factors(&inp).unwrap();
        assert!(s.zeta().iter().all(|z| z.is_finite() && *z > 0.0), "{:?}", s.zeta());
        assert_eq!(s.xi_3, 0.0);
        let constant = SmoothnessEstimate::analytic(1, 0.0, [0.0; 4], [1.0, 0.0, 0.0]);
        let s0 = stein_factors(&SteinInputs { smoothness: &constant, ..inp }).unwrap();
        assert_eq!(s0.zeta(), [0.0; 4]);
    }

    #[test]
    fn missing_l2_rate_for_r2_is_reported() {
        let rate = RateModel::uniform(1, 1.0, "l1");
        assert!(matches!(alpha_tilde_omega(2, 3.0, 0.1, 1, &rate), Err(BoundsError::Verify(VerifyError::MissingL2Rate))));
    }
}
