use super::{check, AnalyticConstants, Result, ZooEntry};
use crate::bounds::CoefficientConstants;
use crate::diffusion::{langevin, TargetMeasure};
use crate::linalg::{Matrix, Vector};
use crate::objective::{ObjectiveSpec, SmoothnessEstimate};
use crate::provenance::Provenance;
use crate::verify::{DissipativityConstants, GrowthConstants, RateModel};

/// Per-coordinate stationary variance of the Euler chain X⁺ = (1−η)X + √(2η/γ)W.
pub fn ou_euler_stationary_variance(eta: f64, gamma: f64) -> f64 {
    2.0 / ((2.0 - eta) * gamma)
}

/// Stationary Euler mean of ‖x‖²/2 minus the exact d/(2γ).
pub fn ou_euler_bias(d: usize, eta: f64, gamma: f64) -> f64 {
    0.5 * d as f64 * (2.0 / (2.0 - eta) - 1.0) / gamma
}

/// f = ‖x‖²/2, b = −x, σ = √(2/γ)·I.
pub fn ou_baseline(d: usize, gamma: f64) -> Result<ZooEntry> {
    check("d", d as f64, d >= 1, "need d ≥ 1")?;
    check("gamma", gamma, gamma > 0.0 && gamma.is_finite(), "need γ > 0")?;
    let objective = ObjectiveSpec::new(d, "half_sq_norm", |x: &Vector| 0.5 * x.norm_squared())
        .with_gradient(|x: &Vector| x.clone())
        .with_hessian(move |_: &Vector| Matrix::identity(d, d))
        .with_third_op_norm(|_: &Vector| 0.0)
        .with_fourth_op_norm(|_: &Vector| 0.0)
        .with_known_min(vec![0.0; d], 0.0)?;
    let diffusion = langevin(&objective, gamma)?;
    let target = TargetMeasure::gibbs(&objective, gamma)?;
    let df = d as f64;
    let analytic = AnalyticConstants {
        // ‖σσᵀ‖_op = 2/γ ≤ (8/γ)/4·(1+‖x‖).
        growth: Some(GrowthConstants::analytic(4.0, 4.0 * (2.0 * df / gamma).sqrt(), 8.0 / gamma, 1)),
        dissipativity: Some(DissipativityConstants::analytic(2.0, 2.0 * df / gamma)),
        rate: Some(RateModel::uniform(2, 2.0, "OU synchronous coupling")),
        smoothness: Some(SmoothnessEstimate::analytic(1, 0.5, [1.0, 1.0, 0.0, 0.0], [f64::INFINITY, f64::INFINITY, 1.0])),
        coefficients: Some(CoefficientConstants {
            mu_b: [1.0, 0.0, 0.0, 0.0],
            mu_sigma: [0.0; 4],
            phi_sigma: [0.0; 4],
            pi_sigma: [0.0; 3],
            pi_sigma_inv: [(gamma / 2.0).sqrt() / 2.0, 0.0, 0.0],
            provenance: Provenance::Analytic,
        }),
        mu2_f: Some(1.0),
    };
    Ok(ZooEntry {
        name: "ou_baseline".into(),
        params: serde_json::json!({ "d": d, "gamma": gamma }),
        objective,
        diffusion,
        target,
        gamma,
        analytic,
        notes: format!(
            "Gibbs target N(0, I/γ): p(f) = d/(2γ) = {}; Euler stationary variance 2/((2−η)γ) per coordinate",
            df / (2.0 * gamma)
        ),
    })
}
