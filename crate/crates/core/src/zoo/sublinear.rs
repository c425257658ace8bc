use std::sync::Arc;

use super::radial::{radial_pseudo_lipschitz, radial_sup, Profile};
use super::{check, AnalyticConstants, Result, ZooEntry};
use crate::bounds::CoefficientConstants;
use crate::diffusion::{gibbs_diffusion, DiffusionCoefficients, TargetMeasure};
use crate::linalg::{Matrix, Vector};
use crate::objective::{ObjectiveSpec, SmoothnessEstimate};
use crate::provenance::Provenance;
use crate::verify::{DissipativityConstants, GrowthConstants, RateModel};

fn q(x: &Vector) -> f64 {
    1.0 + 0.5 * x.norm_squared()
}

/// σ = √(1+‖x‖²/2)·I with a = (1+‖x‖²/2)·I and ⟨∇, a⟩ = x.
pub fn sublinear_coefficients(d: usize) -> DiffusionCoefficients {
    DiffusionCoefficients::new(Arc::new(move |x: &Vector| Matrix::identity(d, d) * q(x).sqrt()))
        .with_covariance(Arc::new(move |x: &Vector| Matrix::identity(d, d) * q(x)))
        .with_divergence(Arc::new(|x: &Vector| x.clone()))
}

/// f = c·log(1+‖x‖²/2) with the designed diffusion b_γ = −½a∇f + ⟨∇,a⟩/(2γ), σ_γ = σ/√γ.
pub fn sublinear_example(c: f64, d: usize, gamma: f64) -> Result<ZooEntry> {
    check("d", d as f64, d >= 1, "need d ≥ 1")?;
    let df = d as f64;
    check("c", c, c.is_finite() && c > 0.5 * (df + 3.0), "need c > (d+3)/2")?;
    check("gamma", gamma, gamma.is_finite() && gamma >= 1.0, "need γ ≥ 1")?;
    let f = Profile::Log { coef: c };
    let objective = ObjectiveSpec::new(d, format!("sublinear(c={c})"), move |x: &Vector| c * q(x).ln())
        .with_gradient(move |x: &Vector| x * (c / q(x)))
        .with_hessian(move |x: &Vector| {
            let qx = q(x);
            Matrix::identity(d, d) * (c / qx) - x * x.transpose() * (c / (qx * qx))
        })
        .with_third_op_norm(move |x: &Vector| super::radial::radial_op_norm(&f, 3, x.norm(), d))
        .with_fourth_op_norm(move |x: &Vector| super::radial::radial_op_norm(&f, 4, x.norm(), d))
        .with_known_min(vec![0.0; d], 0.0)?;
    let diffusion = gibbs_diffusion(&objective, &sublinear_coefficients(d), gamma)?
        .with_label(format!("sublinear-designed(c={c}, γ={gamma})"));
    let target = TargetMeasure::gibbs(&objective, gamma)?;

    // b_γ = −κx with κ = (c − 1/γ)/2.
    let kappa = 0.5 * (c - 1.0 / gamma);
    let alpha = c - (df + 3.0) / (2.0 * gamma);
    let sigma = Profile::Power { coef: gamma.powf(-0.5), p: 0.5 };
    let sigma_inv = Profile::Power { coef: gamma.sqrt(), p: -0.5 };
    let mu_sigma: [f64; 4] = std::array::from_fn(|i| radial_sup(&sigma, i + 1, None, d));
    // Entries of σ are s·δ_ij, so φ_i(σ) = √d·μ_i(s).
    let phi_sigma = mu_sigma.map(|m| df.sqrt() * m);
    let pi_sigma: [f64; 3] = std::array::from_fn(|i| radial_sup(&sigma, i + 1, Some(0), d));
    let pi_sigma_inv: [f64; 3] = std::array::from_fn(|i| radial_sup(&sigma_inv, i, Some(0), d));
    let pi_f: [f64; 4] = std::array::from_fn(|i| radial_sup(&f, i + 1, Some(1), d));
    let mu_tilde = radial_pseudo_lipschitz(|r| f.at_radius(r), |r| f.radial_slope(r), 1);
    let analytic = AnalyticConstants {
        growth: Some(GrowthConstants::analytic(4.0 * kappa, 4.0 * (df / gamma).sqrt(), 4.0 / gamma, 2)),
        dissipativity: Some(DissipativityConstants::analytic(alpha, df / gamma)),
        rate: Some(RateModel::uniform(2, alpha, "uniform dissipativity with the stated α")),
        smoothness: Some(SmoothnessEstimate::analytic(
            1,
            mu_tilde,
            pi_f,
            [f64::INFINITY, radial_sup(&f, 1, None, d), radial_sup(&f, 2, None, d)],
        )),
        coefficients: Some(CoefficientConstants {
            mu_b: [kappa, 0.0, 0.0, 0.0],
            mu_sigma,
            phi_sigma,
            pi_sigma,
            pi_sigma_inv,
            provenance: Provenance::Analytic,
        }),
        mu2_f: Some(c),
    };
    Ok(ZooEntry {
        name: "sublinear".into(),
        params: serde_json::json!({ "c": c, "d": d, "gamma": gamma }),
        objective,
        diffusion,
        target,
        gamma,
        analytic,
        notes: format!(
            "stated α = c − (d+3)/(2γ) = {alpha}, β = d/γ; A‖x‖² = −(c − (d+2)/(2γ))‖x‖² + d/γ exactly, \
             so the tight α is {}",
            c - (df + 2.0) / (2.0 * gamma)
        ),
    })
}
