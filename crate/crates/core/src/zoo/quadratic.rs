use std::sync::Arc;

use super::{check, AnalyticConstants, Result, ZooEntry, ZooError};
use crate::diffusion::{drift_from_invariant, DiffusionSpec, DivergenceFallback, TargetMeasure};
use crate::linalg::{op_norm, sym_eigenvalues, Matrix, Vector};
use crate::objective::ObjectiveSpec;
use crate::verify::{DissipativityConstants, GrowthConstants, RateModel};

/// f = ⟨x−b, A(x−b)⟩ with target ∝ exp(−γ(f−f*)^θ), driven by b = ∇log p/γ and σ = √(2/γ)·I.
///
/// Sampling the target exactly is `bounds::quadratic_gibbs_sampler`.
pub fn quadratic_example(a: &Matrix, b: &Vector, gamma: f64, theta: f64) -> Result<ZooEntry> {
    let d = a.nrows();
    if a.ncols() != d || b.len() != d || d == 0 {
        return Err(ZooError::InvalidParams(format!("A is {}×{} but b has length {}", a.nrows(), a.ncols(), b.len())));
    }
    check("gamma", gamma, gamma > 0.0 && gamma.is_finite(), "need γ > 0")?;
    check("theta", theta, theta > 0.0 && theta <= 1.0, "need θ ∈ (0, 1]")?;
    if (a - a.transpose()).norm() > 1e-12 * (1.0 + a.norm()) {
        return Err(ZooError::InvalidParams("A must be symmetric".into()));
    }
    let lmin = sym_eigenvalues(a)[0];
    check("A.min_eigenvalue", lmin, lmin > 0.0, "A must be positive definite")?;
    let (a1, b1, a2, b2, a3) = (a.clone(), b.clone(), a.clone(), b.clone(), a.clone());
    let objective = ObjectiveSpec::new(d, "quadratic", move |x: &Vector| {
        let r = x - &b1;
        r.dot(&(&a1 * &r))
    })
    .with_gradient(move |x: &Vector| &a2 * (x - &b2) * 2.0)
    .with_hessian(move |_: &Vector| &a3 * 2.0)
    .with_third_op_norm(|_: &Vector| 0.0)
    .with_fourth_op_norm(|_: &Vector| 0.0)
    .with_known_min(b.iter().copied().collect(), 0.0)?;
    let target = TargetMeasure::generalized_gibbs(&objective, gamma, theta, Some(0.0))?;
    let s = (2.0 / gamma).sqrt();
    let cov: Arc<dyn Fn(&Vector) -> Matrix + Send + Sync> =
        Arc::new(move |_: &Vector| Matrix::identity(d, d) * (2.0 / gamma));
    let drift = drift_from_invariant(
        &target,
        cov.clone(),
        None,
        Some(Arc::new(move |_: &Vector| Vector::zeros(d))),
        DivergenceFallback::Disabled,
    )?;
    let diffusion = DiffusionSpec::from_fields(
        d,
        format!("quadratic-gen-gibbs(γ={gamma}, θ={theta})"),
        drift,
        Arc::new(move |_: &Vector| Matrix::identity(d, d) * s),
    )
    .with_covariance(cov)
    .with_divergence(Arc::new(move |_: &Vector| Vector::zeros(d)));

    let df = d as f64;
    let analytic = if theta == 1.0 {
        // b = −2A(x−b₀): ⟨b(x)−b(y), x−y⟩ ≤ −2λ_min‖x−y‖², and Young's inequality on 4⟨Ab₀, x⟩.
        let ab = (a * b).norm();
        AnalyticConstants {
            growth: Some(GrowthConstants::analytic(
                8.0 * op_norm(a) * b.norm().max(1.0),
                4.0 * (2.0 * df / gamma).sqrt(),
                8.0 / gamma,
                1,
            )),
            dissipativity: Some(DissipativityConstants::analytic(2.0 * lmin, 2.0 * df / gamma + 2.0 * ab * ab / lmin)),
            rate: Some(RateModel::uniform(2, 4.0 * lmin, "strongly convex Langevin")),
            smoothness: None,
            coefficients: None,
            mu2_f: Some(2.0 * op_norm(a)),
        }
    } else {
        AnalyticConstants::default()
    };
    Ok(ZooEntry {
        name: "quadratic".into(),
        params: serde_json::json!({ "d": d, "gamma": gamma, "theta": theta }),
        objective,
        diffusion,
        target,
        gamma,
        analytic,
        notes: format!(
            "f* = 0 at x* = b; for θ = 1/k the expected suboptimality is bounded by ((k(1+d/2)−1)/γ)^k (θ = {theta})"
        ),
    })
}
