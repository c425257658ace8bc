use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    beta_rn, c_constants, integration_error_bound, kappa_r, moment_bound, positive, step_threshold, stein_factors,
    suboptimality_generalized_gibbs, BoundsError, CConstants, CoefficientConstants, Result, SteinFactorSet,
    SteinInputs,
};
use crate::objective::SmoothnessEstimate;
use crate::provenance::Provenance;
use crate::verify::{DissipativityConstants, GrowthConstants, RateModel};

/// `Strict` rejects step sizes at or above the moment threshold; `FormulaOnly` evaluates
/// the displays regardless and flags the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyMode {
    #[default]
    Strict,
    FormulaOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSchedule {
    pub eta: f64,
    pub m: u64,
    /// ‖X₀‖ for the deterministic start.
    pub x0_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub growth: GrowthConstants,
    pub dissipativity: DissipativityConstants,
    pub rate: RateModel,
    pub rate_provenance: Provenance,
    pub smoothness: SmoothnessEstimate,
    pub coefficients: CoefficientConstants,
    pub n: u32,
    pub n_e: u32,
    pub d: usize,
    pub gamma: f64,
    pub theta: f64,
    /// μ₂(f) = sup ‖∇²f‖_op.
    pub mu2_f: f64,
    pub schedule: RunSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub mode: AssemblyMode,
    pub stein: SteinFactorSet,
    pub zeta_1: f64,
    pub zeta_2: f64,
    pub zeta_3: f64,
    pub zeta_4: f64,
    #[serde(flatten)]
    pub c: CConstants,
    /// κ_r(n_e).
    pub kappa_r: f64,
    /// β_{r,n_e}.
    pub beta_rn: f64,
    pub eta_max: f64,
    pub step_size_valid: bool,
    pub x0_moment: f64,
    /// (c₁/(ηM) + c₂η + c₃η^{1+(1∧n/2)})(κ_r(n_e) + ‖x₀‖^{n_e}).
    pub theorem_integration_bound: f64,
    /// (c₁/(ηM) + (c₂+c₃)η)(κ_r(n_e) + ‖x₀‖^{n_e}).
    pub integration_bound: f64,
    pub suboptimality: f64,
    /// integration_bound + suboptimality.
    pub total: f64,
    pub provenance: BTreeMap<String, Provenance>,
    pub warnings: Vec<String>,
}

/// Best-iterate optimisation error bound: merged integration error plus the
/// generalized-Gibbs expected suboptimality.
pub fn assemble_corollary(inputs: &BoundInputs, mode: AssemblyMode) -> Result<BoundReport> {
    let sched = inputs.schedule;
    positive(sched.eta, "eta")?;
    if sched.m == 0 {
        return Err(BoundsError::InvalidParameter("M must be at least 1".into()));
    }
    let (g, dc) = (&inputs.growth, &inputs.dissipativity);
    let eta_max = step_threshold(dc.alpha, g.lambda_b, g.lambda_sigma, inputs.n_e);
    let step_size_valid = sched.eta < eta_max;
    let mut warnings = Vec::new();
    if !step_size_valid {
        match mode {
            AssemblyMode::Strict => return Err(BoundsError::StepTooLarge { eta: sched.eta, threshold: eta_max }),
            AssemblyMode::FormulaOnly => warnings.push(format!(
                "eta = {} is not below the moment threshold {eta_max:.3e}; values are formula evaluations only",
                sched.eta
            )),
        }
    }

    let stein = stein_factors(&SteinInputs {
        rate: &inputs.rate,
        growth: g,
        dissipativity: dc,
        smoothness: &inputs.smoothness,
        coefficients: &inputs.coefficients,
        n: inputs.n,
    })?;
    let c = c_constants(&stein.zeta(), g.lambda_b, g.lambda_sigma, inputs.n, inputs.n_e)?;
    let kappa = kappa_r(inputs.n_e, dc.alpha, dc.beta, g.lambda_a, g.r)?;
    let beta_ne = beta_rn(dc.alpha, dc.beta, g.lambda_a, g.r, inputs.n_e)?;
    let x0_moment = moment_bound(0.0, sched.x0_norm, inputs.n_e);
    let theorem = integration_error_bound(&c, sched.eta, sched.m, inputs.n, kappa, x0_moment)?;
    let merged_c = CConstants { c_1: c.c_1, c_2: c.c_2 + c.c_3, c_3: 0.0 };
    let integration = integration_error_bound(&merged_c, sched.eta, sched.m, inputs.n, kappa, x0_moment)?;
    let suboptimality =
        suboptimality_generalized_gibbs(inputs.gamma, inputs.theta, inputs.d, dc.alpha, dc.beta, inputs.mu2_f)?;

    let provenance: BTreeMap<String, Provenance> = [
        ("growth", g.provenance),
        ("dissipativity", dc.provenance),
        ("rate", inputs.rate_provenance),
        ("smoothness", inputs.smoothness.provenance),
        ("coefficients", inputs.coefficients.provenance),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    for (name, p) in &provenance {
        if *p == Provenance::Fitted {
            warnings.push(format!("{name} constants are sampled estimates (lower bounds of the true suprema)"));
        }
    }

    Ok(BoundReport {
        inputs: inputs.clone(),
        mode,
        zeta_1: stein.zeta_1,
        zeta_2: stein.zeta_2,
        zeta_3: stein.zeta_3,
        zeta_4: stein.zeta_4,
        stein,
        c,
        kappa_r: kappa,
        beta_rn: beta_ne,
        eta_max,
        step_size_valid,
        x0_moment,
        theorem_integration_bound: theorem,
        integration_bound: integration,
        suboptimality,
        total: integration + suboptimality,
        provenance,
        warnings,
    })
}
