use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{finite, ExponentialRate, RateModel, Result, VerifyError};
use crate::diffusion::{DiffusionCoefficients, DiffusionSpec};
use crate::linalg::{max_sym_eigenvalue, psd_sqrt, uniform_in_ball, unit_vector, Matrix, Vector};
use crate::objective::ObjectiveSpec;
use crate::rng::stream_rng;

/// How (K, L, R) are read off the binned profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSelection {
    /// Candidate R over all bin edges; keep the triple with the smallest s²/k bound.
    #[default]
    RateOptimal,
    /// K = half the asymptotic (outer-decade) level; R = smallest edge beyond which bins ≤ −K.
    HalfAsymptotic,
}

/// Pairs x ~ radius·Uniform(ball), y = x + ρu with ρ log-uniform on [min_separation, 2·radius].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistantConfig {
    pub pairs: usize,
    pub radius: f64,
    pub seed: u64,
    pub bins: usize,
    pub min_separation: f64,
    pub selection: KSelection,
}

impl Default for DistantConfig {
    fn default() -> Self {
        Self { pairs: 20_000, radius: 10.0, seed: 0, bins: 64, min_separation: 1e-3, selection: KSelection::RateOptimal }
    }
}

impl DistantConfig {
    fn max_separation(&self) -> f64 {
        2.0 * self.radius
    }

    fn validate(&self) -> Result<()> {
        if self.pairs == 0 || self.bins < 2 {
            return Err(VerifyError::InvalidParameter("need pairs ≥ 1 and bins ≥ 2".into()));
        }
        if !(self.min_separation > 0.0 && self.max_separation() > self.min_separation) {
            return Err(VerifyError::InvalidParameter("need 0 < min_separation < 2·radius".into()));
        }
        Ok(())
    }

    fn edge(&self, i: usize) -> f64 {
        let (a, b) = (self.min_separation.ln(), self.max_separation().ln());
        (a + (b - a) * i as f64 / self.bins as f64).exp()
    }

    fn bin_of(&self, dist: f64) -> usize {
        let (a, b) = (self.min_separation.ln(), self.max_separation().ln());
        let pos = ((dist.ln() - a) / (b - a) * self.bins as f64).floor();
        pos.clamp(0.0, (self.bins - 1) as f64) as usize
    }

    fn pair(&self, dim: usize, index: usize) -> (Vector, Vector) {
        let mut rng = stream_rng(self.seed, index as u64);
        let x = uniform_in_ball(&mut rng, dim, self.radius);
        let u: f64 = rng.random();
        let (a, b) = (self.min_separation.ln(), self.max_separation().ln());
        let rho = (a + (b - a) * u).exp();
        let y = &x + unit_vector(&mut rng, dim) * rho;
        (x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileBin {
    pub lo: f64,
    pub hi: f64,
    /// Max of the LHS in this separation bin (−∞ when empty).
    pub max: f64,
    pub count: usize,
}

/// Constants of the distant-dissipativity inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistantProfile {
    #[serde(rename = "K")]
    pub big_k: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub s: f64,
    pub selection: KSelection,
    pub bins: Vec<ProfileBin>,
}

/// σ̃ = (a − s²I)^{1/2}.
pub fn sigma_tilde(a: &Matrix, s: f64) -> Result<Matrix> {
    let d = a.nrows();
    psd_sqrt(&(a - Matrix::identity(d, d) * (s * s)), 1e-10)
        .map_err(|min_eigenvalue| VerifyError::NotPositiveSemidefinite { min_eigenvalue })
}

/// ⟨Δb,Δx⟩/(s²‖Δx‖²/2) + ‖Δσ̃‖_F²/(s²‖Δx‖²) − ‖Δσ̃ᵀΔx‖²/(s²‖Δx‖⁴).
pub fn distant_lhs(spec: &DiffusionSpec, s: f64, x: &Vector, y: &Vector) -> Result<f64> {
    let dx = x - y;
    let n2 = dx.norm_squared();
    let s2 = s * s;
    let dst = sigma_tilde(&spec.covariance(x), s)? - sigma_tilde(&spec.covariance(y), s)?;
    let drift = (spec.drift(x) - spec.drift(y)).dot(&dx) / (0.5 * s2 * n2);
    let frob = dst.norm_squared() / (s2 * n2);
    let proj = (dst.transpose() * &dx).norm_squared() / (s2 * n2 * n2);
    finite(drift + frob - proj)
}

fn binned(cfg: &DistantConfig, dim: usize, lhs: impl Fn(&Vector, &Vector) -> Result<f64> + Sync) -> Result<Vec<ProfileBin>> {
    cfg.validate()?;
    let values: Vec<(usize, f64)> = (0..cfg.pairs)
        .into_par_iter()
        .map(|i| {
            let (x, y) = cfg.pair(dim, i);
            Ok((cfg.bin_of((&x - &y).norm()), lhs(&x, &y)?))
        })
        .collect::<Result<_>>()?;
    let mut bins: Vec<ProfileBin> = (0..cfg.bins)
        .map(|i| ProfileBin { lo: cfg.edge(i), hi: cfg.edge(i + 1), max: f64::NEG_INFINITY, count: 0 })
        .collect();
    for (b, v) in values {
        bins[b].max = bins[b].max.max(v);
        bins[b].count += 1;
    }
    Ok(bins)
}

/// s²/k upper bound for (K, L, R).
pub fn distant_bound_s2_over_k(big_k: f64, big_l: f64, big_r: f64) -> f64 {
    let e = std::f64::consts::E;
    let lr2 = big_l * big_r * big_r;
    if lr2 <= 8.0 {
        0.5 * (e - 1.0) * big_r * big_r + e * (8.0 / big_k).sqrt() * big_r + 4.0 / big_k
    } else {
        8.0 * (2.0 * std::f64::consts::PI).sqrt() / big_r / big_l.sqrt()
            * (1.0 / big_l + 1.0 / big_k)
            * (lr2 / 8.0).exp()
            + 32.0 / (big_r * big_r * big_k * big_k)
    }
}

/// (K, L, R) with K > 0 from a binned profile.
fn select(bins: &[ProfileBin], selection: KSelection, outer_from: f64) -> Result<(f64, f64, f64)> {
    let filled: Vec<&ProfileBin> = bins.iter().filter(|b| b.count > 0).collect();
    let triple = |cut: usize| -> (f64, f64, f64) {
        let r = if cut == 0 { 0.0 } else { filled[cut - 1].hi };
        let inner = filled[..cut].iter().map(|b| b.max).fold(0.0_f64, f64::max);
        let beyond = filled[cut..].iter().map(|b| b.max).fold(f64::NEG_INFINITY, f64::max);
        (-beyond, inner, r)
    };
    match selection {
        KSelection::RateOptimal => (0..filled.len())
            .map(triple)
            .filter(|(k, _, _)| *k > 0.0)
            .min_by(|a, b| distant_bound_s2_over_k(a.0, a.1, a.2).total_cmp(&distant_bound_s2_over_k(b.0, b.1, b.2)))
            .ok_or(VerifyError::NoDecay),
        KSelection::HalfAsymptotic => {
            let level = filled.iter().filter(|b| b.lo >= outer_from).map(|b| b.max).fold(f64::NEG_INFINITY, f64::max);
            if !(level < 0.0) {
                return Err(VerifyError::NoDecay);
            }
            let big_k = -0.5 * level;
            let cut = (0..filled.len())
                .find(|&c| filled[c..].iter().all(|b| b.max <= -big_k))
                .ok_or(VerifyError::NoDecay)?;
            let (_, l, r) = triple(cut);
            Ok((big_k, l, r))
        }
    }
}

/// Binned distant-dissipativity profile of a diffusion for the given s.
pub fn distant_profile(spec: &DiffusionSpec, s: f64, cfg: &DistantConfig) -> Result<DistantProfile> {
    if !(s > 0.0) {
        return Err(VerifyError::InvalidParameter(format!("s must be positive, got {s}")));
    }
    let bins = binned(cfg, spec.dim(), |x, y| distant_lhs(spec, s, x, y))?;
    let (big_k, big_l, big_r) = select(&bins, cfg.selection, cfg.max_separation() / 10.0)?;
    Ok(DistantProfile { big_k, big_l, big_r, s, selection: cfg.selection, bins })
}

/// ϱ₁(t) = 2e^{LR²/8}e^{−kt/2} with k at the s²/k bound.
pub fn rate_from_distant(profile: &DistantProfile) -> RateModel {
    let bound = distant_bound_s2_over_k(profile.big_k, profile.big_l, profile.big_r);
    let amplitude = 2.0 * (profile.big_l * profile.big_r * profile.big_r / 8.0).exp();
    RateModel::l1_only(
        ExponentialRate::new(amplitude, profile.s * profile.s / bound),
        "distant dissipativity",
    )
}

/// User-friendly distant-dissipativity certificate for the Gibbs diffusion at γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriendlyDistant {
    pub profile: DistantProfile,
    pub gamma: f64,
    pub gamma_min: f64,
    pub l_star: f64,
    pub phi1_sigma_tilde: f64,
    pub max_div_jacobian_eigenvalue: f64,
    pub k_m: f64,
    pub l_m: f64,
    pub r_m: f64,
}

/// Fits (K_m, L_m, R_m) for −⟨m∇f(x) − m∇f(y), x−y⟩/‖x−y‖², estimates
/// L* = φ₁(σ̃)² + sup λ_max(∇⟨∇,m⟩), and maps them to (K, L, R, s) at inverse temperature γ.
pub fn friendly_distant(
    obj: &ObjectiveSpec,
    coeffs: &DiffusionCoefficients,
    s0: f64,
    gamma: f64,
    cfg: &DistantConfig,
) -> Result<FriendlyDistant> {
    if !(s0 > 0.0) || !(gamma > 0.0) {
        return Err(VerifyError::InvalidParameter("need s0 > 0 and γ > 0".into()));
    }
    let dim = obj.dim();
    let a = coeffs.covariance_field();
    let m = coeffs.m_field();
    let div = coeffs.div_field();
    let m_grad = |x: &Vector| -> Result<Vector> { Ok(m(x) * obj.gradient(x)?) };
    let drift_bins = binned(cfg, dim, |x, y| {
        let dx = x - y;
        finite(-(m_grad(x)? - m_grad(y)?).dot(&dx) / dx.norm_squared())
    })?;
    let (k_m, l_m, r_m) = select(&drift_bins, cfg.selection, cfg.max_separation() / 10.0)?;

    let pieces: Vec<(f64, f64)> = (0..cfg.pairs)
        .into_par_iter()
        .map(|i| {
            let (x, y) = cfg.pair(dim, i);
            let dst = sigma_tilde(&a(&x), s0)? - sigma_tilde(&a(&y), s0)?;
            let phi = dst.norm() / (&x - &y).norm();
            let h = crate::linalg::fd_step(&x);
            let mut jac = Matrix::zeros(dim, dim);
            let mut xp = x.clone();
            for j in 0..dim {
                xp[j] = x[j] + h;
                let plus = div(&xp);
                xp[j] = x[j] - h;
                let minus = div(&xp);
                xp[j] = x[j];
                jac.set_column(j, &((plus - minus) / (2.0 * h)));
            }
            Ok((finite(phi)?, finite(max_sym_eigenvalue(&jac))?))
        })
        .collect::<Result<_>>()?;
    let phi1 = pieces.iter().map(|p| p.0).fold(0.0, f64::max);
    let eig = pieces.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let l_star = phi1 * phi1 + eig;
    let gamma_min = l_star / k_m;
    if gamma <= gamma_min {
        return Err(VerifyError::GammaTooSmall { gamma, gamma_min });
    }
    let s02 = s0 * s0;
    let profile = DistantProfile {
        big_k: (gamma * k_m - l_star) / s02,
        big_l: (gamma * l_m + l_star) / s02,
        big_r: r_m,
        s: s0 / gamma.sqrt(),
        selection: cfg.selection,
        bins: drift_bins,
    };
    Ok(FriendlyDistant {
        profile,
        gamma,
        gamma_min,
        l_star,
        phi1_sigma_tilde: phi1,
        max_div_jacobian_eigenvalue: eig,
        k_m,
        l_m,
        r_m,
    })
}
