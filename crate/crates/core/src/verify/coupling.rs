use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Result, VerifyError};
use crate::diffusion::DiffusionSpec;
use crate::linalg::{standard_normal_vector, Vector};
use crate::rng::stream_rng;
use crate::sampler::{euler_step, DEFAULT_DIVERGENCE_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CouplingConfig {
    pub eta: f64,
    pub horizon: f64,
    pub reps: usize,
    pub seed: u64,
    pub record_every: usize,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self { eta: 1e-3, horizon: 1.0, reps: 100, seed: 0, record_every: 1 }
    }
}

/// Mean synchronous-coupling distance over replicas and its fitted exponential rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingCurve {
    pub times: Vec<f64>,
    pub mean_distance: Vec<f64>,
    /// k̂ with mean distance ≈ C·e^{−k̂t/2}; None when the curve is identically zero.
    pub fitted_rate: Option<f64>,
    pub used_reps: usize,
    pub excluded_reps: usize,
}

fn coupled_path(spec: &DiffusionSpec, x: &Vector, y: &Vector, cfg: &CouplingConfig, steps: usize, rep: u64) -> Option<Vec<f64>> {
    let mut rng = stream_rng(cfg.seed, rep);
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut out = vec![(&a - &b).norm()];
    for m in 1..=steps {
        let w = standard_normal_vector(&mut rng, spec.noise_dim());
        a = euler_step(spec, &a, cfg.eta, &w).ok()?;
        b = euler_step(spec, &b, cfg.eta, &w).ok()?;
        if a.norm() > DEFAULT_DIVERGENCE_THRESHOLD || b.norm() > DEFAULT_DIVERGENCE_THRESHOLD {
            return None;
        }
        if m % cfg.record_every == 0 {
            out.push((&a - &b).norm());
        }
    }
    Some(out)
}

/// Least-squares slope of log(distance) against time, reported as k̂ = −2·slope.
fn fit_rate(times: &[f64], dist: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(dist)
        .filter(|(_, d)| **d > 1e-300)
        .map(|(t, d)| (*t, d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mt, ml) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    Some(-2.0 * sxy / sxx)
}

/// Two Euler chains from x and y driven by the same Gaussian stream.
pub fn simulate_coupling(spec: &DiffusionSpec, x: &Vector, y: &Vector, cfg: &CouplingConfig) -> Result<CouplingCurve> {
    if !(cfg.horizon > 0.0) || !(cfg.eta > 0.0) || cfg.reps == 0 || cfg.record_every == 0 {
        return Err(VerifyError::InvalidParameter("need horizon > 0, eta > 0, reps ≥ 1, record_every ≥ 1".into()));
    }
    if x.len() != spec.dim() || y.len() != spec.dim() {
        return Err(VerifyError::InvalidParameter("start points must match the diffusion dimension".into()));
    }
    let steps = (cfg.horizon / cfg.eta).round().max(1.0) as usize;
    let paths: Vec<Option<Vec<f64>>> =
        (0..cfg.reps as u64).into_par_iter().map(|r| coupled_path(spec, x, y, cfg, steps, r)).collect();
    let kept: Vec<&Vec<f64>> = paths.iter().flatten().collect();
    let excluded_reps = cfg.reps - kept.len();
    let times: Vec<f64> = (0..=steps).step_by(cfg.record_every).map(|m| m as f64 * cfg.eta).collect();
    let mean_distance: Vec<f64> = if kept.is_empty() {
        Vec::new()
    } else {
        (0..times.len()).map(|i| kept.iter().map(|p| p[i]).sum::<f64>() / kept.len() as f64).collect()
    };
    let fitted_rate = fit_rate(&times, &mean_distance);
    Ok(CouplingCurve { times, mean_distance, fitted_rate, used_reps: kept.len(), excluded_reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn ou() -> DiffusionSpec {
        DiffusionSpec::new(2, "ou", |x: &Vector| -x, |_: &Vector| Matrix::identity(2, 2) * 2.0_f64.sqrt())
    }

    #[test]
    fn ou_coupling_is_geometric() {
        let x = Vector::from_vec(vec![1.0, -0.5]);
        let y = Vector::from_vec(vec![-0.3, 0.8]);
        let cfg = CouplingConfig { eta: 0.01, horizon: 2.0, reps: 4, ..Default::default() };
        let c = simulate_coupling(&ou(), &x, &y, &cfg).unwrap();
        let d0 = (&x - &y).norm();
        for (m, d) in c.mean_distance.iter().enumerate() {
            assert!((d - 0.99_f64.powi(m as i32) * d0).abs() < 1e-12);
        }
        // Discrete rate −2 log(1−η)/η → 2 as η → 0.
        let k = c.fitted_rate.unwrap();
        assert!((k + 2.0 * 0.99_f64.ln() / 0.01).abs() < 1e-9);
    }

    #[test]
    fn identical_starts_give_zero_curve() {
        let x = Vector::from_vec(vec![0.4, 0.4]);
        let c = simulate_coupling(&ou(), &x, &x, &CouplingConfig { reps: 3, horizon: 0.1, ..Default::default() }).unwrap();
        assert!(c.mean_distance.iter().all(|d| *d == 0.0));
        assert_eq!(c.fitted_rate, None);
    }

    #[test]
    fn diverging_pairs_are_excluded() {
        let spec = DiffusionSpec::new(1, "exp", |x: &Vector| x * 50.0, |_: &Vector| Matrix::identity(1, 1));
        let cfg = CouplingConfig { eta: 0.1, horizon: 10.0, reps: 5, ..Default::default() };
        let c = simulate_coupling(&spec, &Vector::from_vec(vec![1.0]), &Vector::from_vec(vec![2.0]), &cfg).unwrap();
        assert_eq!(c.excluded_reps, 5);
        assert!(c.mean_distance.is_empty());
    }
}
