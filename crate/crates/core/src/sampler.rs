//! Euler–Maruyama chains, the gradient-descent baseline and chain statistics.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffusion::DiffusionSpec;
use crate::linalg::{standard_normal_vector, Vector};
use crate::objective::ObjectiveSpec;
use crate::rng::stream_rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Euler step produced a non-finite iterate")]
    NonFinite,
    #[error("moment of order {0} was not tracked")]
    UntrackedOrder(u32),
}

pub type Result<T> = std::result::Result<T, SamplerError>;

pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e9;

fn default_record_every() -> usize {
    1
}

fn default_threshold() -> f64 {
    DEFAULT_DIVERGENCE_THRESHOLD
}

fn default_keep_series() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub eta: f64,
    pub steps: usize,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Even orders n_e whose running averages of ‖X_m‖^{n_e} are tracked.
    #[serde(default)]
    pub moment_orders: Vec<u32>,
    #[serde(default = "default_threshold")]
    pub divergence_threshold: f64,
    /// Keep per-step f and running-average series (otherwise only summaries).
    #[serde(default = "default_keep_series")]
    pub keep_series: bool,
}

impl ChainConfig {
    pub fn new(eta: f64, steps: usize, x0: Vec<f64>, seed: u64) -> Self {
        Self {
            eta,
            steps,
            x0,
            seed,
            record_every: 1,
            moment_orders: Vec::new(),
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            keep_series: true,
        }
    }

    pub fn with_record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn with_moment_orders(mut self, orders: Vec<u32>) -> Self {
        self.moment_orders = orders;
        self
    }

    pub fn with_keep_series(mut self, keep: bool) -> Self {
        self.keep_series = keep;
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(SamplerError::InvalidConfig(format!("eta must be positive, got {}", self.eta)));
        }
        if self.steps == 0 {
            return Err(SamplerError::InvalidConfig("steps must be at least 1".into()));
        }
        if self.record_every == 0 {
            return Err(SamplerError::InvalidConfig("record_every must be at least 1".into()));
        }
        if let Some(o) = self.moment_orders.iter().find(|o| *o % 2 != 0) {
            return Err(SamplerError::InvalidConfig(format!("moment order {o} is not even")));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(SamplerError::InvalidConfig("divergence_threshold must be positive".into()));
        }
        if self.x0.len() != dim {
            return Err(SamplerError::DimensionMismatch { expected: dim, got: self.x0.len() });
        }
        if !self.x0.iter().all(|v| v.is_finite()) {
            return Err(SamplerError::InvalidConfig("x0 must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedIterate {
    pub step: usize,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestIterate {
    pub step: usize,
    pub x: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceCause {
    Threshold,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    /// First step whose iterate was rejected.
    pub step: usize,
    pub cause: DivergenceCause,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentAverage {
    pub order: u32,
    /// (1/M)Σ_{m≤M} ‖X_m‖^{order} over completed steps.
    pub value: f64,
}

/// Recorded chain. Step m = 0 is X₀; statistics cover m = 1..=completed_steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub label: String,
    pub eta: f64,
    pub seed: u64,
    pub stream: u64,
    pub steps_requested: usize,
    pub completed_steps: usize,
    pub initial_f: f64,
    pub iterates: Vec<RecordedIterate>,
    /// f(X_m), m = 1..=completed_steps (empty when series are not kept).
    pub f_values: Vec<f64>,
    /// Mean of f(X₁..X_m) (empty when series are not kept).
    pub running_avg_f: Vec<f64>,
    /// Best iterate over m ≥ 1 (X₀ when no step completed).
    pub best: BestIterate,
    pub sum_f: f64,
    pub moments: Vec<MomentAverage>,
    pub diverged: Option<Divergence>,
}

/// Scalar summary of a trace (JSON export).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub label: String,
    pub eta: f64,
    pub seed: u64,
    pub stream: u64,
    pub steps_requested: usize,
    pub completed_steps: usize,
    pub initial_f: f64,
    pub best: BestIterate,
    pub mean_f: f64,
    pub final_x: Vec<f64>,
    pub moments: Vec<MomentAverage>,
    pub diverged: bool,
    pub divergence: Option<Divergence>,
    pub first_passage: Option<FirstPassage>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstPassage {
    pub threshold: f64,
    pub step: Option<usize>,
}

impl ChainTrace {
    pub fn mean_f(&self) -> f64 {
        if self.completed_steps == 0 {
            self.initial_f
        } else {
            self.sum_f / self.completed_steps as f64
        }
    }

    pub fn is_diverged(&self) -> bool {
        self.diverged.is_some()
    }

    /// First m ≥ 1 with f(X_m) ≤ threshold (needs kept series).
    pub fn first_passage(&self, threshold: f64) -> Option<usize> {
        self.f_values.iter().position(|f| *f <= threshold).map(|i| i + 1)
    }

    pub fn last_iterate(&self) -> Option<&RecordedIterate> {
        self.iterates.last()
    }

    pub fn summary(&self, passage_threshold: Option<f64>) -> ChainSummary {
        ChainSummary {
            label: self.label.clone(),
            eta: self.eta,
            seed: self.seed,
            stream: self.stream,
            steps_requested: self.steps_requested,
            completed_steps: self.completed_steps,
            initial_f: self.initial_f,
            best: self.best.clone(),
            mean_f: self.mean_f(),
            final_x: self.iterates.last().map(|r| r.x.clone()).unwrap_or_default(),
            moments: self.moments.clone(),
            diverged: self.is_diverged(),
            divergence: self.diverged.clone(),
            first_passage: passage_threshold.map(|t| FirstPassage { threshold: t, step: self.first_passage(t) }),
        }
    }

    /// CSV with columns step, x_1..x_d, f, best_f, running_avg_f at the recorded steps.
    /// Without kept series the f columns of steps m ≥ 1 are NaN.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let d = self.best.x.len();
        let mut header = vec!["step".to_string()];
        header.extend((1..=d).map(|i| format!("x_{i}")));
        header.extend(["f", "best_f", "running_avg_f"].map(String::from));
        w.write_record(&header)?;
        let mut best = f64::INFINITY;
        let mut m = 0usize;
        for rec in &self.iterates {
            let row_stats = if rec.step == 0 {
                [self.initial_f; 3]
            } else {
                while m < rec.step && m < self.f_values.len() {
                    best = best.min(self.f_values[m]);
                    m += 1;
                }
                match (self.f_values.get(rec.step - 1), self.running_avg_f.get(rec.step - 1)) {
                    (Some(f), Some(a)) => [*f, best, *a],
                    _ => [f64::NAN; 3],
                }
            };
            let mut row = vec![rec.step.to_string()];
            row.extend(rec.x.iter().map(|v| v.to_string()));
            row.extend(row_stats.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// X⁺ = X + ηb(X) + √η σ(X)W.
pub fn euler_step(spec: &DiffusionSpec, x: &Vector, eta: f64, w: &Vector) -> Result<Vector> {
    if w.len() != spec.noise_dim() {
        return Err(SamplerError::DimensionMismatch { expected: spec.noise_dim(), got: w.len() });
    }
    if !(eta > 0.0) {
        return Err(SamplerError::InvalidConfig(format!("eta must be positive, got {eta}")));
    }
    let next = x + spec.drift(x) * eta + spec.sigma(x) * w * eta.sqrt();
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(SamplerError::NonFinite)
    }
}

struct TraceBuilder {
    trace: ChainTrace,
    moment_sums: Vec<f64>,
    record_every: usize,
    keep_series: bool,
}

impl TraceBuilder {
    fn new(label: &str, cfg: &ChainConfig, stream: u64, x0: &Vector, f0: f64) -> Self {
        Self {
            trace: ChainTrace {
                label: label.to_string(),
                eta: cfg.eta,
                seed: cfg.seed,
                stream,
                steps_requested: cfg.steps,
                completed_steps: 0,
                initial_f: f0,
                iterates: vec![RecordedIterate { step: 0, x: x0.as_slice().to_vec() }],
                f_values: Vec::with_capacity(if cfg.keep_series { cfg.steps } else { 0 }),
                running_avg_f: Vec::with_capacity(if cfg.keep_series { cfg.steps } else { 0 }),
                best: BestIterate { step: 0, x: x0.as_slice().to_vec(), f: f0 },
                sum_f: 0.0,
                moments: Vec::new(),
                diverged: None,
            },
            moment_sums: vec![0.0; cfg.moment_orders.len()],
            record_every: cfg.record_every,
            keep_series: cfg.keep_series,
        }
    }

    fn push(&mut self, m: usize, x: &Vector, f: f64, orders: &[u32]) {
        let t = &mut self.trace;
        t.completed_steps = m;
        t.sum_f += f;
        if self.keep_series {
            t.f_values.push(f);
            t.running_avg_f.push(t.sum_f / m as f64);
        }
        if m == 1 || f < t.best.f {
            t.best = BestIterate { step: m, x: x.as_slice().to_vec(), f };
        }
        if !orders.is_empty() {
            let r2 = x.norm_squared();
            for (s, o) in self.moment_sums.iter_mut().zip(orders) {
                *s += r2.powi(*o as i32 / 2);
            }
        }
        if m % self.record_every == 0 {
            t.iterates.push(RecordedIterate { step: m, x: x.as_slice().to_vec() });
        }
    }

    fn finish(mut self, orders: &[u32], last: &Vector) -> ChainTrace {
        let t = &mut self.trace;
        let m = t.completed_steps;
        if t.iterates.last().map(|r| r.step) != Some(m) {
            t.iterates.push(RecordedIterate { step: m, x: last.as_slice().to_vec() });
        }
        t.moments = orders
            .iter()
            .zip(&self.moment_sums)
            .map(|(o, s)| MomentAverage { order: *o, value: if m == 0 { 0.0 } else { s / m as f64 } })
            .collect();
        self.trace
    }
}

fn run_loop(
    label: &str,
    obj: &ObjectiveSpec,
    cfg: &ChainConfig,
    stream: u64,
    mut step: impl FnMut(&Vector) -> Result<Vector>,
) -> Result<ChainTrace> {
    let x0 = Vector::from_vec(cfg.x0.clone());
    let f0 = obj.value(&x0).map_err(|_| SamplerError::NonFinite)?;
    let mut b = TraceBuilder::new(label, cfg, stream, &x0, f0);
    let mut x = x0;
    for m in 1..=cfg.steps {
        let next = match step(&x) {
            Ok(v) => v,
            Err(SamplerError::NonFinite) => {
                b.trace.diverged = Some(Divergence { step: m, cause: DivergenceCause::NonFinite });
                break;
            }
            Err(e) => return Err(e),
        };
        if next.norm() > cfg.divergence_threshold {
            b.trace.diverged = Some(Divergence { step: m, cause: DivergenceCause::Threshold });
            break;
        }
        let Ok(f) = obj.value(&next) else {
            b.trace.diverged = Some(Divergence { step: m, cause: DivergenceCause::NonFinite });
            break;
        };
        b.push(m, &next, f, &cfg.moment_orders);
        x = next;
    }
    Ok(b.finish(&cfg.moment_orders, &x))
}

/// Euler chain on stream `replica` of `cfg.seed`.
pub fn run_chain_replica(spec: &DiffusionSpec, obj: &ObjectiveSpec, cfg: &ChainConfig, replica: u64) -> Result<ChainTrace> {
    if obj.dim() != spec.dim() {
        return Err(SamplerError::DimensionMismatch { expected: spec.dim(), got: obj.dim() });
    }
    cfg.validate(spec.dim())?;
    let mut rng = stream_rng(cfg.seed, replica);
    let l = spec.noise_dim();
    run_loop(spec.label(), obj, cfg, replica, |x| {
        let w = standard_normal_vector(&mut rng, l);
        euler_step(spec, x, cfg.eta, &w)
    })
}

pub fn run_chain(spec: &DiffusionSpec, obj: &ObjectiveSpec, cfg: &ChainConfig) -> Result<ChainTrace> {
    run_chain_replica(spec, obj, cfg, 0)
}

/// Independent replicas 0..count in parallel; output order is replica order.
pub fn run_replicas(spec: &DiffusionSpec, obj: &ObjectiveSpec, cfg: &ChainConfig, count: usize) -> Result<Vec<ChainTrace>> {
    (0..count as u64).into_par_iter().map(|r| run_chain_replica(spec, obj, cfg, r)).collect()
}

/// x ← x − η∇f(x).
pub fn run_gd(obj: &ObjectiveSpec, eta: f64, steps: usize, x0: &[f64]) -> Result<ChainTrace> {
    let cfg = ChainConfig::new(eta, steps, x0.to_vec(), 0);
    cfg.validate(obj.dim())?;
    run_loop(&format!("gd[{}]", obj.label()), obj, &cfg, 0, |x| {
        let g = obj.gradient(x).map_err(|_| SamplerError::NonFinite)?;
        let next = x - g * eta;
        if next.iter().all(|v| v.is_finite()) {
            Ok(next)
        } else {
            Err(SamplerError::NonFinite)
        }
    })
}

/// (1/M)Σ‖X_m‖^{n_e}; order 0 is identically 1.
pub fn empirical_moment(trace: &ChainTrace, n_e: u32) -> Result<f64> {
    if n_e == 0 {
        return Ok(1.0);
    }
    trace
        .moments
        .iter()
        .find(|m| m.order == n_e)
        .map(|m| m.value)
        .ok_or(SamplerError::UntrackedOrder(n_e))
}

/// Mean and standard error of a sample.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
