use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use diffopt_core::bounds::{assemble_corollary, BoundInputs, BoundReport};
use diffopt_core::objective::estimate_smoothness;
use diffopt_core::sampler::{run_chain, run_gd};
use diffopt_core::verify::{
    distant_profile, fit_dissipativity, fit_growth, simulate_coupling, uniform_dissipativity_rate, CouplingConfig,
};
use diffopt_core::zoo::{self, AnalyticConstants, CatalogItem, ZooEntry};
use diffopt_core::{run_replicas, ChainConfig, ChainSummary, ChainTrace, DiffusionSpec, Provenance, Vector};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::{ConstantSource, DiffusionChoice, RunConfig, VerifierName};
use crate::error::{CliError, Result};

/// Global flag overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub replicas: Option<usize>,
}

impl Overrides {
    /// `--seed` reseeds the chain, the coupling and every verifier sampling plan.
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(s) = self.seed {
            if let Some(c) = cfg.chain.as_mut() {
                c.seed = s;
            }
            if let Some(c) = cfg.coupling.as_mut() {
                c.config.seed = s;
            }
            cfg.verify.radial.seed = s;
            cfg.verify.pairs.seed = s;
            cfg.verify.distant.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if let Some(r) = self.replicas {
            cfg.replicas = r;
        }
        cfg.validate()
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::io(path))
}

fn out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let f = File::create(path).map_err(CliError::io(path))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Runtime(format!("{}: {e}", path.display()))
}

fn build_entry(cfg: &RunConfig) -> Result<ZooEntry> {
    Ok(zoo::build(&cfg.zoo.name, &cfg.zoo.params)?)
}

fn diffusion_for(entry: &ZooEntry, choice: DiffusionChoice) -> Result<DiffusionSpec> {
    match choice {
        DiffusionChoice::Designed => Ok(entry.diffusion.clone()),
        DiffusionChoice::Langevin => Ok(entry.langevin()?),
    }
}

#[derive(Debug, Serialize)]
pub struct RunAggregate {
    pub zoo: String,
    pub params: Value,
    pub diffusion: String,
    pub replicas: usize,
    pub eta: f64,
    pub steps: usize,
    pub initial_f: f64,
    /// Mean and min over replicas of the best f(X_m), m ≥ 1.
    pub best_f_mean: f64,
    pub best_f_min: f64,
    pub mean_f_mean: f64,
    pub diverged_replicas: usize,
    pub passage_threshold: Option<f64>,
    pub first_passage_steps: Vec<Option<usize>>,
}

fn aggregate(entry: &ZooEntry, spec: &DiffusionSpec, chain: &ChainConfig, traces: &[ChainTrace], threshold: Option<f64>) -> RunAggregate {
    let k = traces.len() as f64;
    RunAggregate {
        zoo: entry.name.clone(),
        params: entry.params.clone(),
        diffusion: spec.label().to_string(),
        replicas: traces.len(),
        eta: chain.eta,
        steps: chain.steps,
        initial_f: traces.first().map_or(f64::NAN, |t| t.initial_f),
        best_f_mean: traces.iter().map(|t| t.best.f).sum::<f64>() / k,
        best_f_min: traces.iter().map(|t| t.best.f).fold(f64::INFINITY, f64::min),
        mean_f_mean: traces.iter().map(|t| t.mean_f()).sum::<f64>() / k,
        diverged_replicas: traces.iter().filter(|t| t.is_diverged()).count(),
        passage_threshold: threshold,
        first_passage_steps: traces.iter().map(|t| threshold.and_then(|th| t.first_passage(th))).collect(),
    }
}

/// Replica chains: trace_{r}.csv, summary_{r}.json and aggregate.json.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunAggregate> {
    let entry = build_entry(cfg)?;
    let spec = diffusion_for(&entry, cfg.diffusion)?;
    let chain = cfg.chain()?;
    chain.validate(entry.dim())?;
    let traces = run_replicas(&spec, &entry.objective, chain, cfg.replicas)?;
    let dir = &cfg.output_dir;
    out_dir(dir)?;
    for (r, t) in traces.iter().enumerate() {
        let path = dir.join(format!("trace_{r:03}.csv"));
        let f = File::create(&path).map_err(CliError::io(&path))?;
        t.write_csv(BufWriter::new(f)).map_err(csv_err(&path))?;
        let summary: ChainSummary = t.summary(cfg.passage_threshold);
        write_json(&dir.join(format!("summary_{r:03}.json")), &summary)?;
    }
    let agg = aggregate(&entry, &spec, chain, &traces, cfg.passage_threshold);
    write_json(&dir.join("aggregate.json"), &agg)?;
    if cfg.fail_on_divergence && agg.diverged_replicas > 0 {
        return Err(CliError::Runtime(format!(
            "{} of {} replicas diverged (artifacts written to {})",
            agg.diverged_replicas,
            agg.replicas,
            dir.display()
        )));
    }
    Ok(agg)
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Params {
    pub d: usize,
    pub c: f64,
    pub gamma: f64,
    pub eta: f64,
    pub x0: Vec<f64>,
    pub steps: usize,
    pub seeds: Vec<u64>,
    pub threshold: f64,
    pub every: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodRun {
    pub method: &'static str,
    /// None for the deterministic gradient-descent baseline.
    pub seed: Option<u64>,
    pub diverged: bool,
    pub divergence_step: Option<usize>,
    pub first_passage: Option<usize>,
    pub completed_steps: usize,
    pub final_f: Option<f64>,
    pub best_f: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Summary {
    pub params: Fig1Params,
    pub runs: Vec<MethodRun>,
    pub langevin_diverged: usize,
    pub designed_diverged: usize,
    pub designed_median_first_passage: Option<f64>,
    pub gd_first_passage: Option<usize>,
}

fn method_run(method: &'static str, seed: Option<u64>, t: &ChainTrace, threshold: f64) -> MethodRun {
    MethodRun {
        method,
        seed,
        diverged: t.is_diverged(),
        divergence_step: t.diverged.as_ref().map(|d| d.step),
        first_passage: t.first_passage(threshold),
        completed_steps: t.completed_steps,
        final_f: t.f_values.last().copied(),
        best_f: t.best.f,
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn f_at(t: &ChainTrace, step: usize) -> String {
    if step == 0 {
        return t.initial_f.to_string();
    }
    t.f_values.get(step - 1).map_or_else(String::new, |f| f.to_string())
}

/// Gradient descent vs Langevin vs the designed diffusion on the sublinear objective.
pub fn cmd_fig1(p: &Fig1Params, dir: &Path) -> Result<Fig1Summary> {
    if !(p.eta > 0.0 && p.eta.is_finite()) {
        return Err(CliError::Config(format!("eta must be positive, got {}", p.eta)));
    }
    if p.x0.len() != p.d {
        return Err(CliError::Config(format!("x0 has {} coordinates but d = {}", p.x0.len(), p.d)));
    }
    if p.seeds.is_empty() || p.steps == 0 || p.every == 0 {
        return Err(CliError::Config("need seeds ≥ 1, steps ≥ 1 and every ≥ 1".into()));
    }
    let entry = zoo::sublinear_example(p.c, p.d, p.gamma)?;
    let langevin = entry.langevin()?;
    let gd = run_gd(&entry.objective, p.eta, p.steps, &p.x0)?;
    let chains: Vec<(ChainTrace, ChainTrace)> = p
        .seeds
        .par_iter()
        .map(|&s| {
            let cfg = ChainConfig::new(p.eta, p.steps, p.x0.clone(), s).with_record_every(p.steps);
            Ok((run_chain(&langevin, &entry.objective, &cfg)?, run_chain(&entry.diffusion, &entry.objective, &cfg)?))
        })
        .collect::<Result<_>>()?;

    out_dir(dir)?;
    let path = dir.join("fig1.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["seed", "step", "gd", "langevin", "designed"]).map_err(csv_err(&path))?;
    for (s, (lan, des)) in p.seeds.iter().zip(&chains) {
        for step in (0..=p.steps).step_by(p.every) {
            let row = [s.to_string(), step.to_string(), f_at(&gd, step), f_at(lan, step), f_at(des, step)];
            w.write_record(&row).map_err(csv_err(&path))?;
        }
    }
    w.flush().map_err(CliError::io(&path))?;

    let mut runs = vec![method_run("gd", None, &gd, p.threshold)];
    for (s, (lan, des)) in p.seeds.iter().zip(&chains) {
        runs.push(method_run("langevin", Some(*s), lan, p.threshold));
        runs.push(method_run("designed", Some(*s), des, p.threshold));
    }
    let count = |m: &str| runs.iter().filter(|r| r.method == m && r.diverged).count();
    let passages: Vec<f64> = runs
        .iter()
        .filter(|r| r.method == "designed")
        .map(|r| r.first_passage.map_or(f64::INFINITY, |s| s as f64))
        .collect();
    let summary = Fig1Summary {
        params: p.clone(),
        langevin_diverged: count("langevin"),
        designed_diverged: count("designed"),
        designed_median_first_passage: median(passages),
        gd_first_passage: gd.first_passage(p.threshold),
        runs,
    };
    write_json(&dir.join("fig1_summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub satisfied: bool,
    pub result: Option<Value>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub zoo: String,
    pub params: Value,
    pub diffusion: String,
    pub gamma: f64,
    pub checks: BTreeMap<String, CheckOutcome>,
    pub all_satisfied: bool,
    /// Closed-form constants of the designed diffusion, for comparison.
    pub analytic: AnalyticConstants,
}

fn outcome<T: Serialize, E: Into<CliError> + std::fmt::Display>(
    r: std::result::Result<T, E>,
    is_config: impl Fn(&E) -> bool,
) -> Result<CheckOutcome> {
    match r {
        Ok(v) => Ok(CheckOutcome {
            satisfied: true,
            result: Some(serde_json::to_value(v).map_err(|e| CliError::Runtime(e.to_string()))?),
            error: None,
        }),
        Err(e) if is_config(&e) => Err(e.into()),
        Err(e) => Ok(CheckOutcome { satisfied: false, result: None, error: Some(e.to_string()) }),
    }
}

fn verify_config_error(e: &diffopt_core::VerifyError) -> bool {
    matches!(e, diffopt_core::VerifyError::InvalidParameter(_))
}

/// Runs the listed verifiers; a failed condition is recorded, not an error.
pub fn cmd_verify(cfg: &RunConfig) -> Result<ConditionReport> {
    let entry = build_entry(cfg)?;
    let spec = diffusion_for(&entry, cfg.diffusion)?;
    let v = &cfg.verify;
    let mut checks = BTreeMap::new();
    for name in &v.verifiers {
        let (key, o) = match name {
            VerifierName::Growth => ("growth", outcome(fit_growth(&spec, &v.radial), verify_config_error)?),
            VerifierName::Dissipativity => {
                ("dissipativity", outcome(fit_dissipativity(&spec, &v.radial), verify_config_error)?)
            }
            VerifierName::Uniform => (
                "uniform",
                outcome(uniform_dissipativity_rate(&spec, v.uniform_p, &v.pairs), verify_config_error)?,
            ),
            VerifierName::Distant => {
                let s = v
                    .distant_s
                    .ok_or_else(|| CliError::Config("verify.distant_s is required for the distant verifier".into()))?;
                ("distant", outcome(distant_profile(&spec, s, &v.distant), verify_config_error)?)
            }
            VerifierName::Smoothness => (
                "smoothness",
                outcome(estimate_smoothness(&entry.objective, v.smoothness_n, &v.pairs), |e| {
                    matches!(e, diffopt_core::ObjectiveError::InvalidConfig(_))
                })?,
            ),
        };
        checks.insert(key.to_string(), o);
    }
    let report = ConditionReport {
        zoo: entry.name.clone(),
        params: entry.params.clone(),
        diffusion: spec.label().to_string(),
        gamma: entry.gamma,
        all_satisfied: checks.values().all(|c| c.satisfied),
        checks,
        analytic: entry.analytic.clone(),
    };
    out_dir(&cfg.output_dir)?;
    write_json(&cfg.output_dir.join("verify.json"), &report)?;
    Ok(report)
}

fn analytic<T: Clone>(v: &Option<T>, what: &str, entry: &ZooEntry) -> Result<T> {
    v.clone().ok_or_else(|| {
        CliError::Config(format!("`{}` has no closed-form {what}; set bounds.source = \"fitted\"", entry.name))
    })
}

/// Bound inputs from closed forms or from the verifiers (coefficient constants are always closed-form).
pub fn bound_inputs(cfg: &RunConfig, entry: &ZooEntry, spec: &DiffusionSpec) -> Result<BoundInputs> {
    let b = &cfg.bounds;
    let a = &entry.analytic;
    let coefficients = a.coefficients.clone().ok_or_else(|| {
        CliError::Config(format!("`{}` has no closed-form coefficient constants; bounds are unavailable", entry.name))
    })?;
    let (growth, dissipativity, rate, rate_provenance, smoothness) = match b.source {
        ConstantSource::Analytic => {
            if cfg.diffusion != DiffusionChoice::Designed {
                return Err(CliError::Config(
                    "closed-form constants describe the designed diffusion; use bounds.source = \"fitted\"".into(),
                ));
            }
            (
                analytic(&a.growth, "growth constants", entry)?,
                analytic(&a.dissipativity, "dissipativity constants", entry)?,
                analytic(&a.rate, "rate", entry)?,
                Provenance::Analytic,
                analytic(&a.smoothness, "smoothness constants", entry)?,
            )
        }
        ConstantSource::Fitted => {
            let v = &cfg.verify;
            (
                fit_growth(spec, &v.radial)?,
                fit_dissipativity(spec, &v.radial)?.constants,
                uniform_dissipativity_rate(spec, v.uniform_p, &v.pairs)?,
                Provenance::Fitted,
                estimate_smoothness(&entry.objective, b.n, &v.pairs)?,
            )
        }
    };
    let mu2_f = match (b.source, a.mu2_f) {
        (ConstantSource::Analytic, Some(m)) => m,
        _ => smoothness.mu.get(&2).copied().ok_or_else(|| CliError::Config("μ₂(f) is unavailable".into()))?,
    };
    Ok(BoundInputs {
        growth,
        dissipativity,
        rate,
        rate_provenance,
        smoothness,
        coefficients,
        n: b.n,
        n_e: b.n_e,
        d: entry.dim(),
        gamma: entry.gamma,
        theta: b.theta,
        mu2_f,
        schedule: cfg.schedule()?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsOutput {
    pub zoo: String,
    pub params: Value,
    pub diffusion: String,
    pub source: ConstantSource,
    pub report: BoundReport,
}

pub fn cmd_bounds(cfg: &RunConfig) -> Result<BoundsOutput> {
    let entry = build_entry(cfg)?;
    let spec = diffusion_for(&entry, cfg.diffusion)?;
    let inputs = bound_inputs(cfg, &entry, &spec)?;
    let report = assemble_corollary(&inputs, cfg.bounds.mode)?;
    let out = BoundsOutput {
        zoo: entry.name.clone(),
        params: entry.params.clone(),
        diffusion: spec.label().to_string(),
        source: cfg.bounds.source,
        report,
    };
    out_dir(&cfg.output_dir)?;
    write_json(&cfg.output_dir.join("bounds.json"), &out)?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub zoo: String,
    pub params: Value,
    pub diffusion: String,
    pub config: CouplingConfig,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub fitted_rate: Option<f64>,
    pub used_reps: usize,
    pub excluded_reps: usize,
    /// Closed-form k and α of the entry, when known.
    pub analytic_k: Option<f64>,
    pub analytic_alpha: Option<f64>,
}

/// Synchronous coupling: coupling.csv (time, mean distance) and coupling.json.
pub fn cmd_couple(cfg: &RunConfig) -> Result<CouplingReport> {
    let entry = build_entry(cfg)?;
    let spec = diffusion_for(&entry, cfg.diffusion)?;
    let plan = cfg.coupling.as_ref().ok_or_else(|| CliError::Config("`coupling` section is required".into()))?;
    let (x, y) = (Vector::from_vec(plan.x.clone()), Vector::from_vec(plan.y.clone()));
    let curve = simulate_coupling(&spec, &x, &y, &plan.config)?;
    let dir = &cfg.output_dir;
    out_dir(dir)?;
    let path = dir.join("coupling.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["time", "mean_distance"]).map_err(csv_err(&path))?;
    for (t, m) in curve.times.iter().zip(&curve.mean_distance) {
        w.write_record([t.to_string(), m.to_string()]).map_err(csv_err(&path))?;
    }
    w.flush().map_err(CliError::io(&path))?;
    let designed = cfg.diffusion == DiffusionChoice::Designed;
    let report = CouplingReport {
        zoo: entry.name.clone(),
        params: entry.params.clone(),
        diffusion: spec.label().to_string(),
        config: plan.config,
        x: plan.x.clone(),
        y: plan.y.clone(),
        fitted_rate: curve.fitted_rate,
        used_reps: curve.used_reps,
        excluded_reps: curve.excluded_reps,
        analytic_k: entry.analytic.rate.as_ref().filter(|_| designed).map(|r| r.k()),
        analytic_alpha: entry.analytic.dissipativity.filter(|_| designed).map(|d| d.alpha),
    };
    write_json(&dir.join("coupling.json"), &report)?;
    Ok(report)
}

pub fn cmd_zoo_list(out: Option<&Path>) -> Result<Vec<CatalogItem>> {
    let items = zoo::catalog();
    if let Some(dir) = out {
        out_dir(dir)?;
        write_json(&dir.join("zoo.json"), &items)?;
    }
    let mut stdout = std::io::stdout().lock();
    let text = serde_json::to_string_pretty(&items).map_err(|e| CliError::Runtime(e.to_string()))?;
    match writeln!(stdout, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>")(e)),
        _ => Ok(items),
    }
}
