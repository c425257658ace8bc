use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use diffopt_bench::{closed_form_inputs, ou, sublinear};
use diffopt_core::bounds::{assemble_corollary, stein_factors, AssemblyMode, RunSchedule, SteinInputs};
use diffopt_core::objective::estimate_smoothness;
use diffopt_core::sampler::euler_step;
use diffopt_core::verify::{fit_dissipativity, fit_growth, uniform_dissipativity_rate, RadialSampling};
use diffopt_core::{run_chain, run_replicas, ChainConfig, SampleConfig, Vector};

fn euler(c: &mut Criterion) {
    let e = sublinear();
    let x = Vector::from_vec(vec![3.0, -4.0]);
    let w = Vector::from_vec(vec![0.3, -1.1]);
    c.bench_function("euler_step/sublinear", |b| b.iter(|| euler_step(&e.diffusion, black_box(&x), 0.1, &w)));
    let lan = e.langevin().unwrap();
    c.bench_function("euler_step/langevin", |b| b.iter(|| euler_step(&lan, black_box(&x), 0.1, &w)));
}

fn chains(c: &mut Criterion) {
    let e = sublinear();
    let cfg = ChainConfig::new(0.1, 10_000, vec![90.0, 110.0], 0).with_record_every(10_000);
    let mut g = c.benchmark_group("run_chain");
    g.sample_size(20);
    g.bench_function("sublinear_1e4", |b| b.iter(|| run_chain(&e.diffusion, &e.objective, black_box(&cfg))));
    let o = ou();
    let cfg = cfg.with_keep_series(false);
    g.bench_function("ou_8x1e4_replicas", |b| b.iter(|| run_replicas(&o.diffusion, &o.objective, &cfg, 8)));
    g.finish();
}

fn estimators(c: &mut Criterion) {
    let e = sublinear();
    let radial = RadialSampling::default();
    let pairs = SampleConfig { samples: 2_000, ..Default::default() };
    let mut g = c.benchmark_group("estimators");
    g.sample_size(10);
    g.bench_function("fit_growth", |b| b.iter(|| fit_growth(&e.diffusion, &radial)));
    g.bench_function("fit_dissipativity", |b| b.iter(|| fit_dissipativity(&e.diffusion, &radial)));
    g.bench_function("uniform_rate_2000", |b| b.iter(|| uniform_dissipativity_rate(&e.diffusion, 2, &pairs)));
    g.bench_function("smoothness_2000", |b| b.iter(|| estimate_smoothness(&e.objective, 1, &pairs)));
    g.finish();
}

fn bounds(c: &mut Criterion) {
    let e = sublinear();
    let inputs = closed_form_inputs(&e, 1, 6, RunSchedule { eta: 1e-9, m: 1_000, x0_norm: 1.0 });
    c.bench_function("stein_factors/sublinear", |b| {
        b.iter(|| {
            stein_factors(&SteinInputs {
                rate: &inputs.rate,
                growth: &inputs.growth,
                dissipativity: &inputs.dissipativity,
                smoothness: &inputs.smoothness,
                coefficients: &inputs.coefficients,
                n: inputs.n,
            })
        })
    });
    c.bench_function("assemble_corollary/sublinear", |b| {
        b.iter_batched(|| inputs.clone(), |i| assemble_corollary(&i, AssemblyMode::FormulaOnly), BatchSize::SmallInput)
    });
}

criterion_group!(benches, euler, chains, estimators, bounds);
criterion_main!(benches);
