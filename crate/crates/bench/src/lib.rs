//! Fixtures shared by the criterion benchmarks in benches/.

use diffopt_core::bounds::{BoundInputs, RunSchedule};
use diffopt_core::zoo::{self, ZooEntry};
use diffopt_core::Provenance;

/// The d = 2, c = 10, γ = 1 sublinear example.
pub fn sublinear() -> ZooEntry {
    zoo::sublinear_example(10.0, 2, 1.0).expect("valid parameters")
}

pub fn ou() -> ZooEntry {
    zoo::ou_baseline(2, 1.0).expect("valid parameters")
}

/// Bound inputs from an entry's closed-form constants (entries without them panic).
pub fn closed_form_inputs(e: &ZooEntry, n: u32, n_e: u32, schedule: RunSchedule) -> BoundInputs {
    let a = &e.analytic;
    BoundInputs {
        growth: a.growth.expect("growth"),
        dissipativity: a.dissipativity.expect("dissipativity"),
        rate: a.rate.clone().expect("rate"),
        rate_provenance: Provenance::Analytic,
        smoothness: a.smoothness.clone().expect("smoothness"),
        coefficients: a.coefficients.clone().expect("coefficients"),
        n,
        n_e,
        d: e.dim(),
        gamma: e.gamma,
        theta: 1.0,
        mu2_f: a.mu2_f.expect("mu2_f"),
        schedule,
    }
}
