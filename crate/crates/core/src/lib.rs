//! Global optimization with Euler-discretized diffusions: objectives, diffusion
//! construction, samplers, condition verifiers and explicit error bounds.

pub mod bounds;
pub mod linalg;
pub mod objective;
pub mod diffusion;
pub mod provenance;
pub mod rng;
pub mod sampler;
pub mod verify;
pub mod zoo;

pub use bounds::{BoundReport, BoundsError};
pub use diffusion::{
    gibbs_diffusion, langevin, DiffusionCoefficients, DiffusionError, DiffusionSpec, TargetMeasure,
};
pub use linalg::{Matrix, Vector};
pub use objective::{ObjectiveError, ObjectiveSpec, SampleConfig, SmoothnessEstimate};
pub use provenance::Provenance;
pub use sampler::{run_chain, run_replicas, ChainConfig, ChainSummary, ChainTrace, SamplerError};
pub use verify::VerifyError;
pub use zoo::{ZooEntry, ZooError};
