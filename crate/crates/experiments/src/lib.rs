//! Config-driven experiment drivers over the sampler, metrics and theory crates.
//! Every driver runs its trials in parallel and merges records in trial order,
//! so the output is identical for any thread count.

mod config;
mod degree;
mod distance;
mod layer;
mod record;
mod stats;
mod sweep;
mod theory;

pub use config::{
    DegreeKnobs, DistanceKnobs, ExperimentKind, LayerKnobs, ModelConfig, OutputConfig, RunConfig, SweepKnobs,
    TheoryKnobs,
};
pub use degree::run_degree;
pub use distance::{run_distance_scaling, sample_pairs};
pub use layer::{run_layer_path, validate_layer_path};
pub use record::{ExperimentResult, Record, TheoryEntry, CSV_HEADER};
pub use stats::{mean_stderr, ols_slope, wilson_interval};
pub use sweep::run_phase_sweep;
pub use theory::{run_theory_checks, THEORY_SCHEMA};

use thiserror::Error;
use wdrcm_core::{sample_poisson_points, PointSet, SeedSpec};
use wdrcm_graph::{build_accelerated, build_with_weights, Graph};
use wdrcm_kernels::{sample_reinforcement_weights, Kernel, KernelSpec};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] wdrcm_core::CoreError),
    #[error(transparent)]
    Kernel(#[from] wdrcm_kernels::KernelError),
    #[error(transparent)]
    Graph(#[from] wdrcm_graph::GraphError),
    #[error(transparent)]
    Metrics(#[from] wdrcm_metrics::MetricsError),
    #[error(transparent)]
    Theory(#[from] wdrcm_theory::TheoryError),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// Samples the point process and the graph of one trial.
pub fn sample_model(model: &ModelConfig, kernel: &KernelSpec, seed: &SeedSpec) -> Result<(PointSet, Graph)> {
    let geom = model.geometry()?;
    let points = sample_poisson_points(&geom, model.intensity, seed)?;
    let graph = if Kernel::new(kernel, model.dimension)?.needs_weights() {
        let law = kernel
            .weight_law
            .as_ref()
            .ok_or_else(|| ExperimentError::Config("kernel needs a weight_law".into()))?;
        let w = sample_reinforcement_weights(points.len(), law, seed)?;
        build_with_weights(&points, kernel, seed, w, true)?
    } else {
        build_accelerated(&points, kernel, seed)?
    };
    Ok((points, graph))
}

/// Runs the experiment named by `kind`.
pub fn run(cfg: &RunConfig, kind: ExperimentKind) -> Result<ExperimentResult> {
    cfg.validate()?;
    cfg.check_kind(kind)?;
    match kind {
        ExperimentKind::Degree => run_degree(cfg),
        ExperimentKind::DistanceScaling => run_distance_scaling(cfg),
        ExperimentKind::PhaseSweep => run_phase_sweep(cfg),
        ExperimentKind::LayerPath => run_layer_path(cfg),
        ExperimentKind::TheoryChecks => run_theory_checks(cfg),
    }
}

pub(crate) fn kernel_params(k: &KernelSpec, model: &ModelConfig) -> String {
    let fam = serde_json::to_value(k.family).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    format!(
        "family={fam};gamma={};delta={};kappa={};d={};side={}",
        k.gamma, k.delta, k.kappa, model.dimension, model.side
    )
}

pub(crate) const GIANT_NOTE: &str =
    "pairs are conditioned on joint membership of the largest connected component of the sample";
