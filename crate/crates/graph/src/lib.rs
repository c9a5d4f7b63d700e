//! Graph construction for marked point sets.
//!
//! [`build_naive`] decides every unordered pair and is the reference.
//! [`build_accelerated`] visits the same decisions through a cell grid and a
//! hash prefilter, so the two agree edge for edge.

mod augment;
mod build;
mod degree;
mod graph;
mod grid;
mod scan;

pub use augment::{augmentation_threshold, build_augmented, build_augmented_with, AugmentRule};
pub use build::{build_accelerated, build_naive, build_with_weights, EdgeOracle};
pub use degree::{degree_stats, degree_stats_with, hill_estimate, DegreeOptions, DegreeSummary, TailEstimate};
pub use graph::{BuilderTag, Graph, Provenance};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Core(#[from] wdrcm_core::CoreError),
    #[error(transparent)]
    Kernel(#[from] wdrcm_kernels::KernelError),
    #[error("invalid graph input: {0}")]
    InvalidInput(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GraphError>;
