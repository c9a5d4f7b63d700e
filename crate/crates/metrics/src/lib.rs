//! Queries on sampled graphs: hop and conductance distances, connected
//! components and the layer-hierarchy path constructor.

mod components;
mod distance;
mod layer;

pub use components::{components, Components};
pub use distance::{
    bfs_distance, bidirectional_distance, weighted_distance, write_distance_csv, Distance, DistanceResult,
    DistanceRow, Searcher,
};
pub use layer::{greedy_layer_path, LayerFailure, LayerPath, LayerPlan, Stage};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("vertex {id} out of range for n={n}")]
    InvalidVertex { id: usize, n: usize },
    #[error("graph carries no conductances")]
    MissingConductance,
    #[error("invalid layer plan: {0}")]
    InvalidPlan(String),
    #[error("points and graph disagree: {0} points, {1} vertices")]
    SizeMismatch(usize, usize),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

pub(crate) fn check_vertex(n: usize, id: usize) -> Result<()> {
    if id < n {
        Ok(())
    } else {
        Err(MetricsError::InvalidVertex { id, n })
    }
}
