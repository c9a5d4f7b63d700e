//! Shared plumbing for the marked spatial graph models: box geometry,
//! vertex generation and the per-pair uniforms every builder consults.

mod error;
mod geometry;
mod hash;
mod points;
mod seed;

pub use error::CoreError;
pub use geometry::{Boundary, BoxGeometry};
pub use hash::{fmix32, pair_uniform, splitmix64, PairHasher};
pub use points::{draw_mark, fmt17, lattice_points, sample_poisson_points, MarkedPoint, PointSet};
pub use seed::{SeedSpec, Stream};

pub type Result<T> = std::result::Result<T, CoreError>;
