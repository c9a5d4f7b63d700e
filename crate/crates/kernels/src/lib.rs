//! Connection probabilities for the weight-dependent random connection
//! model and its concrete instances (soft Boolean, Gilbert, age-dependent,
//! scale-free percolation, reinforced age-dependent), plus the two envelope
//! kernels used in the theory.

mod kernel;
mod spec;
mod weights;

pub use kernel::{radius_from_mark, rho, rho_unchecked, Kernel, MarkFeatures, PairContext};
pub use spec::{Family, KernelSpec, Profile};
pub use weights::{sample_reinforcement_weights, WeightLaw};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),
    #[error("rho needs a positive argument, got {0}")]
    NonPositiveArgument(f64),
    #[error("invalid mark {0}")]
    InvalidMark(f64),
    #[error("family {0:?} needs per-vertex weights")]
    MissingWeights(Family),
    #[error("invalid weight law: {0}")]
    InvalidWeightLaw(String),
    #[error("invalid pair context: {0}")]
    InvalidContext(String),
}

pub type Result<T> = std::result::Result<T, KernelError>;
