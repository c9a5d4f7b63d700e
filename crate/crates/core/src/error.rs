use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid intensity {0}: must be finite and positive")]
    InvalidIntensity(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice mode needs an integral side, got {0}")]
    NonIntegralSide(f64),
    #[error("pair uniform requested for identical ids ({0})")]
    SelfPair(u64),
    #[error("point set too large: {0} points (ids must fit in 32 bits)")]
    TooManyPoints(u64),
    #[error("invalid mark {0}: must lie in (0,1)")]
    InvalidMark(f64),
}
