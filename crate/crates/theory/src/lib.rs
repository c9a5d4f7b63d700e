//! Analytic side of the model: regime boundary and limit constant, the
//! connection-profile integral `I_rho`, numerical checks of the integral
//! bounds used in the lower-bound argument, the truncation recursions and the
//! connector estimate used by the layer construction.

mod connector;
mod ek;
mod lemmas;
mod nu;
mod pair;
pub mod quad;
mod regime;
mod truncation;

pub use connector::{connector_failure_bound, ConnectorBound};
pub use ek::{catalan, e_k_bound, e_k_recursion, EkEntry, EkReport, MAX_K};
pub use lemmas::{
    appendix_bound_check, appendix_constant, k_connection_constant, two_connection_bound_check, two_connection_constant,
    AdmissibleSampler, Appendix, BoundCheck, Lemma, Method, Verdict, MC_SIGMAS, QUAD_SLACK,
};
pub use nu::{nu2_direct, nu_alpha_beta, NuCheck, NuReport};
pub use pair::{pair_integral, Context, McOptions, TheoryParams, MAX_DIM};
pub use regime::{i_rho, i_rho_quadrature, limit_constant, regime_boundary, regime_classify, unit_ball_volume, Regime, RegimeReport};
pub use truncation::{truncation_small, truncation_ultrasmall, GrowthFit, TruncationSequence, TruncationSummary, NORMALIZATION_TOL};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("request too expensive: {0}")]
    TooExpensive(String),
}

pub type Result<T> = std::result::Result<T, TheoryError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(TheoryError::Domain(msg.into()))
}

/// `ln(e^a + e^b)` without overflow.
pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

pub(crate) fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
