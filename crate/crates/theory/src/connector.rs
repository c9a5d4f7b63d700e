use serde::{Deserialize, Serialize};

use crate::{domain, Result};

/// Probability that a vertex of mark `t` has no connector to a vertex of mark
/// at most `t^{alpha1}` within distance `t^{-alpha2/d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectorBound {
    /// `(alpha2 - alpha1 gamma) delta - gamma`.
    pub exponent: f64,
    /// `min(gamma - (alpha2 - alpha1 gamma) delta, alpha2 - alpha1)`.
    pub eta: f64,
    /// False when the exponent is not negative; the bound then does not decay.
    pub applicable: bool,
    /// `exp(-c t^{exponent})`.
    pub failure: f64,
    pub success: f64,
}

pub fn connector_failure_bound(t: f64, alpha1: f64, alpha2: f64, gamma: f64, delta: f64, c: f64) -> Result<ConnectorBound> {
    if !(gamma > 0.0 && gamma < 1.0 && delta > 1.0 && delta.is_finite()) {
        return domain(format!("need 0 < gamma < 1 and delta > 1 (got {gamma}, {delta})"));
    }
    if gamma <= delta / (delta + 1.0) {
        return domain(format!("gamma = {gamma} must exceed delta / (delta + 1) = {}", delta / (delta + 1.0)));
    }
    let a1_hi = gamma / (delta * (1.0 - gamma));
    if !(alpha1 > 1.0 && alpha1 < a1_hi) {
        return domain(format!("alpha1 = {alpha1} outside (1, {a1_hi})"));
    }
    let a2_hi = gamma / delta * (1.0 + alpha1 * delta);
    if !(alpha2 > alpha1 && alpha2 < a2_hi) {
        return domain(format!("alpha2 = {alpha2} outside ({alpha1}, {a2_hi})"));
    }
    if !(t > 0.0 && t <= 0.25) {
        return domain(format!("t = {t} outside (0, 1/4]"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return domain(format!("c = {c} must be positive"));
    }
    let exponent = (alpha2 - alpha1 * gamma) * delta - gamma;
    let eta = (-exponent).min(alpha2 - alpha1);
    let failure = (-c * t.powf(exponent)).exp();
    Ok(ConnectorBound { exponent, eta, applicable: exponent < 0.0, failure, success: 1.0 - failure })
}
