use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::{domain, quad, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Ultrasmall,
    NotUltrasmall,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub gamma: f64,
    pub delta: f64,
    pub boundary: f64,
    pub regime: Regime,
    /// `4 / log(gamma / (delta (1 - gamma)))`, ultrasmall only.
    pub limit_constant: Option<f64>,
}

/// Critical `gamma = delta / (delta + 1)`.
pub fn regime_boundary(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta = {delta} must be positive and finite"));
    }
    Ok(delta / (delta + 1.0))
}

pub fn limit_constant(gamma: f64, delta: f64) -> Result<f64> {
    let r = regime_classify(gamma, delta)?;
    r.limit_constant.ok_or_else(|| crate::TheoryError::Domain(format!("gamma = {gamma}, delta = {delta} is not ultrasmall")))
}

pub fn regime_classify(gamma: f64, delta: f64) -> Result<RegimeReport> {
    if !(0.0..1.0).contains(&gamma) || !(delta > 1.0) || !delta.is_finite() {
        return domain(format!("need 0 <= gamma < 1 and delta > 1 (got {gamma}, {delta})"));
    }
    let boundary = regime_boundary(delta)?;
    let regime = if (gamma - boundary).abs() <= 1e-12 {
        Regime::Boundary
    } else if gamma > boundary {
        Regime::Ultrasmall
    } else {
        Regime::NotUltrasmall
    };
    let limit_constant = (regime == Regime::Ultrasmall).then(|| 4.0 / (gamma / (delta * (1.0 - gamma))).ln());
    Ok(RegimeReport { gamma, delta, boundary, regime, limit_constant })
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

fn check_irho(d: usize, delta: f64, kappa: f64) -> Result<()> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    if !(delta > 1.0) {
        return domain(format!("integral of the profile diverges for delta = {delta} <= 1"));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return domain(format!("kappa = {kappa} must be positive"));
    }
    Ok(())
}

/// `int_{R^d} rho(kappa^{-1/delta} |x|^d) dx = V_d kappa^{1/delta} delta / (delta - 1)`.
pub fn i_rho(d: usize, delta: f64, kappa: f64) -> Result<f64> {
    check_irho(d, delta, kappa)?;
    Ok(unit_ball_volume(d) * kappa.powf(1.0 / delta) * delta / (delta - 1.0))
}

/// The same integral in radial form, by quadrature. Used to cross-check the closed form.
pub fn i_rho_quadrature(d: usize, delta: f64, kappa: f64) -> Result<f64> {
    check_irho(d, delta, kappa)?;
    let df = d as f64;
    let knee = kappa.powf(1.0 / (delta * df));
    let shell = d as f64 * unit_ball_volume(d);
    let f = |r: f64| {
        let x = kappa.powf(-1.0 / delta) * r.powi(d as i32);
        shell * r.powi(d as i32 - 1) * if x <= 1.0 { 1.0 } else { x.powf(-delta) }
    };
    Ok(quad::integrate(f, 0.0, knee, 1e-12) + quad::integrate_upper_tail(f, knee, knee, 1e-12))
}
