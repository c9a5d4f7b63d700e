//! Mark thresholds `ell_n` for good paths, run entirely in log space since
//! `eta_n = 1 / ell_n` grows doubly exponentially in the ultrasmall regime.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::{domain, log_add, ols_slope, Regime, Result};

/// Largest accepted `n_max`.
pub const MAX_N: usize = 100_000;
/// Relative tolerance for the normalisation replay.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Fitted envelope for `log eta_n`. In the ultrasmall regime the envelope is
/// `log b + B rho^{n/2}`; otherwise `n log^p(n+1) log B` with `log b = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub log_b: f64,
    pub big_b: f64,
    /// Indices `1..=fit_until` were used for the fit.
    pub fit_until: usize,
    pub holds_on_rest: bool,
    /// First index beyond the fit where the envelope is exceeded.
    pub first_violation: Option<usize>,
    /// Largest value of the normalised ratio over all indices.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSummary {
    pub monotone: bool,
    /// Largest normalisation residual, relative to the magnitude of the log terms.
    pub max_normalization_error: f64,
    pub normalization_ok: bool,
    /// `max ell_{n+2} / ell_n`.
    pub decay_ratio: f64,
    /// `sum_{j >= 2} b^{(gamma + gamma/delta - 1)(j-3)(j-1)/8}` for `b = decay_ratio`;
    /// absent outside the ultrasmall regime or when the series diverges.
    pub c_b: Option<f64>,
    /// Target rate `gamma / (delta (1 - gamma))` and the fitted `exp(slope)` of
    /// `log log eta_n` against `n / 2` (ultrasmall only).
    pub rate_target: Option<f64>,
    pub rate_fit: Option<f64>,
    pub growth: GrowthFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSequence {
    pub regime: Regime,
    pub epsilon: f64,
    pub c: f64,
    pub gamma: f64,
    pub delta: f64,
    pub ell0: f64,
    pub p: Option<f64>,
    /// `log eta_n` for `n = 0..=len`.
    pub log_eta: Vec<f64>,
    /// `log C_n` for `n = 1..=len`, stored at index `n - 1`.
    pub log_c: Vec<f64>,
    /// Set when the recursion left the representable range before `n_max`.
    pub truncated: bool,
    pub summary: TruncationSummary,
}

impl TruncationSequence {
    /// Largest computed index.
    pub fn len(&self) -> usize {
        self.log_c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_c.is_empty()
    }

    pub fn log_ell(&self, n: usize) -> f64 {
        -self.log_eta[n]
    }

    /// May underflow to zero for large `n`.
    pub fn ell(&self, n: usize) -> f64 {
        (-self.log_eta[n]).exp()
    }

    pub fn log_c(&self, n: usize) -> f64 {
        self.log_c[n - 1]
    }

    /// `log(eps / (pi^2 n^2))` minus `log((1/(1-gamma)) C_n ell_n^{1-gamma})`,
    /// scaled by the size of the log terms.
    pub fn normalization_error(&self, n: usize) -> f64 {
        let g = self.gamma;
        let lhs = self.log_c(n) + (1.0 - g) * self.log_ell(n) - (1.0 - g).ln();
        let rhs = target(self.epsilon, n);
        let scale = self.log_c(n).abs().max(((1.0 - g) * self.log_ell(n)).abs()).max(1.0);
        (lhs - rhs).abs() / scale
    }
}

fn target(eps: f64, n: usize) -> f64 {
    (eps / (PI * PI * (n * n) as f64)).ln()
}

/// `log ell_n` from the normalisation `C_n ell_n^{1-gamma} / (1-gamma) = eps / (pi^2 n^2)`.
fn solve_ell(eps: f64, gamma: f64, n: usize, log_c: f64) -> f64 {
    (target(eps, n) + (1.0 - gamma).ln() - log_c) / (1.0 - gamma)
}

fn check_common(epsilon: f64, c: f64, gamma: f64, delta: f64, ell0: f64, n_max: usize) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) || !(delta > 1.0 && delta.is_finite()) {
        return domain(format!("need 0 < gamma < 1 and delta > 1 (got {gamma}, {delta})"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite() && c > 0.0 && c.is_finite()) {
        return domain(format!("need epsilon, c > 0 (got {epsilon}, {c})"));
    }
    if !(ell0 > 0.0 && ell0 < 1.0 / E) {
        return domain(format!("ell0 = {ell0} must lie in (0, 1/e)"));
    }
    if n_max == 0 || n_max > MAX_N {
        return domain(format!("n_max = {n_max} outside 1..={MAX_N}"));
    }
    Ok(())
}

/// Recursion `C_{n+2} = c^2 ell_n^{1-gamma-gamma/delta} C_n + c log(1/ell_{n+1}) C_{n+1}`
/// with `C_1 = c ell_0^{gamma-1}` and `C_2 = c^2 ell_0^{-gamma/delta} + c log(1/ell_1) C_1`.
pub fn truncation_ultrasmall(epsilon: f64, c: f64, gamma: f64, delta: f64, ell0: f64, n_max: usize) -> Result<TruncationSequence> {
    check_common(epsilon, c, gamma, delta, ell0, n_max)?;
    if gamma <= delta / (delta + 1.0) {
        return domain(format!("gamma = {gamma} must exceed delta / (delta + 1) = {}", delta / (delta + 1.0)));
    }
    let lc = c.ln();
    let gd = gamma / delta;
    let mut log_ell = vec![ell0.ln()];
    let mut log_c: Vec<f64> = Vec::with_capacity(n_max);
    let mut truncated = false;
    for n in 1..=n_max {
        let next = match n {
            1 => lc + (gamma - 1.0) * log_ell[0],
            2 => log_add(2.0 * lc - gd * log_ell[0], lc + (-log_ell[1]).ln() + log_c[0]),
            _ => {
                let m = n - 2;
                log_add(
                    2.0 * lc + (1.0 - gamma - gd) * log_ell[m] + log_c[m - 1],
                    lc + (-log_ell[m + 1]).ln() + log_c[m],
                )
            }
        };
        let l = solve_ell(epsilon, gamma, n, next);
        if !next.is_finite() || !l.is_finite() {
            truncated = true;
            break;
        }
        log_c.push(next);
        log_ell.push(l);
    }
    let rho = gamma / (delta * (1.0 - gamma));
    let log_eta: Vec<f64> = log_ell.iter().map(|l| -l).collect();
    let growth = fit_growth(&log_eta, |n| rho.powf(n as f64 / 2.0));
    Ok(finish(Regime::Ultrasmall, epsilon, c, gamma, delta, ell0, None, log_eta, log_c, truncated, growth, Some(rho)))
}

/// Recursion `C_{n+1} = c log(1/ell_n) C_n` with `C_1 = c ell_0^{gamma-1}`;
/// the envelope `eta_n <= B^{n log^p(n+1)}` is fitted and checked.
pub fn truncation_small(epsilon: f64, c: f64, gamma: f64, delta: f64, ell0: f64, p: f64, n_max: usize) -> Result<TruncationSequence> {
    check_common(epsilon, c, gamma, delta, ell0, n_max)?;
    if gamma >= delta / (delta + 1.0) {
        return domain(format!("gamma = {gamma} must be below delta / (delta + 1) = {}", delta / (delta + 1.0)));
    }
    if !(p > 1.0 && p.is_finite()) {
        return domain(format!("p = {p} must exceed 1"));
    }
    let lc = c.ln();
    let mut log_ell = vec![ell0.ln()];
    let mut log_c: Vec<f64> = Vec::with_capacity(n_max);
    let mut truncated = false;
    for n in 1..=n_max {
        let next = if n == 1 {
            lc + (gamma - 1.0) * log_ell[0]
        } else {
            lc + (-log_ell[n - 1]).ln() + log_c[n - 2]
        };
        let l = solve_ell(epsilon, gamma, n, next);
        if !next.is_finite() || !l.is_finite() {
            truncated = true;
            break;
        }
        log_c.push(next);
        log_ell.push(l);
    }
    let log_eta: Vec<f64> = log_ell.iter().map(|l| -l).collect();
    let growth = fit_growth(&log_eta, |n| n as f64 * ((n + 1) as f64).ln().powf(p));
    Ok(finish(Regime::NotUltrasmall, epsilon, c, gamma, delta, ell0, Some(p), log_eta, log_c, truncated, growth, None))
}

/// Fits `log eta_n <= log b + B scale(n)` on the first half of the indices
/// and checks it on the rest. `B` is the largest ratio seen in the first half.
fn fit_growth(log_eta: &[f64], scale: impl Fn(usize) -> f64) -> GrowthFit {
    let n = log_eta.len() - 1;
    let half = (n / 2).max(1).min(n);
    let ratio = |k: usize| log_eta[k] / scale(k);
    let big_b = (1..=half).map(ratio).fold(f64::NEG_INFINITY, f64::max);
    let log_b = (1..=half).map(|k| log_eta[k] - big_b * scale(k)).fold(0.0, f64::max);
    let first_violation = (half + 1..=n).find(|&k| log_eta[k] > (log_b + big_b * scale(k)) * (1.0 + 1e-9));
    let max_ratio = (1..=n).map(ratio).fold(f64::NEG_INFINITY, f64::max);
    GrowthFit { log_b, big_b, fit_until: half, holds_on_rest: first_violation.is_none(), first_violation, max_ratio }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    regime: Regime,
    epsilon: f64,
    c: f64,
    gamma: f64,
    delta: f64,
    ell0: f64,
    p: Option<f64>,
    log_eta: Vec<f64>,
    log_c: Vec<f64>,
    truncated: bool,
    growth: GrowthFit,
    rho: Option<f64>,
) -> TruncationSequence {
    let monotone = log_eta.windows(2).all(|w| w[1] > w[0]);
    let decay_ratio = (0..log_eta.len().saturating_sub(2))
        .map(|n| (log_eta[n] - log_eta[n + 2]).exp())
        .fold(0.0, f64::max);
    let c_b = rho.and_then(|_| series_c_b(decay_ratio, gamma + gamma / delta - 1.0));
    let rate_fit = rho.and_then(|_| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = (1..log_eta.len())
            .filter(|&n| log_eta[n] > 0.0)
            .map(|n| (n as f64 / 2.0, log_eta[n].ln()))
            .unzip();
        (xs.len() >= 3).then(|| ols_slope(&xs, &ys).exp())
    });
    let mut seq = TruncationSequence {
        regime,
        epsilon,
        c,
        gamma,
        delta,
        ell0,
        p,
        log_eta,
        log_c,
        truncated,
        summary: TruncationSummary {
            monotone,
            max_normalization_error: 0.0,
            normalization_ok: true,
            decay_ratio,
            c_b,
            rate_target: rho,
            rate_fit,
            growth,
        },
    };
    let worst = (1..=seq.len()).map(|n| seq.normalization_error(n)).fold(0.0, f64::max);
    seq.summary.max_normalization_error = worst;
    seq.summary.normalization_ok = worst <= NORMALIZATION_TOL;
    seq
}

fn series_c_b(b: f64, excess: f64) -> Option<f64> {
    if !(b > 0.0 && b < 1.0) || excess <= 0.0 {
        return None;
    }
    let lb = b.ln();
    let mut sum = 0.0;
    for j in 2u64.. {
        let e = excess * ((j as f64 - 3.0) * (j as f64 - 1.0)) / 8.0;
        let term = (e * lb).exp();
        sum += term;
        if j > 3 && term < 1e-17 * sum {
            break;
        }
    }
    Some(sum)
}
