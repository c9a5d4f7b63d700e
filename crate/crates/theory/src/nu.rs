//! Mark-only path weights `nu_n(s)` and their two-term bounds
//! `alpha_n s^{-gamma} + beta_n s^{gamma-1}`, kept in log space.

use serde::{Deserialize, Serialize};

use crate::lemmas::QUAD_SLACK;
use crate::pair::QUAD_REL;
use crate::{domain, log_add, quad, Regime, Result, TruncationSequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuReport {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub kappa_tilde: f64,
    pub t: f64,
    pub gamma: f64,
    /// Recursion constant `kappa_tilde max(1, 1/(2 gamma - 1))`.
    pub c: f64,
    /// `1 / c^2`, from `beta_n <= alpha_{n+1} / c`.
    pub c2: f64,
    /// `log alpha_n`, `log beta_n` for `n = 1..=n_max+1` at index `n - 1`.
    pub log_alpha: Vec<f64>,
    pub log_beta: Vec<f64>,
    /// `log(alpha_{n+1}^2 ell_{n+1}^{1-2 gamma})` for `n = 1..=n_max` at index `n - 1`.
    pub log_summands: Vec<f64>,
    pub increasing: bool,
    /// First `n` with `beta_n^2 > c2 alpha_{n+1}^2 ell_{n+1}^{1-2 gamma}`.
    pub cross_violation: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuCheck {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl NuReport {
    pub fn alpha(&self, n: usize) -> f64 {
        self.log_alpha[n - 1].exp()
    }

    pub fn beta(&self, n: usize) -> f64 {
        self.log_beta[n - 1].exp()
    }

    pub fn bound(&self, n: usize, s: f64) -> f64 {
        self.alpha(n) * s.powf(-self.gamma) + self.beta(n) * s.powf(self.gamma - 1.0)
    }

    pub fn all_pass(&self) -> bool {
        self.applicable && self.increasing && self.cross_violation.is_none()
    }

    /// Direct quadrature of `nu_2(s)` against the `n = 2` bound.
    pub fn check_nu2(&self, trunc: &TruncationSequence, s: f64) -> Result<NuCheck> {
        let lhs = nu2_direct(trunc, self.kappa_tilde, self.t, s)?;
        let rhs = self.bound(2, s);
        Ok(NuCheck { s, lhs, rhs, pass: lhs <= rhs * (1.0 + QUAD_SLACK) })
    }
}

fn profile(kt: f64, g: f64, a: f64, b: f64) -> f64 {
    kt * a.min(b).powf(-g) * a.max(b).powf(g - 1.0)
}

/// `nu_2(s) = int_{ell_1}^1 du nu_1(u) kt (u ^ s)^{-gamma} (u v s)^{gamma-1}`
/// with `nu_1(u) = kt (t ^ u)^{-gamma} (t v u)^{gamma-1}`.
pub fn nu2_direct(trunc: &TruncationSequence, kappa_tilde: f64, t: f64, s: f64) -> Result<f64> {
    if trunc.is_empty() {
        return domain("truncation sequence has no ell_1");
    }
    if !(t > 0.0 && t <= 1.0 && s > 0.0 && s < 1.0 && kappa_tilde > 0.0) {
        return domain(format!("need t in (0,1], s in (0,1), kappa_tilde > 0 (got {t}, {s}, {kappa_tilde})"));
    }
    let g = trunc.gamma;
    let lo = trunc.log_ell(1);
    let mut br: Vec<f64> = vec![lo, 0.0, t.ln(), s.ln()].into_iter().filter(|&w| w >= lo && w <= 0.0).collect();
    br.sort_by(f64::total_cmp);
    br.dedup();
    let f = |w: f64| {
        let u = w.exp();
        u * profile(kappa_tilde, g, t, u) * profile(kappa_tilde, g, u, s)
    };
    Ok(quad::integrate_pieces(f, &br, QUAD_REL))
}

/// `alpha_{n+1} = c(alpha_n log(1/ell_n) + beta_n)`,
/// `beta_{n+1} = c(alpha_n ell_n^{1-2 gamma} + beta_n log(1/ell_n))`,
/// from `alpha_1 = kt t^{gamma-1}`, `beta_1 = kt t^{-gamma}`.
pub fn nu_alpha_beta(trunc: &TruncationSequence, kappa_tilde: f64, t: f64, n_max: usize) -> Result<NuReport> {
    if trunc.regime != Regime::Ultrasmall {
        return domain("the alpha/beta recursion needs an ultrasmall truncation sequence");
    }
    if !(kappa_tilde > 0.0 && kappa_tilde.is_finite() && t > 0.0 && t <= 1.0) {
        return domain(format!("need kappa_tilde > 0 and t in (0,1] (got {kappa_tilde}, {t})"));
    }
    if n_max == 0 || n_max + 1 > trunc.len() {
        return domain(format!("n_max = {n_max} needs ell up to index {} but only {} are available", n_max + 1, trunc.len()));
    }
    let g = trunc.gamma;
    let mut report = NuReport {
        applicable: g > 0.5,
        note: None,
        kappa_tilde,
        t,
        gamma: g,
        c: f64::NAN,
        c2: f64::NAN,
        log_alpha: Vec::new(),
        log_beta: Vec::new(),
        log_summands: Vec::new(),
        increasing: false,
        cross_violation: None,
    };
    if !report.applicable {
        report.note = Some(format!("gamma = {g} <= 1/2: the 1/(2 gamma - 1) factors are undefined"));
        report.c = 0.0;
        report.c2 = 0.0;
        return Ok(report);
    }
    let c = kappa_tilde * (1.0 / (2.0 * g - 1.0)).max(1.0);
    let lc = c.ln();
    let mut la = vec![kappa_tilde.ln() + (g - 1.0) * t.ln()];
    let mut lb = vec![kappa_tilde.ln() - g * t.ln()];
    for n in 1..=n_max {
        let l = trunc.log_ell(n);
        let ll = (-l).ln();
        la.push(lc + log_add(la[n - 1] + ll, lb[n - 1]));
        lb.push(lc + log_add(la[n - 1] + (1.0 - 2.0 * g) * l, lb[n - 1] + ll));
    }
    let c2 = 1.0 / (c * c);
    let summands: Vec<f64> = (1..=n_max).map(|n| 2.0 * la[n] + (1.0 - 2.0 * g) * trunc.log_ell(n + 1)).collect();
    let cross_violation = (1..=n_max).find(|&n| {
        let lhs = 2.0 * lb[n - 1];
        let rhs = c2.ln() + summands[n - 1];
        lhs > rhs + 1e-12 * lhs.abs().max(rhs.abs()).max(1.0)
    });
    report.increasing = la.windows(2).all(|w| w[1] > w[0]) && lb.windows(2).all(|w| w[1] > w[0]);
    report.c = c;
    report.c2 = c2;
    report.log_alpha = la;
    report.log_beta = lb;
    report.log_summands = summands;
    report.cross_violation = cross_violation;
    Ok(report)
}
