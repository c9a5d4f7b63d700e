use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pair::PairIntegrand;
use crate::{Context, McOptions, Result, TheoryError, TheoryParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    TwoConnection,
    AppendixA1,
    AppendixA2,
    KConnection,
    NuBound,
    BetaAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Appendix {
    A1,
    A2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

/// Relative slack allowed for deterministic left-hand sides.
pub const QUAD_SLACK: f64 = 1e-6;
/// Standard errors allowed for Monte Carlo left-hand sides.
pub const MC_SIGMAS: f64 = 3.0;

/// One numerical comparison `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lemma: Lemma,
    pub params: TheoryParams,
    pub context: Context,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub method: Option<Method>,
    pub verdict: Verdict,
    pub pass: bool,
    pub tolerance: String,
}

impl BoundCheck {
    pub(crate) fn judge(
        lemma: Lemma,
        params: TheoryParams,
        context: Context,
        lhs: f64,
        stderr: Option<f64>,
        rhs: f64,
        method: Method,
    ) -> Self {
        let (ok, tolerance) = match stderr {
            Some(se) => (lhs <= rhs + MC_SIGMAS * se, format!("lhs <= rhs + {MC_SIGMAS} stderr")),
            None => (lhs <= rhs * (1.0 + QUAD_SLACK), format!("lhs <= rhs (1 + {QUAD_SLACK:e})")),
        };
        let ok = ok && lhs.is_finite() && rhs.is_finite();
        BoundCheck {
            lemma,
            params,
            context,
            ell: None,
            k: None,
            lhs: Some(lhs),
            rhs: Some(rhs),
            stderr,
            method: Some(method),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            pass: ok,
            tolerance,
        }
    }

    pub(crate) fn inapplicable(lemma: Lemma, params: TheoryParams, context: Context, why: String) -> Self {
        BoundCheck {
            lemma,
            params,
            context,
            ell: None,
            k: None,
            lhs: None,
            rhs: None,
            stderr: None,
            method: None,
            verdict: Verdict::Inapplicable,
            pass: false,
            tolerance: why,
        }
    }

    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// `I_rho 2^{d delta + 1} / (gamma - (1 - gamma) delta)`.
pub fn two_connection_constant(p: &TheoryParams) -> f64 {
    p.i_rho() * 2f64.powf(p.dimension as f64 * p.delta + 1.0) / (p.gamma - (1.0 - p.gamma) * p.delta)
}

pub fn appendix_constant(p: &TheoryParams, which: Appendix) -> f64 {
    let base = p.i_rho() * 2f64.powf(p.dimension as f64 * p.delta + 1.0);
    let excess = p.gamma + p.gamma / p.delta - 1.0;
    match which {
        Appendix::A1 => (base / excess).max(1.0),
        Appendix::A2 => base / ((p.delta - 1.0) * excess).min(1.0),
    }
}

/// A constant dominating the three above and 1.
pub fn k_connection_constant(p: &TheoryParams) -> f64 {
    two_connection_constant(p)
        .max(appendix_constant(p, Appendix::A1))
        .max(appendix_constant(p, Appendix::A2))
        .max(1.0)
}

fn lhs_of(p: &TheoryParams, c: &Context, ig: PairIntegrand, mc: &McOptions) -> (f64, Option<f64>, Method) {
    let lo = c.t.max(c.s);
    if p.dimension == 1 {
        (ig.quadrature_1d(p, c, lo), None, Method::Quadrature)
    } else {
        let (m, se) = ig.monte_carlo(p, c, lo, mc);
        (m, Some(se), Method::MonteCarlo)
    }
}

/// Expected number of connectors between two far-apart vertices against its
/// closed-form bound. Exact quadrature in one dimension, Monte Carlo otherwise.
pub fn two_connection_bound_check(p: &TheoryParams, c: &Context, mc: &McOptions) -> Result<BoundCheck> {
    p.validate_context(c)?;
    p.require_ultrasmall()?;
    let rd = c.r.powi(p.dimension as i32);
    let near = p.near_threshold(c.t, c.s);
    if rd <= near {
        return Ok(BoundCheck::inapplicable(
            Lemma::TwoConnection,
            *p,
            *c,
            format!("r^d = {rd} does not exceed the near threshold {near}"),
        ));
    }
    let ig = PairIntegrand { e1: 1.0 - p.gamma, e2: 1.0 - p.gamma };
    let (lhs, se, method) = lhs_of(p, c, ig, mc);
    let rhs = two_connection_constant(p) * p.envelope(c);
    Ok(BoundCheck::judge(Lemma::TwoConnection, *p, *c, lhs, se, rhs, method))
}

pub(crate) fn check_ell(c: &Context, ell: f64) -> Result<()> {
    let cap = (1.0 / E).min(c.t.max(c.s));
    if !(ell > 0.0 && ell < cap) {
        return Err(TheoryError::Precondition(format!("ell = {ell} must lie in (0, {cap})")));
    }
    Ok(())
}

pub fn appendix_bound_check(which: Appendix, p: &TheoryParams, c: &Context, ell: f64, mc: &McOptions) -> Result<BoundCheck> {
    p.validate_context(c)?;
    p.require_ultrasmall()?;
    check_ell(c, ell)?;
    let (g, gd) = (p.gamma, p.gamma / p.delta);
    let (ig, factor, lemma) = match which {
        Appendix::A1 => (PairIntegrand { e1: gd, e2: gd }, ell.powf(1.0 - g - gd), Lemma::AppendixA1),
        Appendix::A2 => (PairIntegrand { e1: gd, e2: 1.0 - g }, (1.0 / ell).ln(), Lemma::AppendixA2),
    };
    let (lhs, se, method) = lhs_of(p, c, ig, mc);
    let rhs = appendix_constant(p, which) * factor * p.envelope(c);
    let mut out = BoundCheck::judge(lemma, *p, *c, lhs, se, rhs, method);
    out.ell = Some(ell);
    Ok(out)
}

/// Draws random parameters and contexts satisfying the lemma hypotheses:
/// ultrasmall `(gamma, delta)`, far-apart endpoints and an admissible `ell`.
#[derive(Debug, Clone)]
pub struct AdmissibleSampler {
    rng: ChaCha8Rng,
    dimension: usize,
}

impl AdmissibleSampler {
    pub fn new(seed: u64, dimension: usize) -> Self {
        AdmissibleSampler { rng: ChaCha8Rng::seed_from_u64(seed), dimension }
    }

    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * self.rng.random::<f64>()).exp()
    }

    pub fn draw(&mut self) -> (TheoryParams, Context, f64) {
        let delta = self.rng.random_range(1.1..3.0);
        let b = delta / (delta + 1.0);
        let gamma = self.rng.random_range(b + 0.02..0.97);
        let kappa = self.log_uniform(0.25, 4.0);
        let p = TheoryParams::new(gamma, delta, kappa, self.dimension).expect("sampled inside the domain");
        let t = self.log_uniform(1e-3, 0.5);
        let s = self.log_uniform(1e-3, 0.5);
        let far = self.log_uniform(1.05, 1e3);
        let r = (far * p.near_threshold(t, s)).powf(1.0 / self.dimension as f64);
        let ell = self.log_uniform(1e-6, 0.999 * (1.0 / E).min(t.max(s)));
        (p, Context { t, s, r }, ell)
    }
}
