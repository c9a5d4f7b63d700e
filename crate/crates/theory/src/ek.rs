//! Expected number of self-avoiding paths of `k` edges between two fixed
//! endpoints through vertices with marks above both endpoint marks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lemmas::{check_ell, k_connection_constant, two_connection_bound_check, BoundCheck, Lemma, Method};
use crate::pair::{dist_pow, mc_mean, sample_connector, Pt};
use crate::{Context, McOptions, Result, TheoryError, TheoryParams};

/// Largest path length estimated by nested Monte Carlo.
pub const MAX_K: usize = 6;

pub fn catalan(n: u32) -> u64 {
    let mut c: u64 = 1;
    for i in 0..n as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EkEntry {
    pub k: usize,
    pub value: f64,
    pub stderr: Option<f64>,
    pub method: Method,
    /// Comparison against the closed-form bound; absent for `k = 1`.
    pub check: Option<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EkReport {
    pub params: TheoryParams,
    pub context: Context,
    pub ell: f64,
    pub near: bool,
    pub constant: f64,
    pub entries: Vec<EkEntry>,
}

impl EkReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().filter_map(|e| e.check.as_ref()).all(|c| c.pass)
    }
}

/// `Cat(k-1) C^{k-1} ell^{(floor(k/2)-1)(1-gamma-gamma/delta)} log(1/ell)^{k mod 2}`
/// times the far profile of the endpoints.
pub fn e_k_bound(p: &TheoryParams, c: &Context, k: usize, ell: f64) -> f64 {
    let excess = 1.0 - p.gamma - p.gamma / p.delta;
    let cc = k_connection_constant(p);
    catalan(k as u32 - 1) as f64
        * cc.powi(k as i32 - 1)
        * ell.powf(((k / 2) as f64 - 1.0) * excess)
        * (1.0 / ell).ln().powi((k % 2) as i32)
        * p.far_profile(c)
}

fn exponent_for(p: &TheoryParams, i: usize) -> f64 {
    if i == 1 {
        1.0 - p.gamma
    } else {
        p.gamma / p.delta
    }
}

/// One unbiased draw of `e_k(x, y)`: the direct profile for one edge, the
/// near-pair convention for short pairs, otherwise a sum over the first split.
fn ek_sample<R: Rng>(p: &TheoryParams, rng: &mut R, k: usize, x: &Pt, y: &Pt) -> f64 {
    let rd = dist_pow(p.dimension, &x.pos, &y.pos);
    let (lo, hi) = (x.mark.min(y.mark), x.mark.max(y.mark));
    if k == 1 {
        return p.rho(p.scale(lo, hi, 1.0 - p.gamma) * rd);
    }
    if rd <= p.near_threshold(x.mark, y.mark) {
        return if k == 2 { 1.0 } else { 0.0 };
    }
    let mut total = 0.0;
    for i in 1..k {
        let (u, z, w) = sample_connector(p, rng, x, y, hi, exponent_for(p, i), exponent_for(p, k - i));
        let zp = Pt { pos: z, mark: u };
        let a = ek_sample(p, rng, i, x, &zp);
        if a == 0.0 {
            continue;
        }
        total += w * a * ek_sample(p, rng, k - i, &zp, y);
    }
    total
}

/// Values `e_1..e_{k_max}` for the given endpoints with their bounds.
pub fn e_k_recursion(p: &TheoryParams, c: &Context, k_max: usize, ell: f64, mc: &McOptions) -> Result<EkReport> {
    p.validate_context(c)?;
    p.require_ultrasmall()?;
    check_ell(c, ell)?;
    if k_max < 1 {
        return Err(TheoryError::Precondition("k_max must be at least 1".into()));
    }
    if k_max > MAX_K {
        return Err(TheoryError::TooExpensive(format!("k_max = {k_max} exceeds {MAX_K}")));
    }
    let rd = c.r.powi(p.dimension as i32);
    let near = rd <= p.near_threshold(c.t, c.s);
    let x = Pt { pos: [0.0; 3], mark: c.t };
    let y = Pt { pos: [c.r, 0.0, 0.0], mark: c.s };
    let mut entries = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (value, stderr, method) = if k == 1 || near {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (ek_sample(p, &mut rng, k, &x, &y), None, Method::Exact)
        } else if k == 2 && p.dimension == 1 {
            let lhs = two_connection_bound_check(p, c, mc)?.lhs.expect("far context");
            (lhs, None, Method::Quadrature)
        } else {
            let opts = McOptions { seed: mc.seed.wrapping_add(k as u64), ..*mc };
            let (m, se) = mc_mean(&opts, |rng| ek_sample(p, rng, k, &x, &y));
            (m, Some(se), Method::MonteCarlo)
        };
        let check = (k >= 2).then(|| {
            let mut b = BoundCheck::judge(Lemma::KConnection, *p, *c, value, stderr, e_k_bound(p, c, k, ell), method);
            b.ell = Some(ell);
            b.k = Some(k);
            b
        });
        entries.push(EkEntry { k, value, stderr, method, check });
    }
    Ok(EkReport { params: *p, context: *c, ell, near, constant: k_connection_constant(p), entries })
}
