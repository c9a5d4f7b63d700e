//! Integrals over a connector `z = (position, mark u)` with `u` above both
//! endpoint marks, of products of two profile factors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{domain, quad, regime, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub gamma: f64,
    pub delta: f64,
    pub kappa: f64,
    pub dimension: usize,
}

/// Two endpoints with marks `t`, `s` at Euclidean distance `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Context {
    pub t: f64,
    pub s: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { samples: 1_000_000, seed: 0 }
    }
}

/// Largest dimension handled by the integral checks.
pub const MAX_DIM: usize = 3;
pub(crate) const QUAD_REL: f64 = 1e-10;
const CHUNKS: u64 = 64;

impl TheoryParams {
    pub fn new(gamma: f64, delta: f64, kappa: f64, dimension: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) || !(delta > 1.0 && delta.is_finite()) || !(kappa > 0.0 && kappa.is_finite()) {
            return domain(format!("need 0 < gamma < 1, delta > 1, kappa > 0 (got {gamma}, {delta}, {kappa})"));
        }
        if dimension == 0 || dimension > MAX_DIM {
            return domain(format!("dimension {dimension} outside 1..={MAX_DIM}"));
        }
        Ok(TheoryParams { gamma, delta, kappa, dimension })
    }

    pub fn is_ultrasmall(&self) -> bool {
        self.gamma > self.delta / (self.delta + 1.0)
    }

    pub(crate) fn require_ultrasmall(&self) -> Result<()> {
        if self.is_ultrasmall() {
            Ok(())
        } else {
            domain(format!("gamma = {} must exceed delta / (delta + 1) = {}", self.gamma, self.delta / (self.delta + 1.0)))
        }
    }

    #[inline]
    pub fn rho(&self, x: f64) -> f64 {
        if x <= 1.0 {
            1.0
        } else {
            x.powf(-self.delta)
        }
    }

    pub fn i_rho(&self) -> f64 {
        regime::i_rho(self.dimension, self.delta, self.kappa).expect("validated parameters")
    }

    /// `kappa^{-1/delta} m^gamma u^e`.
    #[inline]
    pub(crate) fn scale(&self, m: f64, u: f64, e: f64) -> f64 {
        self.kappa.powf(-1.0 / self.delta) * m.powf(self.gamma) * u.powf(e)
    }

    /// Pairs with `r^d` at most this are joined directly in the augmented graph.
    pub fn near_threshold(&self, t: f64, s: f64) -> f64 {
        let (lo, hi) = (t.min(s), t.max(s));
        self.kappa.powf(1.0 / self.delta) * lo.powf(-self.gamma) * hi.powf(-self.gamma / self.delta)
    }

    /// `kappa (t ^ s)^{-gamma delta} (t v s)^{-gamma} r^{-d delta}`.
    pub fn envelope(&self, c: &Context) -> f64 {
        let (lo, hi) = (c.t.min(c.s), c.t.max(c.s));
        self.kappa * lo.powf(-self.gamma * self.delta) * hi.powf(-self.gamma) * c.r.powf(-(self.dimension as f64) * self.delta)
    }

    /// `rho(kappa^{-1/delta} (t ^ s)^gamma (t v s)^{gamma/delta} r^d)`; equals
    /// [`envelope`](Self::envelope) beyond the near threshold and 1 inside it.
    pub fn far_profile(&self, c: &Context) -> f64 {
        let (lo, hi) = (c.t.min(c.s), c.t.max(c.s));
        self.rho(self.scale(lo, hi, self.gamma / self.delta) * c.r.powi(self.dimension as i32))
    }

    pub(crate) fn validate_context(&self, c: &Context) -> Result<()> {
        if !(c.t > 0.0 && c.t <= 1.0 && c.s > 0.0 && c.s <= 1.0 && c.r > 0.0 && c.r.is_finite()) {
            return domain(format!("context needs marks in (0,1] and r > 0 (got {c:?})"));
        }
        Ok(())
    }
}

/// Exponents of `u` in the two factors `rho(kappa^{-1/delta} t^gamma u^{e1} |x - z|^d)`
/// and `rho(kappa^{-1/delta} s^gamma u^{e2} |y - z|^d)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairIntegrand {
    pub e1: f64,
    pub e2: f64,
}

/// Breakpoints on `[lo, hi]` refined geometrically towards both ends, where
/// the profile factors decay on the length scale `h`.
fn graded(lo: f64, hi: f64, h: f64, out: &mut Vec<f64>) {
    out.push(lo);
    let half = 0.5 * (hi - lo);
    let mut step = h;
    let mut right = Vec::new();
    while step < half {
        out.push(lo + step);
        right.push(hi - step);
        step *= 16.0;
    }
    out.extend(right.into_iter().rev());
}

fn inner_1d(p: &TheoryParams, a: f64, b: f64, r: f64) -> f64 {
    let f = |z: f64| p.rho(a * z.abs()) * p.rho(b * (z - r).abs());
    let scale = (1.0 / a).max(1.0 / b).max(r);
    let h = (1.0 / a).min(1.0 / b);
    let mut kinks = vec![0.0, r, -1.0 / a, 1.0 / a, r - 1.0 / b, r + 1.0 / b];
    kinks.sort_by(f64::total_cmp);
    // one more finite piece on each side keeps the short decay lengths away
    // from the tail maps
    kinks.insert(0, kinks[0] - scale);
    kinks.push(kinks[kinks.len() - 1] + scale);
    kinks.dedup();
    let mut br = Vec::with_capacity(64);
    for w in kinks.windows(2) {
        graded(w[0], w[1], h, &mut br);
    }
    br.push(kinks[kinks.len() - 1]);
    let (lo, hi) = (br[0], br[br.len() - 1]);
    quad::integrate_pieces(f, &br, QUAD_REL)
        + quad::integrate_lower_tail(f, lo, -lo, QUAD_REL)
        + quad::integrate_upper_tail(f, hi, hi, QUAD_REL)
}

impl PairIntegrand {
    /// `int_{lo}^1 du int_R dz ...` in one dimension, by nested quadrature in `log u`.
    pub fn quadrature_1d(&self, p: &TheoryParams, c: &Context, lo: f64) -> f64 {
        debug_assert_eq!(p.dimension, 1);
        let f = |w: f64| {
            let u = w.exp();
            u * inner_1d(p, p.scale(c.t, u, self.e1), p.scale(c.s, u, self.e2), c.r)
        };
        quad::integrate(f, lo.ln(), 0.0, QUAD_REL)
    }

    pub fn monte_carlo(&self, p: &TheoryParams, c: &Context, lo: f64, mc: &McOptions) -> (f64, f64) {
        let x = Pt { pos: [0.0; 3], mark: c.t };
        let y = Pt { pos: [c.r, 0.0, 0.0], mark: c.s };
        mc_mean(mc, |rng| {
            let (u, z, w) = sample_connector(p, rng, &x, &y, lo, self.e1, self.e2);
            let a = p.scale(c.t, u, self.e1) * dist_pow(p.dimension, &x.pos, &z);
            let b = p.scale(c.s, u, self.e2) * dist_pow(p.dimension, &y.pos, &z);
            w * p.rho(a) * p.rho(b)
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Pt {
    pub pos: [f64; 3],
    pub mark: f64,
}

#[inline]
pub(crate) fn dist_pow(d: usize, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for k in 0..d {
        let x = a[k] - b[k];
        s += x * x;
    }
    s.powf(d as f64 / 2.0)
}

/// Draws `v` with density proportional to `min(1, (A v)^-delta)` on `(0, inf)`.
fn draw_radius_pow<R: Rng>(rng: &mut R, delta: f64, a: f64) -> f64 {
    let m = delta / (delta - 1.0);
    let q = rng.random::<f64>() * m;
    let w = if q <= 1.0 { q } else { (1.0 - (q - 1.0) * (delta - 1.0)).powf(1.0 / (1.0 - delta)) };
    w / a
}

fn draw_direction<R: Rng>(rng: &mut R, d: usize) -> [f64; 3] {
    if d == 1 {
        return [if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0, 0.0];
    }
    loop {
        let mut v = [0.0; 3];
        let mut n = 0.0f64;
        for x in v.iter_mut().take(d) {
            *x = rng.sample(StandardNormal);
            n += *x * *x;
        }
        if n > 1e-300 {
            let n = n.sqrt();
            for x in v.iter_mut().take(d) {
                *x /= n;
            }
            return v;
        }
    }
}

/// Samples a connector for the endpoints `x`, `y` and returns `(u, z, weight)`
/// with `E[weight g(u, z)] = int_{lo}^1 du int dz g`. The mark is log-uniform
/// and the position comes from an equal mixture of profile-shaped densities
/// around the two endpoints, with `u`-exponents `e1`, `e2`.
pub(crate) fn sample_connector<R: Rng>(p: &TheoryParams, rng: &mut R, x: &Pt, y: &Pt, lo: f64, e1: f64, e2: f64) -> (f64, [f64; 3], f64) {
    let d = p.dimension;
    let span = -lo.ln();
    let u = (-span * rng.random::<f64>()).exp();
    let (a1, a2) = (p.scale(x.mark, u, e1), p.scale(y.mark, u, e2));
    let (centre, a) = if rng.random::<bool>() { (&x.pos, a1) } else { (&y.pos, a2) };
    let v = draw_radius_pow(rng, p.delta, a);
    let dir = draw_direction(rng, d);
    let len = v.powf(1.0 / d as f64);
    let mut z = [0.0; 3];
    for k in 0..d {
        z[k] = centre[k] + len * dir[k];
    }
    let norm = regime::unit_ball_volume(d) * p.delta / (p.delta - 1.0);
    let h1 = p.rho(a1 * dist_pow(d, &x.pos, &z)) * a1 / norm;
    let h2 = p.rho(a2 * dist_pow(d, &y.pos, &z)) * a2 / norm;
    (u, z, span * u / (0.5 * (h1 + h2)))
}

/// Mean and standard error of `draw` over `mc.samples` draws, split into fixed
/// seeded chunks so the result does not depend on the thread count.
pub(crate) fn mc_mean<F>(mc: &McOptions, draw: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let n = mc.samples.max(2);
    let per = n.div_ceil(CHUNKS);
    let parts: Vec<(f64, f64, u64)> = (0..CHUNKS)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(k);
            let m = per.min(n.saturating_sub(k * per));
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..m {
                let v = draw(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2, m)
        })
        .collect();
    let (s, s2, m) = parts.iter().fold((0.0, 0.0, 0u64), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let mean = s / m as f64;
    let var = (s2 / m as f64 - mean * mean).max(0.0) * m as f64 / (m as f64 - 1.0);
    (mean, (var / m as f64).sqrt())
}

/// `int_{lo}^1 du int dz rho(kappa^{-1/delta} t^gamma u^{e1} |x-z|^d) rho(kappa^{-1/delta} s^gamma u^{e2} |y-z|^d)`
/// with `lo = t v s`, by quadrature (one dimension only) or Monte Carlo.
pub fn pair_integral(p: &TheoryParams, c: &Context, e1: f64, e2: f64, quadrature: bool, mc: &McOptions) -> Result<(f64, Option<f64>)> {
    p.validate_context(c)?;
    let ig = PairIntegrand { e1, e2 };
    let lo = c.t.max(c.s);
    if quadrature {
        if p.dimension != 1 {
            return domain("quadrature is available in one dimension only");
        }
        Ok((ig.quadrature_1d(p, c, lo), None))
    } else {
        let (m, se) = ig.monte_carlo(p, c, lo, mc);
        Ok((m, Some(se)))
    }
}
