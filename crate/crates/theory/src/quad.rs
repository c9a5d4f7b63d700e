//! Adaptive bisection over the double-exponential rule of the `quadrature`
//! crate. An interval is accepted once its two halves agree with the whole.

use quadrature::double_exponential;

const MAX_DEPTH: u32 = 40;
/// Cap on bisections per call, so noisy integrands cannot blow up the tree.
const MAX_SPLITS: u32 = 4000;

fn de<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, target: f64) -> f64 {
    double_exponential::integrate(f, a, b, target).integral
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32, splits: &mut u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (de(f, a, m, 0.1 * tol), de(f, m, b, 0.1 * tol));
    let noise = 64.0 * f64::EPSILON * (l.abs() + r.abs());
    if (l + r - whole).abs() <= tol.max(noise) || depth == 0 || m <= a || m >= b || *splits >= MAX_SPLITS {
        return l + r;
    }
    *splits += 1;
    refine(f, a, m, l, 0.5 * tol, depth - 1, splits) + refine(f, m, b, r, 0.5 * tol, depth - 1, splits)
}

/// `int_a^b f` to relative accuracy `rel` (absolute floor `1e-300`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let out = double_exponential::integrate(&f, a, b, 1e-300);
    let whole = out.integral;
    if out.error_estimate <= 0.1 * rel * whole.abs() {
        return whole;
    }
    let mut splits = 0;
    refine(&f, a, b, whole, (rel * whole.abs()).max(1e-300), MAX_DEPTH, &mut splits)
}

/// Sum over consecutive sorted breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel: f64) -> f64 {
    breaks.windows(2).map(|w| integrate(&f, w[0], w[1], rel)).sum()
}

/// Exponent of the tail map; integrands decaying like `x^-q` with `q > 1`
/// become `v^{TAIL_POWER (q - 1) - 1}`, bounded for the tails met here.
const TAIL_POWER: i32 = 8;

/// `int_a^inf f` through `x = a + scale (v^-P - 1)`.
pub fn integrate_upper_tail<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, rel: f64) -> f64 {
    integrate(
        |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let w = v.powi(-TAIL_POWER);
            if !w.is_finite() {
                return 0.0;
            }
            scale * TAIL_POWER as f64 * w / v * f(a + scale * (w - 1.0))
        },
        0.0,
        1.0,
        rel,
    )
}

/// `int_-inf^b f`.
pub fn integrate_lower_tail<F: Fn(f64) -> f64>(f: F, b: f64, scale: f64, rel: f64) -> f64 {
    integrate_upper_tail(|x| f(-x), -b, scale, rel)
}
