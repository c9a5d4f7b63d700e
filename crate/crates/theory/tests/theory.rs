use std::f64::consts::{E, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;
use wdrcm_theory::*;

// ---------- independent oracles ----------

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn rho(delta: f64, x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else {
        x.powf(-delta)
    }
}

/// Brute-force Simpson version of the one-dimensional connector integral.
fn pair_oracle(g: f64, d: f64, k: f64, t: f64, s: f64, r: f64, e1: f64, e2: f64) -> f64 {
    let inner = |u: f64| {
        let a = k.powf(-1.0 / d) * t.powf(g) * u.powf(e1);
        let b = k.powf(-1.0 / d) * s.powf(g) * u.powf(e2);
        let f = |z: f64| rho(d, a * z.abs()) * rho(d, b * (z - r).abs());
        let mut br = vec![-1.0 / a, 0.0, 1.0 / a, r - 1.0 / b, r, r + 1.0 / b];
        br.sort_by(f64::total_cmp);
        let mid: f64 = br.windows(2).map(|w| simpson(f, w[0], w[1], 400)).sum();
        let sc = (1.0 / a).max(1.0 / b).max(r);
        let hi = br[5];
        let lo = br[0];
        let up = simpson(|v| if v <= 0.0 { 0.0 } else { sc / (v * v) * f(hi + sc * (1.0 - v) / v) }, 0.0, 1.0, 4000);
        let down = simpson(|v| if v <= 0.0 { 0.0 } else { sc / (v * v) * f(lo - sc * (1.0 - v) / v) }, 0.0, 1.0, 4000);
        mid + up + down
    };
    let lo = t.max(s).ln();
    simpson(|w| w.exp() * inner(w.exp()), lo, 0.0, 600)
}

/// Exact `nu_2(s)`: on each interval cut at `t` and `s` the integrand is a power of `u`.
fn nu2_oracle(g: f64, kt: f64, t: f64, s: f64, lo: f64) -> f64 {
    let mut cuts = vec![lo, t, s, 1.0];
    cuts.retain(|&c| c >= lo && c <= 1.0);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let m = 0.5 * (a + b);
        // exponent of u and constant factor on this interval
        let (p1, c1) = if m < t { (-g, t.powf(g - 1.0)) } else { (g - 1.0, t.powf(-g)) };
        let (p2, c2) = if m < s { (-g, s.powf(g - 1.0)) } else { (g - 1.0, s.powf(-g)) };
        let p = p1 + p2;
        let int = if (p + 1.0).abs() < 1e-14 { (b / a).ln() } else { (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0) };
        total += kt * kt * c1 * c2 * int;
    }
    total
}

/// Truncation recursion in ordinary floating point, valid while nothing overflows.
fn truncation_plain(eps: f64, c: f64, g: f64, d: f64, ell0: f64, n: usize) -> Vec<f64> {
    let target = |k: usize| eps * (1.0 - g) / (PI * PI * (k * k) as f64);
    let log_ell = |k: usize, cn: f64| (target(k).ln() - cn.ln()) / (1.0 - g);
    let mut cs = vec![f64::NAN, c * ell0.powf(g - 1.0)];
    let mut ls = vec![ell0.ln(), log_ell(1, cs[1])];
    for k in 2..=n {
        let cn = if k == 2 {
            c * c * ell0.powf(-g / d) + c * (-ls[1]) * cs[1]
        } else {
            c * c * ls[k - 2].mul_add(1.0 - g - g / d, 0.0).exp() * cs[k - 2] + c * (-ls[k - 1]) * cs[k - 1]
        };
        cs.push(cn);
        ls.push(log_ell(k, cn));
    }
    ls
}

// ---------- regime and I_rho ----------

#[test]
fn regime_examples() {
    assert_eq!(regime_boundary(1.0).unwrap(), 0.5);
    let r = regime_classify(0.8, 1.5).unwrap();
    assert_relative_eq!(r.boundary, 0.6, max_relative = 1e-15);
    assert_eq!(r.regime, Regime::Ultrasmall);
    assert_relative_eq!(r.limit_constant.unwrap(), 4.0 / (0.8f64 / 0.3).ln(), max_relative = 1e-14);
    assert!((r.limit_constant.unwrap() - 4.0782).abs() < 1e-4);
    let r = regime_classify(0.5, 2.0).unwrap();
    assert_eq!(r.regime, Regime::NotUltrasmall);
    assert!(r.limit_constant.is_none());
    assert_eq!(regime_classify(2.0 / 3.0, 2.0).unwrap().regime, Regime::Boundary);
    assert!(regime_classify(1.0, 2.0).is_err());
    assert!(regime_classify(0.5, 1.0).is_err());
    assert!(limit_constant(0.5, 2.0).is_err());
}

#[test]
fn boundary_increasing_and_below_one() {
    let mut prev = 0.0;
    for i in 1..200 {
        let b = regime_boundary(1.0 + 0.1 * i as f64).unwrap();
        assert!(b > prev && b < 1.0);
        prev = b;
    }
}

#[test]
fn i_rho_examples() {
    assert_relative_eq!(i_rho(1, 2.0, 1.0).unwrap(), 4.0, max_relative = 1e-13);
    for d in 1..=3 {
        for k in [0.3, 2.0, 7.0] {
            assert_relative_eq!(i_rho(d, 1.7, k).unwrap(), k.powf(1.0 / 1.7) * i_rho(d, 1.7, 1.0).unwrap(), max_relative = 1e-13);
        }
        let r = |delta: f64| i_rho(d, delta, 2.0).unwrap() / (unit_ball_volume(d) * 2f64.powf(1.0 / delta));
        let (a, b) = (r(10.0), r(100.0));
        assert!(a > b && b > 1.0 && b - 1.0 < 0.011);
    }
    assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-14);
    assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
    assert!(i_rho(1, 1.0, 1.0).is_err());
}

#[test]
fn i_rho_matches_quadrature_on_grid() {
    for d in 1..=3 {
        for delta in [1.2, 2.0, 5.0] {
            for kappa in [0.1, 1.0, 10.0] {
                let a = i_rho(d, delta, kappa).unwrap();
                let b = i_rho_quadrature(d, delta, kappa).unwrap();
                assert!((a / b - 1.0).abs() < 1e-8, "d={d} delta={delta} kappa={kappa}: {a} vs {b}");
            }
        }
    }
}

// ---------- integral lemmas ----------

#[test]
fn two_connection_example() {
    let p = TheoryParams::new(0.8, 1.5, 1.0, 1).unwrap();
    assert_relative_eq!(p.near_threshold(0.1, 0.1), 0.1f64.powf(-0.8) * 0.1f64.powf(-0.8 / 1.5), max_relative = 1e-14);
    let c = Context { t: 0.1, s: 0.1, r: 100.0 };
    let chk = two_connection_bound_check(&p, &c, &McOptions::default()).unwrap();
    assert_eq!(chk.verdict, Verdict::Pass);
    assert_eq!(chk.method, Some(Method::Quadrature));
    let lhs = chk.lhs.unwrap();
    assert_relative_eq!(lhs, 1.3366246371444059, max_relative = 1e-9);
    let oracle = pair_oracle(0.8, 1.5, 1.0, 0.1, 0.1, 100.0, 0.2, 0.2);
    assert_relative_eq!(lhs, oracle, max_relative = 1e-4);
    let cst = 6.0 * 2f64.powf(2.5) / (0.8 - 0.2 * 1.5);
    let env = 0.1f64.powf(-1.2) * 0.1f64.powf(-0.8) * 100f64.powf(-1.5);
    assert_relative_eq!(chk.rhs.unwrap(), cst * env, max_relative = 1e-12);

    let near = two_connection_bound_check(&p, &Context { r: 10.0, ..c }, &McOptions::default()).unwrap();
    assert_eq!(near.verdict, Verdict::Inapplicable);
    assert!(!near.is_failure());
}

#[test]
fn two_connection_rejects_small_gamma() {
    let p = TheoryParams::new(0.5, 2.0, 1.0, 1).unwrap();
    let c = Context { t: 0.1, s: 0.1, r: 1e3 };
    assert!(matches!(two_connection_bound_check(&p, &c, &McOptions::default()), Err(TheoryError::Domain(_))));
}

#[test]
fn appendix_a1_example() {
    let p = TheoryParams::new(0.85, 1.2, 1.0, 1).unwrap();
    let c = Context { t: 0.05, s: 0.05, r: 1e3 };
    let chk = appendix_bound_check(Appendix::A1, &p, &c, 0.01, &McOptions::default()).unwrap();
    assert!(chk.pass);
    assert_relative_eq!(chk.lhs.unwrap(), 6.7470404697259143, max_relative = 1e-9);
    let gd = 0.85 / 1.2;
    assert_relative_eq!(chk.lhs.unwrap(), pair_oracle(0.85, 1.2, 1.0, 0.05, 0.05, 1e3, gd, gd), max_relative = 1e-4);
    assert!(matches!(
        appendix_bound_check(Appendix::A1, &p, &c, 1.0 / E, &McOptions::default()),
        Err(TheoryError::Precondition(_))
    ));
    assert!(appendix_bound_check(Appendix::A2, &p, &c, 0.06, &McOptions::default()).is_err());
}

#[test]
fn appendix_a2_random_contexts() {
    let mut s = AdmissibleSampler::new(11, 1);
    for _ in 0..10 {
        let (p, c, ell) = s.draw();
        let chk = appendix_bound_check(Appendix::A2, &p, &c, ell, &McOptions::default()).unwrap();
        assert!(chk.pass, "{chk:?}");
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let p = TheoryParams::new(0.8, 1.5, 1.0, 1).unwrap();
    let mc = McOptions { samples: 200_000, seed: 3 };
    for (c, e1, e2) in [
        (Context { t: 0.1, s: 0.3, r: 100.0 }, 0.2, 0.2),
        (Context { t: 0.02, s: 0.05, r: 500.0 }, 0.8 / 1.5, 0.2),
    ] {
        let (q, _) = pair_integral(&p, &c, e1, e2, true, &mc).unwrap();
        let (m, se) = pair_integral(&p, &c, e1, e2, false, &mc).unwrap();
        let se = se.unwrap();
        assert!((q - m).abs() <= 4.0 * se, "{q} vs {m} +- {se}");
        assert!(se / m < 0.01);
    }
}

#[test]
fn monte_carlo_is_seeded() {
    let p = TheoryParams::new(0.8, 1.5, 1.0, 2).unwrap();
    let c = Context { t: 0.1, s: 0.2, r: 60.0 };
    let mc = McOptions { samples: 20_000, seed: 9 };
    let a = pair_integral(&p, &c, 0.2, 0.2, false, &mc).unwrap();
    let b = pair_integral(&p, &c, 0.2, 0.2, false, &mc).unwrap();
    assert_eq!(a, b);
    assert!(pair_integral(&p, &c, 0.2, 0.2, true, &mc).is_err());
}

#[test]
fn higher_dimensions_pass() {
    for d in 2..=3 {
        let mut s = AdmissibleSampler::new(5, d);
        let mc = McOptions { samples: 50_000, seed: 1 };
        for _ in 0..3 {
            let (p, c, ell) = s.draw();
            let a = two_connection_bound_check(&p, &c, &mc).unwrap();
            assert_eq!(a.method, Some(Method::MonteCarlo));
            assert!(a.pass && a.stderr.unwrap() > 0.0, "{a:?}");
            assert!(appendix_bound_check(Appendix::A1, &p, &c, ell, &mc).unwrap().pass);
        }
    }
}

// ---------- e_K ----------

#[test]
fn catalan_numbers() {
    let v: Vec<u64> = (0..8).map(catalan).collect();
    assert_eq!(v, [1, 1, 2, 5, 14, 42, 132, 429]);
    assert!((0..20).all(|k| catalan(k) <= 4u64.pow(k)));
}

#[test]
fn e_k_near_branch() {
    let p = TheoryParams::new(0.8, 1.5, 1.0, 2).unwrap();
    let c = Context { t: 0.1, s: 0.1, r: 2.0 };
    let rep = e_k_recursion(&p, &c, 5, 0.01, &McOptions::default()).unwrap();
    assert!(rep.near);
    let vals: Vec<f64> = rep.entries.iter().map(|e| e.value).collect();
    assert_eq!(vals, [1.0, 1.0, 0.0, 0.0, 0.0]);
    assert!(rep.all_pass());
}

#[test]
fn e_k_two_equals_two_connection() {
    let p = TheoryParams::new(0.8, 1.5, 1.0, 1).unwrap();
    let c = Context { t: 0.1, s: 0.1, r: 100.0 };
    let rep = e_k_recursion(&p, &c, 3, 0.01, &McOptions { samples: 100_000, seed: 2 }).unwrap();
    let two = two_connection_bound_check(&p, &c, &McOptions::default()).unwrap();
    assert_eq!(rep.entries[1].value, two.lhs.unwrap());
    assert_relative_eq!(rep.entries[0].value, rho(1.5, 0.1f64.powf(0.8) * 0.1f64.powf(0.2) * 100.0), max_relative = 1e-14);
    let k3 = &rep.entries[2];
    assert_eq!(k3.method, Method::MonteCarlo);
    assert!(k3.check.as_ref().unwrap().pass);
    assert_relative_eq!(
        k3.check.as_ref().unwrap().rhs.unwrap(),
        2.0 * rep.constant.powi(2) * (1.0f64 / 0.01).ln() * p.envelope(&c),
        max_relative = 1e-12
    );
}

#[test]
fn e_k_cost_guard() {
    let p = TheoryParams::new(0.8, 1.5, 1.0, 1).unwrap();
    let c = Context { t: 0.1, s: 0.1, r: 100.0 };
    assert!(matches!(e_k_recursion(&p, &c, 7, 0.01, &McOptions::default()), Err(TheoryError::TooExpensive(_))));
}

// ---------- truncation ----------

fn reference() -> TruncationSequence {
    truncation_ultrasmall(0.1, 10.0, 0.9, 1.1, 0.3, 60).unwrap()
}

#[test]
fn truncation_matches_plain_recursion() {
    let seq = reference();
    assert_relative_eq!(seq.log_ell(1), -93.17612331113534, max_relative = 1e-13);
    let plain = truncation_plain(0.1, 10.0, 0.9, 1.1, 0.3, 4);
    for (n, l) in plain.iter().enumerate() {
        assert_relative_eq!(seq.log_ell(n), *l, max_relative = 1e-12);
    }
}

#[test]
fn truncation_ultrasmall_rate() {
    let seq = reference();
    assert_eq!(seq.len(), 60);
    assert!(!seq.truncated);
    let s = &seq.summary;
    assert!(s.monotone && s.normalization_ok && s.growth.holds_on_rest);
    let target = 0.9 / (1.1 * 0.1);
    assert_relative_eq!(s.rate_target.unwrap(), target, max_relative = 1e-14);
    assert!((s.rate_fit.unwrap().ln() - target.ln()).abs() <= 0.1 * target.ln());
    assert!((s.rate_fit.unwrap() - target).abs() <= 0.1 * target);
    let halved = truncation_ultrasmall(0.1, 10.0, 0.9, 1.1, 0.15, 60).unwrap();
    assert!((halved.summary.rate_fit.unwrap() - s.rate_fit.unwrap()).abs() <= 0.1 * s.rate_fit.unwrap());
    assert!(s.decay_ratio < 1.0 && s.c_b.unwrap() > 1.0);
}

#[test]
fn truncation_small_regime_bounded() {
    let seq = truncation_small(0.1, 10.0, 0.4, 2.0, 0.3, 1.5, 200).unwrap();
    assert_eq!(seq.len(), 200);
    let s = &seq.summary;
    assert!(s.monotone && s.normalization_ok);
    assert!(s.growth.holds_on_rest, "{:?}", s.growth);
    assert!(s.growth.max_ratio.is_finite() && s.growth.max_ratio <= s.growth.big_b * (1.0 + 1e-9));
    // first step of the plain recursion
    let c1 = 10.0 * 0.3f64.powf(-0.6);
    let l1 = ((0.1 * 0.6 / (PI * PI)).ln() - c1.ln()) / 0.6;
    assert_relative_eq!(seq.log_ell(1), l1, max_relative = 1e-13);
    let c2 = 10.0 * (-l1) * c1;
    assert_relative_eq!(seq.log_c(2), c2.ln(), max_relative = 1e-13);
}

#[test]
fn truncation_domain_guards() {
    assert!(truncation_ultrasmall(0.1, 10.0, 0.4, 2.0, 0.3, 10).is_err());
    assert!(truncation_ultrasmall(0.1, 10.0, 0.9, 1.1, 0.5, 10).is_err());
    assert!(truncation_small(0.1, 10.0, 0.9, 1.1, 0.3, 1.5, 10).is_err());
    assert!(truncation_small(0.1, 10.0, 0.4, 2.0, 0.3, 1.0, 10).is_err());
}

// ---------- nu / alpha / beta ----------

#[test]
fn nu_base_cases_and_cross_inequality() {
    let seq = reference();
    let (kt, t) = (1.3, 0.4);
    let rep = nu_alpha_beta(&seq, kt, t, 30).unwrap();
    assert_eq!(rep.alpha(1), (kt.ln() + (0.9 - 1.0) * t.ln()).exp());
    assert_relative_eq!(rep.alpha(1), kt * t.powf(-0.1), max_relative = 1e-15);
    assert_relative_eq!(rep.beta(1), kt * t.powf(-0.9), max_relative = 1e-15);
    let c = kt * 1.25;
    assert_relative_eq!(rep.c, c, max_relative = 1e-15);
    let l1 = seq.ell(1);
    assert_relative_eq!(rep.alpha(2), c * (rep.alpha(1) * (1.0 / l1).ln() + rep.beta(1)), max_relative = 1e-13);
    assert_relative_eq!(rep.beta(2), c * (rep.alpha(1) * l1.powf(1.0 - 1.8) + rep.beta(1) * (1.0 / l1).ln()), max_relative = 1e-13);
    assert!(rep.increasing);
    assert_eq!(rep.cross_violation, None);
    assert_eq!(rep.log_summands.len(), 30);
}

#[test]
fn nu2_quadrature_matches_oracle_and_bound() {
    let seq = reference();
    let (kt, t) = (1.0, 0.5);
    let rep = nu_alpha_beta(&seq, kt, t, 2).unwrap();
    for i in 0..20 {
        let s = 10f64.powf(-3.0 + 3.0 * (i as f64 + 0.5) / 20.0);
        let q = nu2_direct(&seq, kt, t, s).unwrap();
        assert_relative_eq!(q, nu2_oracle(0.9, kt, t, s, seq.ell(1)), max_relative = 1e-9);
        let chk = rep.check_nu2(&seq, s).unwrap();
        assert!(chk.pass, "{chk:?}");
    }
}

#[test]
fn nu_needs_ultrasmall_sequence() {
    let seq = truncation_small(0.1, 10.0, 0.4, 2.0, 0.3, 1.5, 20).unwrap();
    assert!(nu_alpha_beta(&seq, 1.0, 0.5, 5).is_err());
    assert!(nu_alpha_beta(&reference(), 1.0, 0.5, 60).is_err());
}

// ---------- connector ----------

#[test]
fn connector_examples() {
    let b = connector_failure_bound(0.1, 2.0, 2.3, 0.9, 1.1, 1.0).unwrap();
    assert_relative_eq!(b.exponent, -0.35, max_relative = 1e-12);
    assert!(b.applicable);
    assert_relative_eq!(b.failure, (-(0.1f64).powf(-0.35)).exp(), max_relative = 1e-14);
    assert_relative_eq!(b.eta, 0.3, max_relative = 1e-12);
    let mut prev = 0.0;
    for k in 1..40 {
        let t = 0.25 * 0.7f64.powi(k);
        let s = connector_failure_bound(t, 2.0, 2.3, 0.9, 1.1, 1.0).unwrap().success;
        assert!(s > prev || s == 1.0);
        prev = s;
    }
    assert_eq!(prev, 1.0);
    assert!(connector_failure_bound(0.1, 2.0, 2.7, 0.9, 1.1, 1.0).is_err());
    assert!(connector_failure_bound(0.1, 2.0, 1.9, 0.9, 1.1, 1.0).is_err());
    assert!(connector_failure_bound(0.3, 2.0, 2.3, 0.9, 1.1, 1.0).is_err());
    assert!(connector_failure_bound(0.1, 9.0, 9.5, 0.9, 1.1, 1.0).is_err());
}

// ---------- properties ----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampler_respects_hypotheses(seed in any::<u64>(), d in 1usize..=3) {
        let (p, c, ell) = AdmissibleSampler::new(seed, d).draw();
        prop_assert!(p.is_ultrasmall());
        prop_assert!(c.r.powi(d as i32) > p.near_threshold(c.t, c.s));
        prop_assert!(ell > 0.0 && ell < (1.0 / E).min(c.t.max(c.s)));
        prop_assert!((p.far_profile(&c) / p.envelope(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_invariants(g in 0.75f64..0.97, d in 1.05f64..3.0, ell0 in 0.01f64..0.36, c in 2.0f64..50.0) {
        prop_assume!(g > d / (d + 1.0) + 0.01);
        let seq = truncation_ultrasmall(0.1, c, g, d, ell0, 40).unwrap();
        prop_assert!(seq.summary.monotone);
        prop_assert!(seq.summary.normalization_ok, "{}", seq.summary.max_normalization_error);
    }

    #[test]
    fn small_truncation_invariants(g in 0.1f64..0.6, d in 1.5f64..4.0, p in 1.1f64..3.0) {
        prop_assume!(g < d / (d + 1.0) - 0.01);
        let seq = truncation_small(0.1, 10.0, g, d, 0.2, p, 100).unwrap();
        prop_assert!(seq.summary.monotone && seq.summary.normalization_ok);
    }

    #[test]
    fn connector_failure_monotone_in_t(t in 1e-6f64..0.25, f in 0.01f64..0.99) {
        let a = connector_failure_bound(t * f, 2.0, 2.3, 0.9, 1.1, 1.0).unwrap();
        let b = connector_failure_bound(t, 2.0, 2.3, 0.9, 1.1, 1.0).unwrap();
        prop_assert!(a.failure <= b.failure);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn two_connection_holds_on_random_contexts(seed in any::<u64>()) {
        let (p, c, _) = AdmissibleSampler::new(seed, 1).draw();
        let chk = two_connection_bound_check(&p, &c, &McOptions::default()).unwrap();
        prop_assert!(chk.pass, "{:?}", chk);
    }
}
