//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero on any failure outside `KNOWN_FAILURES`.
//!
//! `WDRCM_ACCEPT_ONLY=4,9` restricts the run to the listed criteria.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wdrcm_core::{sample_poisson_points, Boundary, BoxGeometry, SeedSpec};
use wdrcm_experiments::{
    run, run_degree, run_distance_scaling, run_layer_path, run_theory_checks, ExperimentKind, ExperimentResult, Record,
    RunConfig,
};
use wdrcm_graph::{build_accelerated, build_augmented, build_naive, Graph, Provenance};
use wdrcm_kernels::{Family, KernelSpec, WeightLaw};
use wdrcm_metrics::{bfs_distance, Distance, Searcher};
use wdrcm_theory::{nu_alpha_beta, truncation_small, truncation_ultrasmall, NORMALIZATION_TOL};

/// Criteria expected to fail at desk scale; see the project notes.
const KNOWN_FAILURES: &[u32] = &[3, 4];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn poisson(dim: usize, side: f64, boundary: Boundary, seed: u64) -> wdrcm_core::PointSet {
    let g = BoxGeometry::new(dim, side, boundary).unwrap();
    sample_poisson_points(&g, 1.0, &SeedSpec::new(seed)).unwrap()
}

fn values<'a>(res: &'a ExperimentResult, stat: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
    res.statistic(stat)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn c1_oracle_equivalence() -> Outcome {
    let families = [Family::PaEnvelope, Family::MinEnvelope, Family::AgeDependent, Family::SoftBooleanSum];
    let gammas = [0.3, 0.6, 0.85];
    let deltas = [1.5, 2.5];
    let mut mismatches = 0;
    let mut edges = 0;
    for k in 0..50u64 {
        let fam = families[k as usize % 4];
        let dim = 1 + (k as usize / 4) % 2;
        let boundary = if k % 3 == 0 { Boundary::HardWall } else { Boundary::Torus };
        let n = 1000.0 + 40.0 * k as f64;
        let side = if dim == 1 { n } else { n.sqrt() };
        let spec = KernelSpec::new(fam, gammas[k as usize % 3], deltas[k as usize % 2]);
        let p = poisson(dim, side, boundary, 10_000 + k);
        assert!(p.len() <= 3000);
        let seed = SeedSpec::new(20_000 + k);
        let a = build_naive(&p, &spec, &seed).unwrap();
        let b = build_accelerated(&p, &spec, &seed).unwrap();
        edges += a.edge_count();
        if a.edge_list() != b.edge_list() {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("50 instances, {edges} edges in total, {mismatches} mismatching edge sets"))
}

fn floyd(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.n();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
        for &j in g.neighbors(i) {
            row[j as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn c2_distance_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad_bfs = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=60usize);
        let p = rng.random_range(0.0..0.15);
        let mut e = Vec::new();
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                if rng.random::<f64>() < p {
                    e.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, &e, None, Provenance::manual()).unwrap();
        let fw = floyd(&g);
        for (s, row) in fw.iter().enumerate() {
            let got = bfs_distance(&g, s).unwrap();
            for (t, &want) in row.iter().enumerate() {
                let ok = match got[t] {
                    Distance::Finite(h) => h == want,
                    Distance::Unreachable => want >= u32::MAX / 4,
                };
                if !ok {
                    bad_bfs += 1;
                }
            }
        }
    }
    let mut bad_dw = 0;
    let mut pairs = 0u64;
    for k in 0..500u64 {
        let p = poisson(2, 10.0, Boundary::Torus, 30_000 + k);
        let spec = KernelSpec::new(Family::MinEnvelope, 0.8, 1.5).with_kappa(0.3);
        let g = build_accelerated(&p, &spec, &SeedSpec::new(40_000 + k)).unwrap();
        let aug = build_augmented(&g, &p, &spec).unwrap();
        let mut s = Searcher::new(g.n());
        for a in 0..g.n() {
            let hops = s.distances_from(&g, a).unwrap();
            for (b, h) in hops.iter().enumerate().skip(a + 1) {
                if let Distance::Finite(h) = h {
                    pairs += 1;
                    match s.conductance_distance(&aug, a, b).unwrap() {
                        Distance::Finite(w) if w <= *h => {}
                        _ => bad_dw += 1,
                    }
                }
            }
        }
    }
    outcome(
        bad_bfs == 0 && bad_dw == 0,
        format!("bfs vs Floyd-Warshall: {bad_bfs} mismatches; d_w <= d: {bad_dw} violations over {pairs} connected pairs"),
    )
}

fn c3_degree_law() -> Outcome {
    let mut cfg = RunConfig::torus(1e5, KernelSpec::new(Family::MinEnvelope, 0.75, 1.5));
    cfg.trials = 10;
    cfg.seeds = SeedSpec::new(3);
    let res = run_degree(&cfg).unwrap();
    let hill: Vec<f64> = values(&res, "tail_exponent").filter_map(|r| r.value).collect();
    let slope: Vec<f64> = values(&res, "mark_slope").filter_map(|r| r.value).collect();
    let slope_log: Vec<f64> = values(&res, "mark_slope_log_bins").filter_map(|r| r.value).collect();
    let (h, s) = (mean(&hill), mean(&slope));
    let hill_ok = hill.len() == 10 && (h - 4.0 / 3.0).abs() <= 0.2;
    let slope_ok = slope.len() == 10 && (s + 0.75).abs() <= 0.1;
    outcome(
        hill_ok && slope_ok,
        format!(
            "Hill tail exponent {h:.4} (target 1.3333 +- 0.2, {}); decile mark slope {s:.4} (target -0.75 +- 0.1, {}); log-bin slope {:.4} for reference",
            if hill_ok { "ok" } else { "out" },
            if slope_ok { "ok" } else { "out" },
            mean(&slope_log)
        ),
    )
}

/// Coefficient of variation across rungs of the pooled per-rung mean of
/// `hops / ln ln |x - y|`.
fn rung_spread(res: &ExperimentResult, rungs: usize) -> (f64, Vec<f64>) {
    let mut per = vec![Vec::new(); rungs];
    for r in values(res, "mean_ratio_loglog") {
        let i: usize = r.params.split(';').find_map(|kv| kv.strip_prefix("rung=")).unwrap().parse().unwrap();
        if let Some(v) = r.value {
            per[i].push(v);
        }
    }
    let means: Vec<f64> = per.iter().map(|v| mean(v)).collect();
    let m = mean(&means);
    let sd = (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt();
    (sd / m, means)
}

fn c4_regime_discrimination() -> Outcome {
    let mut spreads = Vec::new();
    let mut text = Vec::new();
    for (g, d, kappa) in [(0.9, 1.1, 0.01), (0.4, 2.0, 1.0)] {
        let mut cfg = RunConfig::torus(2e5, KernelSpec::new(Family::MinEnvelope, g, d).with_kappa(kappa));
        cfg.trials = 20;
        cfg.seeds = SeedSpec::new(4);
        cfg.distance.pairs_per_rung = 100;
        let res = run_distance_scaling(&cfg).unwrap();
        let skipped = values(&res, "rung_skipped").count();
        let (cv, means) = rung_spread(&res, 3);
        spreads.push(cv);
        text.push(format!(
            "(gamma={g}, delta={d}) per-rung mean d/lnln = [{:.3}, {:.3}, {:.3}] spread {cv:.4}, {skipped} skipped rungs",
            means[0], means[1], means[2]
        ));
    }
    outcome(spreads[0] <= 0.5 * spreads[1], format!("{}; need {:.4} <= 0.5 * {:.4}", text.join("; "), spreads[0], spreads[1]))
}

fn c5_couplings() -> Outcome {
    let (g, d) = (0.55, 1.7);
    let (aw, beta) = (0.6, 1.3);
    let law = WeightLaw::BoundedPareto { lower: aw, upper: 10.0, tail_index: 2.2 };
    let mut bad = [0; 3];
    for k in 0..20u64 {
        let p = poisson(2, 60.0, Boundary::Torus, 50_000 + k);
        let seed = SeedSpec::new(60_000 + k);
        let build = |s: KernelSpec| build_accelerated(&p, &s, &seed).unwrap();
        let soft = build(KernelSpec::new(Family::SoftBooleanSum, g, d));
        let hard = build(KernelSpec::new(Family::HardBoolean, g, d));
        let gil = build(KernelSpec::new(Family::GilbertMax, g, d));
        let rein = build(KernelSpec::new(Family::ReinforcedAge, g, d).with_beta(beta).with_weight_law(law.clone()));
        let age = build(KernelSpec::new(Family::AgeDependent, g, d).with_beta(beta * aw.powf(2.0 / d)));
        bad[0] += usize::from(!hard.is_subgraph_of(&soft));
        bad[1] += usize::from(!gil.is_subgraph_of(&soft));
        bad[2] += usize::from(!age.is_subgraph_of(&rein));
    }
    outcome(
        bad == [0; 3],
        format!("violations over 20 instances: hard in soft {}, gilbert_max in soft_sum {}, age in reinforced {}", bad[0], bad[1], bad[2]),
    )
}

fn c6_quadrature_suite() -> Outcome {
    let mut cfg = RunConfig::torus(100.0, KernelSpec::new(Family::MinEnvelope, 0.9, 1.1));
    cfg.seeds = SeedSpec::new(6);
    let res = run_theory_checks(&cfg).unwrap();
    let lemmas = ["two_connection", "appendix_a1", "appendix_a2", "k_connection_k2", "k_connection_k3", "k_connection_k4"];
    let mut parts = Vec::new();
    let mut failures = 0;
    for l in lemmas {
        let es: Vec<_> = res.theory.iter().filter(|e| e.lemma == l).collect();
        let f = es.iter().filter(|e| e.is_failure()).count();
        let na = es.iter().filter(|e| e.verdict == "inapplicable").count();
        let contexts: HashSet<u64> = es.iter().filter_map(|e| e.params["context_id"].as_u64()).collect();
        failures += f + usize::from(contexts.len() != 100);
        parts.push(format!("{l}: {} contexts {f} fail {na} inapplicable", contexts.len()));
    }
    outcome(failures == 0, parts.join("; "))
}

fn c7_truncation() -> Outcome {
    let u = truncation_ultrasmall(0.1, 10.0, 0.9, 1.1, 0.3, 60).unwrap();
    let s = truncation_small(0.1, 10.0, 0.4, 2.0, 0.3, 1.5, 200).unwrap();
    // The fit reports the base of the double exponential; compare its log.
    let fit = u.summary.rate_fit.unwrap().ln();
    let target = (0.9f64 / (1.1 * 0.1)).ln();
    let rate_ok = (fit - target).abs() <= 0.1 * target && u.len() == 60;
    let growth_ok = s.summary.growth.holds_on_rest && s.len() == 200;
    let norm = u.summary.max_normalization_error.max(s.summary.max_normalization_error);
    let norm_ok = norm <= NORMALIZATION_TOL && u.summary.monotone && s.summary.monotone;
    outcome(
        rate_ok && growth_ok && norm_ok,
        format!(
            "fitted log rate {fit:.4} vs {target:.4}; non-ultrasmall ratio max {:.3} with B {:.3} (bounded: {growth_ok}); max normalization error {norm:.2e}",
            s.summary.growth.max_ratio, s.summary.growth.big_b
        ),
    )
}

fn c8_nu_machinery() -> Outcome {
    let seq = truncation_ultrasmall(0.1, 10.0, 0.9, 1.1, 0.3, 60).unwrap();
    let (kt, t) = (1.0, 0.5);
    let rep = nu_alpha_beta(&seq, kt, t, 30).unwrap();
    let base_ok = rep.alpha(1) == kt * t.powf(0.9 - 1.0) && rep.beta(1) == kt * t.powf(-0.9);
    let mut nu2_fail = 0;
    for i in 0..20 {
        let s = 10f64.powf(-3.0 + 3.0 * (i as f64 + 0.5) / 20.0);
        if !rep.check_nu2(&seq, s).unwrap().pass {
            nu2_fail += 1;
        }
    }
    let cross_ok = rep.cross_violation.is_none() && rep.log_summands.len() == 30;
    outcome(
        base_ok && nu2_fail == 0 && cross_ok,
        format!("base cases exact: {base_ok}; nu_2 bound failures at 20 s: {nu2_fail}; beta/alpha cross inequality for n <= 30 with c2 = {:.4}: {cross_ok}", rep.c2),
    )
}

fn c9_layer_paths() -> Outcome {
    let mut cfg = RunConfig::torus(1e5, KernelSpec::new(Family::MinEnvelope, 0.9, 1.1).with_kappa(0.01));
    cfg.trials = 5;
    cfg.seeds = SeedSpec::new(9);
    cfg.layer.alpha1 = Some(1.5);
    cfg.layer.pairs = 40;
    let res = run_layer_path(&cfg).unwrap();
    let sum = |s: &str| values(&res, s).filter_map(|r| r.value).sum::<f64>();
    let tried: u64 = values(&res, "success_rate").map(|r| r.count).sum();
    let ok: f64 = values(&res, "success_rate").filter_map(|r| r.value.map(|v| v * r.count as f64)).sum();
    let rate = ok / tried as f64;
    let (invalid, shorter) = (sum("invalid_paths"), sum("shorter_than_exact"));
    outcome(
        rate >= 0.9 && invalid == 0.0 && shorter == 0.0,
        format!(
            "success {ok}/{tried} = {rate:.3}; invalid walks {invalid}; shorter than BFS {shorter}; failures launch/ascent/top {}/{}/{}",
            sum("failures_launch"),
            sum("failures_ascent"),
            sum("failures_top")
        ),
    )
}

fn small_config(kind: ExperimentKind) -> RunConfig {
    let spec = match kind {
        ExperimentKind::Degree => KernelSpec::new(Family::PaEnvelope, 0.75, 1.5),
        _ => KernelSpec::new(Family::MinEnvelope, 0.9, 1.1).with_kappa(0.05),
    };
    let mut cfg = RunConfig::torus(6000.0, spec);
    cfg.trials = 3;
    cfg.seeds = SeedSpec::new(10);
    cfg.degree.bootstrap = 50;
    cfg.distance.pairs_per_rung = 30;
    cfg.distance.min_pairs = 5;
    cfg.sweep.gammas = vec![0.5, 0.9];
    cfg.layer.alpha1 = Some(2.0);
    cfg.layer.pairs = 10;
    cfg.theory.contexts = 4;
    cfg.theory.mc_samples = 5000;
    cfg
}

fn c10_reproducibility() -> Outcome {
    let kinds = [
        ExperimentKind::Degree,
        ExperimentKind::DistanceScaling,
        ExperimentKind::PhaseSweep,
        ExperimentKind::LayerPath,
        ExperimentKind::TheoryChecks,
    ];
    let mut differing = Vec::new();
    for kind in kinds {
        let cfg = small_config(kind);
        let outputs: Vec<(String, String)> = [1, 3]
            .into_iter()
            .map(|threads| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                pool.install(|| {
                    let r = run(&cfg, kind).unwrap();
                    (r.csv_string(), serde_json::to_string(&r.theory).unwrap())
                })
            })
            .collect();
        if outputs[0] != outputs[1] {
            differing.push(kind.name());
        }
    }
    outcome(differing.is_empty(), format!("5 experiments rerun on 1 and 3 threads; differing outputs: {differing:?}"))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    // Ignore libtest flags such as --nocapture passed through by cargo.
    let only: Option<HashSet<u32>> =
        std::env::var("WDRCM_ACCEPT_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [Criterion; 10] = [
        (1, "oracle equivalence of the builders", c1_oracle_equivalence),
        (2, "distance oracles", c2_distance_oracles),
        (3, "degree law", c3_degree_law),
        (4, "regime discrimination", c4_regime_discrimination),
        (5, "couplings", c5_couplings),
        (6, "quadrature bound suite", c6_quadrature_suite),
        (7, "truncation sequences", c7_truncation),
        (8, "nu/alpha/beta machinery", c8_nu_machinery),
        (9, "layer-path constructor", c9_layer_paths),
        (10, "reproducibility", c10_reproducibility),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t0 = Instant::now();
        let o = f();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, known) {
            (false, true) => " [known failure]",
            (true, true) => " [listed as known failure but passed]",
            _ => "",
        };
        println!("criterion {id:>2} {tag} {name} ({:.1} s){note}: {}", t0.elapsed().as_secs_f64(), o.detail);
        if !o.pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
