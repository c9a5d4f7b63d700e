use rand::Rng;
use rayon::prelude::*;
use wdrcm_core::{PointSet, Stream};
use wdrcm_graph::Graph;
use wdrcm_metrics::{components, greedy_layer_path, LayerPath, LayerPlan, Searcher, Stage};
use wdrcm_theory::connector_failure_bound;

use crate::{
    kernel_params, mean_stderr, sample_model, wilson_interval, ExperimentError, ExperimentKind, ExperimentResult,
    Record, Result, RunConfig, GIANT_NOTE,
};

const KIND: ExperimentKind = ExperimentKind::LayerPath;

/// Checks that consecutive path vertices are adjacent, that the walk joins
/// `source` to `target`, and that each ascent strictly lowers the mark with
/// `t_next <= t^alpha1`.
pub fn validate_layer_path(g: &Graph, points: &PointSet, plan: &LayerPlan, source: usize, target: usize, lp: &LayerPath) -> std::result::Result<(), String> {
    let p = &lp.path;
    if p.first().map(|&v| v as usize) != Some(source) || p.last().map(|&v| v as usize) != Some(target) {
        return Err("walk does not join the endpoints".into());
    }
    if let Some(w) = p.windows(2).find(|w| !g.has_edge(w[0] as usize, w[1] as usize)) {
        return Err(format!("{} and {} are not adjacent", w[0], w[1]));
    }
    for side in &lp.powerful {
        for w in side.windows(2) {
            let (t0, t1) = (points.mark(w[0] as usize), points.mark(w[1] as usize));
            if !(t1 < t0 && t1 <= t0.powf(plan.alpha1)) {
                return Err(format!("powerful hop {} -> {} does not descend ({t0} -> {t1})", w[0], w[1]));
            }
        }
    }
    Ok(())
}

#[derive(Default)]
struct Tally {
    tried: u64,
    ok: u64,
    launch: u64,
    ascent: u64,
    top: u64,
    invalid: u64,
    shorter: u64,
    built: Vec<f64>,
    exact: Vec<f64>,
    climbs: Vec<f64>,
}

pub fn run_layer_path(cfg: &RunConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    cfg.check_kind(KIND)?;
    let k = &cfg.model.kernel;
    let geom = cfg.model.geometry()?;
    let kn = &cfg.layer;
    let (lo, hi) = LayerPlan::alpha1_range(k.gamma, k.delta);
    if hi <= lo {
        return Err(ExperimentError::Config(format!(
            "layer paths need the ultrasmall regime, gamma = {} delta = {}",
            k.gamma, k.delta
        )));
    }
    let alpha1 = kn.alpha1.unwrap_or(if hi > 1.5 { 1.5 } else { (lo + hi) / 2.0 });
    let plan = LayerPlan::new(k.gamma, k.delta, cfg.model.dimension, alpha1, kn.alpha2, geom.diameter())
        .map_err(|e| ExperimentError::Config(e.to_string()))?
        .with_launch_hops(kn.launch_hops);
    let bound = connector_failure_bound(kn.connector_t, plan.alpha1, plan.alpha2, k.gamma, k.delta, kn.connector_c)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let base = format!("{};alpha1={};alpha2={};eta={}", kernel_params(k, &cfg.model), plan.alpha1, plan.alpha2, plan.eta);
    let per_trial: Vec<Vec<Record>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<Record>> {
            let seed = cfg.seeds.for_trial(trial);
            let (points, g) = sample_model(&cfg.model, k, &seed)?;
            let giant = components(&g).giant_members();
            let mut rng = seed.rng(Stream::Queries);
            let mut searcher = Searcher::new(g.n());
            let mut t = Tally::default();
            if giant.len() >= 2 {
                while t.tried < kn.pairs as u64 {
                    let a = giant[rng.random_range(0..giant.len())] as usize;
                    let b = giant[rng.random_range(0..giant.len())] as usize;
                    if a == b {
                        continue;
                    }
                    t.tried += 1;
                    match greedy_layer_path(&g, &points, &plan, a, b)? {
                        Ok(lp) => {
                            if validate_layer_path(&g, &points, &plan, a, b, &lp).is_err() {
                                t.invalid += 1;
                                continue;
                            }
                            let exact = searcher.between(&g, a, b, false, None)?.0.finite().unwrap_or(u32::MAX);
                            if lp.hops() < exact {
                                t.shorter += 1;
                            }
                            t.ok += 1;
                            t.built.push(lp.hops() as f64);
                            t.exact.push(exact as f64);
                            t.climbs.push((lp.powerful[0].len() + lp.powerful[1].len() - 2) as f64);
                        }
                        Err(f) => match f.stage {
                            Stage::Launch => t.launch += 1,
                            Stage::Ascent => t.ascent += 1,
                            Stage::Top => t.top += 1,
                        },
                    }
                }
            }
            let rec = |stat: &str| Record::new(KIND, trial, cfg.seeds.master_seed, &base, stat);
            let n = t.tried;
            let rate = (n > 0).then(|| t.ok as f64 / n as f64);
            let rate_se = rate.map(|p| (p * (1.0 - p) / n as f64).sqrt());
            let wil = wilson_interval(t.ok, n, 0.95);
            let (mb, sb) = mean_stderr(&t.built);
            let (me, se) = mean_stderr(&t.exact);
            let (mc, sc) = mean_stderr(&t.climbs);
            let ratio = match (mb, me) {
                (Some(b), Some(e)) if e > 0.0 => Some(b / e),
                _ => None,
            };
            Ok(vec![
                rec("giant_fraction").value(giant.len() as f64 / g.n().max(1) as f64).count(g.n()),
                rec("success_rate").value(rate).stderr(rate_se).count(n),
                rec("success_wilson_lower").value(wil.map(|w| w.0)).count(n),
                rec("success_wilson_upper").value(wil.map(|w| w.1)).count(n),
                rec("mean_constructed_hops").value(mb).stderr(sb).count(t.ok),
                rec("mean_exact_hops").value(me).stderr(se).count(t.ok),
                rec("length_ratio").value(ratio).count(t.ok),
                rec("mean_powerful_hops").value(mc).stderr(sc).count(t.ok),
                rec("failures_launch").value(t.launch as f64).count(n),
                rec("failures_ascent").value(t.ascent as f64).count(n),
                rec("failures_top").value(t.top as f64).count(n),
                rec("invalid_paths").value(t.invalid as f64).count(n),
                rec("shorter_than_exact").value(t.shorter as f64).count(t.ok),
                rec("predicted_step_failure").value(bound.failure).count(1),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentResult {
        experiment: KIND,
        config: cfg.clone(),
        notes: vec![
            GIANT_NOTE.into(),
            format!(
                "predicted_step_failure is exp(-c t^e) at t = {}, c = {}, e = {}; applicable = {}",
                kn.connector_t, kn.connector_c, bound.exponent, bound.applicable
            ),
            "invalid walks count as failures; success_wilson_* is the 95% Wilson interval".into(),
        ],
        records: per_trial.into_iter().flatten().collect(),
        theory: Vec::new(),
        distance_rows: Vec::new(),
    })
}
