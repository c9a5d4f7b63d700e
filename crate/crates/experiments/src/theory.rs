use rayon::prelude::*;
use serde_json::json;
use wdrcm_core::Stream;
use wdrcm_theory::{
    appendix_bound_check, e_k_recursion, nu_alpha_beta, truncation_small, truncation_ultrasmall, two_connection_bound_check,
    AdmissibleSampler, Appendix, BoundCheck, McOptions, Verdict, NORMALIZATION_TOL,
};

use crate::{ExperimentError, ExperimentKind, ExperimentResult, Record, Result, RunConfig, TheoryEntry};

const KIND: ExperimentKind = ExperimentKind::TheoryChecks;

/// JSON schema of the theory report (an array of checks).
pub const THEORY_SCHEMA: &str = include_str!("../schema/theory_report.schema.json");

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inapplicable => "inapplicable",
    }
}

fn from_check(b: &BoundCheck, context_id: usize) -> TheoryEntry {
    let lemma = match b.k {
        Some(k) => format!("k_connection_k{k}"),
        None => serde_json::to_value(b.lemma).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
    };
    TheoryEntry {
        lemma,
        params: json!({
            "context_id": context_id,
            "gamma": b.params.gamma,
            "delta": b.params.delta,
            "kappa": b.params.kappa,
            "dimension": b.params.dimension,
            "t": b.context.t,
            "s": b.context.s,
            "r": b.context.r,
            "ell": b.ell,
            "method": b.method,
        }),
        lhs: b.lhs,
        rhs: b.rhs,
        stderr: b.stderr,
        pass: b.pass,
        verdict: verdict_name(b.verdict).into(),
        tolerance: b.tolerance.clone(),
    }
}

fn plain(lemma: &str, params: serde_json::Value, lhs: f64, rhs: f64, pass: bool, tolerance: String) -> TheoryEntry {
    TheoryEntry {
        lemma: lemma.into(),
        params,
        lhs: Some(lhs).filter(|v| v.is_finite()),
        rhs: Some(rhs).filter(|v| v.is_finite()),
        stderr: None,
        pass,
        verdict: if pass { "pass" } else { "fail" }.into(),
        tolerance,
    }
}

/// Reverses the inequality of every decided check.
fn invert(e: &mut TheoryEntry) {
    if let (Some(l), Some(r)) = (e.lhs, e.rhs) {
        if e.verdict != "inapplicable" {
            e.pass = r <= l;
            e.verdict = if e.pass { "pass" } else { "fail" }.into();
            e.tolerance = "inverted: rhs <= lhs".into();
        }
    }
}

fn context_checks(cfg: &RunConfig, trial: u64) -> Result<Vec<TheoryEntry>> {
    let kn = &cfg.theory;
    let seed = cfg.seeds.for_trial(trial);
    let mut sampler = AdmissibleSampler::new(seed.key(Stream::Aux(0)), kn.dimension);
    let draws: Vec<_> = (0..kn.contexts).map(|_| sampler.draw()).collect();
    let mc_base = seed.key(Stream::Aux(1));
    let per: Vec<Vec<TheoryEntry>> = draws
        .par_iter()
        .enumerate()
        .map(|(i, (p, c, ell))| -> Result<Vec<TheoryEntry>> {
            let mc = McOptions { samples: kn.mc_samples, seed: mc_base.wrapping_add(1000 * i as u64) };
            let mut out = vec![
                from_check(&two_connection_bound_check(p, c, &mc)?, i),
                from_check(&appendix_bound_check(Appendix::A1, p, c, *ell, &mc)?, i),
                from_check(&appendix_bound_check(Appendix::A2, p, c, *ell, &mc)?, i),
            ];
            let ek = e_k_recursion(p, c, kn.k_max, *ell, &mc)?;
            out.extend(ek.entries.iter().filter_map(|e| e.check.as_ref()).map(|b| from_check(b, i)));
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

fn sequence_checks(cfg: &RunConfig, records: &mut Vec<Record>, trial: u64) -> Result<Vec<TheoryEntry>> {
    let kn = &cfg.theory;
    let (gu, du) = kn.ultrasmall;
    let (gs, ds) = kn.small;
    let ultra = truncation_ultrasmall(kn.epsilon, kn.c, gu, du, kn.ell0, kn.ultrasmall_n)?;
    let small = truncation_small(kn.epsilon, kn.c, gs, ds, kn.ell0, kn.small_p, kn.small_n)?;
    let mut out = Vec::new();
    let up = json!({"gamma": gu, "delta": du, "epsilon": kn.epsilon, "c": kn.c, "ell0": kn.ell0, "n": ultra.len()});
    let sp = json!({"gamma": gs, "delta": ds, "epsilon": kn.epsilon, "c": kn.c, "ell0": kn.ell0, "p": kn.small_p, "n": small.len()});
    let us = &ultra.summary;
    let rec = |p: &serde_json::Value, stat: &str| Record::new(KIND, trial, cfg.seeds.master_seed, &p.to_string(), stat);
    records.push(rec(&up, "rate_fit").value(us.rate_fit).count(ultra.len()));
    records.push(rec(&up, "rate_target").value(us.rate_target).count(1));
    records.push(rec(&up, "max_normalization_error").value(us.max_normalization_error).count(ultra.len()));
    records.push(rec(&sp, "growth_max_ratio").value(small.summary.growth.max_ratio).count(small.len()));
    records.push(rec(&sp, "growth_big_b").value(small.summary.growth.big_b).count(small.len()));
    records.push(rec(&sp, "max_normalization_error").value(small.summary.max_normalization_error).count(small.len()));
    if let (Some(fit), Some(target)) = (us.rate_fit, us.rate_target) {
        let rel = (fit - target).abs() / target;
        out.push(plain("truncation_rate", up.clone(), rel, 0.1, rel <= 0.1, "|fit - target| / target <= 0.1".into()));
    }
    for (seq, p) in [(&ultra, &up), (&small, &sp)] {
        let s = &seq.summary;
        out.push(plain(
            "truncation_normalization",
            p.clone(),
            s.max_normalization_error,
            NORMALIZATION_TOL,
            s.normalization_ok,
            "max relative error <= rhs".into(),
        ));
        out.push(plain("truncation_monotone", p.clone(), 0.0, 0.0, s.monotone, "ell_n strictly decreasing".into()));
    }
    let gr = &small.summary.growth;
    out.push(plain(
        "truncation_small_growth",
        sp.clone(),
        gr.max_ratio,
        gr.big_b,
        gr.holds_on_rest,
        format!("log eta_n <= log b + B n log^p(n+1) beyond the fit window (n > {})", gr.fit_until),
    ));

    let rep = nu_alpha_beta(&ultra, kn.kappa_tilde, kn.nu_t, kn.nu_n)?;
    let np = json!({"kappa_tilde": kn.kappa_tilde, "t": kn.nu_t, "gamma": gu, "c": rep.c, "c2": rep.c2});
    let (kt, t) = (kn.kappa_tilde, kn.nu_t);
    for (name, got, want) in [("nu_base_alpha", rep.alpha(1), kt * t.powf(gu - 1.0)), ("nu_base_beta", rep.beta(1), kt * t.powf(-gu))] {
        let rel = (got - want).abs() / want;
        out.push(plain(name, np.clone(), got, want, rel <= 1e-14, "relative difference <= 1e-14".into()));
    }
    for i in 0..kn.nu2_points {
        let s = 10f64.powf(-3.0 + 3.0 * (i as f64 + 0.5) / kn.nu2_points as f64);
        let chk = rep.check_nu2(&ultra, s)?;
        let mut p = np.clone();
        p["s"] = json!(s);
        out.push(plain("nu2_bound", p, chk.lhs, chk.rhs, chk.pass, "lhs <= rhs (1 + 1e-6)".into()));
    }
    for n in 1..=kn.nu_n {
        let lhs = 2.0 * rep.log_beta[n - 1];
        let rhs = rep.c2.ln() + rep.log_summands[n - 1];
        let pass = lhs <= rhs + 1e-12 * lhs.abs().max(rhs.abs()).max(1.0);
        let mut p = np.clone();
        p["n"] = json!(n);
        out.push(plain("beta_alpha_cross_log", p, lhs, rhs, pass, "log lhs <= log rhs, 1e-12 relative".into()));
    }
    Ok(out)
}

/// Randomised bound checks plus the truncation and alpha/beta recursions.
/// Inapplicable contexts are reported but do not count as failures.
pub fn run_theory_checks(cfg: &RunConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    cfg.check_kind(KIND)?;
    let kn = &cfg.theory;
    if kn.dimension == 0 || kn.dimension > wdrcm_theory::MAX_DIM {
        return Err(ExperimentError::Config(format!("theory dimension must lie in 1..={}", wdrcm_theory::MAX_DIM)));
    }
    if kn.mc_samples < 2 {
        return Err(ExperimentError::Config("mc_samples must be at least 2".into()));
    }
    let mut records = Vec::new();
    let mut theory = Vec::new();
    for trial in 0..cfg.trials {
        let mut entries = context_checks(cfg, trial)?;
        entries.extend(sequence_checks(cfg, &mut records, trial)?);
        if kn.invert {
            entries.iter_mut().for_each(invert);
        }
        for e in &entries {
            let value = match e.verdict.as_str() {
                "pass" => Some(1.0),
                "fail" => Some(0.0),
                _ => None,
            };
            records.push(
                Record::new(KIND, trial, cfg.seeds.master_seed, &e.params.to_string(), &e.lemma)
                    .value(value)
                    .stderr(e.stderr)
                    .count(1),
            );
        }
        theory.extend(entries);
    }
    let failures = theory.iter().filter(|e| e.is_failure()).count();
    let inapplicable = theory.iter().filter(|e| e.verdict == "inapplicable").count();
    Ok(ExperimentResult {
        experiment: KIND,
        config: cfg.clone(),
        notes: vec![
            format!("{} checks, {failures} failed, {inapplicable} inapplicable", theory.len()),
            "value is 1 for pass, 0 for fail and empty for inapplicable contexts".into(),
            "d = 1 bounds use quadrature (lhs <= rhs (1 + 1e-6)); Monte Carlo bounds use lhs <= rhs + 3 stderr".into(),
        ],
        records,
        theory,
        distance_rows: Vec::new(),
    })
}
