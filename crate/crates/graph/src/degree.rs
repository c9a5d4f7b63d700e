use rand::Rng;
use serde::{Deserialize, Serialize};
use wdrcm_core::{PointSet, SeedSpec, Stream};

use crate::{Graph, GraphError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DegreeOptions {
    /// Fraction of largest degrees entering the Hill estimator.
    pub tail_fraction: f64,
    pub bootstrap: usize,
    pub mark_bins: usize,
    /// Bins for the auxiliary log-spaced mark profile.
    pub log_bins: usize,
    pub seed: u64,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        DegreeOptions { tail_fraction: 0.05, bootstrap: 200, mark_bins: 10, log_bins: 20, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// Exponent of `P(D > k)`; `None` when the tail is degenerate.
    pub exponent: Option<f64>,
    pub stderr: Option<f64>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub n: usize,
    pub histogram: Vec<u64>,
    pub mean_degree: f64,
    /// Mean of `ln t` over each equal-count mark bin.
    pub bin_log_mark: Vec<f64>,
    pub bin_mean_degree: Vec<f64>,
    /// OLS slope of `ln(mean degree)` on mean `ln t` over the equal-count bins.
    pub mark_slope: Option<f64>,
    /// Same fit over log-spaced mark bins, which reach further into small marks.
    pub mark_slope_log_bins: Option<f64>,
    pub tail: TailEstimate,
}

pub fn degree_stats(graph: &Graph, points: &PointSet) -> Result<DegreeSummary> {
    degree_stats_with(graph, points, &DegreeOptions::default())
}

pub fn degree_stats_with(graph: &Graph, points: &PointSet, opts: &DegreeOptions) -> Result<DegreeSummary> {
    let n = graph.n();
    if n == 0 {
        return Err(GraphError::InvalidInput("degree statistics of an empty graph".into()));
    }
    if points.len() != n {
        return Err(GraphError::InvalidInput("graph and point set sizes differ".into()));
    }
    if !(opts.tail_fraction > 0.0 && opts.tail_fraction < 1.0) || opts.mark_bins < 2 {
        return Err(GraphError::InvalidInput("tail fraction must lie in (0,1) and mark_bins >= 2".into()));
    }
    let deg = graph.degrees();
    let dmax = deg.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0u64; dmax + 1];
    for &d in &deg {
        histogram[d] += 1;
    }
    let mean_degree = deg.iter().sum::<usize>() as f64 / n as f64;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points.mark(a).total_cmp(&points.mark(b)).then(a.cmp(&b)));
    let bins = opts.mark_bins.min(n);
    let mut bin_log_mark = Vec::with_capacity(bins);
    let mut bin_mean_degree = Vec::with_capacity(bins);
    for b in 0..bins {
        let chunk = &order[b * n / bins..(b + 1) * n / bins];
        if chunk.is_empty() {
            continue;
        }
        let lm = chunk.iter().map(|&i| points.mark(i).ln()).sum::<f64>() / chunk.len() as f64;
        let md = chunk.iter().map(|&i| deg[i] as f64).sum::<f64>() / chunk.len() as f64;
        bin_log_mark.push(lm);
        bin_mean_degree.push(md);
    }
    let mark_slope = log_slope(&bin_log_mark, &bin_mean_degree);
    let mark_slope_log_bins = log_binned_slope(points, &deg, opts.log_bins);

    let values: Vec<f64> = deg.iter().map(|&d| d as f64).collect();
    let point = hill_estimate(&values, opts.tail_fraction);
    let k = ((opts.tail_fraction * n as f64).floor() as usize).max(1);
    let stderr = point.and_then(|_| bootstrap_stderr(&values, opts, k));
    Ok(DegreeSummary {
        n,
        histogram,
        mean_degree,
        bin_log_mark,
        bin_mean_degree,
        mark_slope,
        mark_slope_log_bins,
        tail: TailEstimate { exponent: point, stderr, k },
    })
}

/// Hill estimate of the tail exponent over the top `floor(q n)` values.
pub fn hill_estimate(values: &[f64], q: f64) -> Option<f64> {
    let mut v = values.to_vec();
    let k = ((q * v.len() as f64).floor() as usize).max(1);
    hill_top(&mut v, k)
}

// Reorders `v`; needs k + 1 values.
fn hill_top(v: &mut [f64], k: usize) -> Option<f64> {
    if v.len() < k + 1 {
        return None;
    }
    let (top, kth, _) = v.select_nth_unstable_by(k, |a, b| b.total_cmp(a));
    let floor = *kth;
    if !(floor > 0.0) {
        return None;
    }
    let h = top.iter().map(|&x| (x / floor).ln()).sum::<f64>() / k as f64;
    (h > 0.0).then(|| 1.0 / h)
}

fn bootstrap_stderr(values: &[f64], opts: &DegreeOptions, k: usize) -> Option<f64> {
    if opts.bootstrap < 2 {
        return None;
    }
    let mut rng = SeedSpec::new(opts.seed).rng(Stream::Bootstrap);
    let mut buf = vec![0.0; values.len()];
    let mut est = Vec::with_capacity(opts.bootstrap);
    for _ in 0..opts.bootstrap {
        for x in buf.iter_mut() {
            *x = values[rng.random_range(0..values.len())];
        }
        if let Some(e) = hill_top(&mut buf, k) {
            est.push(e);
        }
    }
    if est.len() < 2 {
        return None;
    }
    let m = est.iter().sum::<f64>() / est.len() as f64;
    let var = est.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (est.len() - 1) as f64;
    Some(var.sqrt())
}

fn log_slope(x: &[f64], mean_deg: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x.iter().zip(mean_deg).filter(|(_, &d)| d > 0.0).map(|(&a, &d)| (a, d.ln())).collect();
    ols_slope(&pts)
}

pub(crate) fn ols_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn log_binned_slope(points: &PointSet, deg: &[usize], bins: usize) -> Option<f64> {
    const MIN_COUNT: usize = 20;
    if bins < 2 {
        return None;
    }
    let lmin = points.marks().iter().copied().fold(f64::INFINITY, f64::min).ln();
    if !lmin.is_finite() || lmin >= 0.0 {
        return None;
    }
    let mut sum_l = vec![0.0; bins];
    let mut sum_d = vec![0.0; bins];
    let mut cnt = vec![0usize; bins];
    for (i, &t) in points.marks().iter().enumerate() {
        let b = (((t.ln() - lmin) / -lmin) * bins as f64) as usize;
        let b = b.min(bins - 1);
        sum_l[b] += t.ln();
        sum_d[b] += deg[i] as f64;
        cnt[b] += 1;
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for b in 0..bins {
        if cnt[b] >= MIN_COUNT {
            x.push(sum_l[b] / cnt[b] as f64);
            y.push(sum_d[b] / cnt[b] as f64);
        }
    }
    log_slope(&x, &y)
}
