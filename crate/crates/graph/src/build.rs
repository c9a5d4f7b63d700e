use rayon::prelude::*;
use wdrcm_core::{PairHasher, PointSet, SeedSpec};
use wdrcm_kernels::{sample_reinforcement_weights, Kernel, KernelError, KernelSpec, MarkFeatures};

use crate::graph::{BuilderTag, Graph, Provenance};
use crate::grid::Grid;
use crate::scan::scan_row;
use crate::{GraphError, Result};

/// Relative slack on dominating probabilities; absorbs rounding differences
/// between the corner evaluation and the exact one.
const DOMINATION_SLACK: f64 = 1e-9;

/// Exact per-pair decision shared by every builder.
pub struct EdgeOracle<'a> {
    points: &'a PointSet,
    kernel: Kernel,
    hasher: PairHasher,
    keys: Vec<u32>,
    feats: Vec<MarkFeatures>,
    weights: Option<Vec<f64>>,
}

impl<'a> EdgeOracle<'a> {
    pub fn new(points: &'a PointSet, spec: &KernelSpec, seed: &SeedSpec, weights: Option<Vec<f64>>) -> Result<Self> {
        let kernel = Kernel::new(spec, points.dimension())?;
        let weights = match (kernel.needs_weights(), weights) {
            (_, Some(w)) => {
                if w.len() != points.len() {
                    return Err(GraphError::InvalidInput(format!("{} weights for {} points", w.len(), points.len())));
                }
                if w.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(GraphError::InvalidInput("weights must be positive and finite".into()));
                }
                Some(w)
            }
            (true, None) => {
                let law = spec.weight_law.as_ref().ok_or(KernelError::MissingWeights(spec.family))?;
                Some(sample_reinforcement_weights(points.len(), law, seed)?)
            }
            (false, None) => None,
        };
        let hasher = PairHasher::new(seed);
        let keys = (0..points.len() as u32).map(|i| hasher.vertex_key(i)).collect();
        let feats = (0..points.len())
            .map(|i| kernel.features(points.mark(i), weights.as_ref().map_or(1.0, |w| w[i])))
            .collect();
        Ok(EdgeOracle { points, kernel, hasher, keys, feats, weights })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    #[inline]
    pub fn probability(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let r = self.points.distance(a, b);
        self.kernel.prob_features(r, &self.feats[a], &self.feats[b])
    }

    #[inline]
    pub fn decide(&self, i: usize, j: usize) -> bool {
        let p = self.probability(i, j);
        if p <= 0.0 {
            return false;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.hasher.uniform_with_keys(a as u32, b as u32, self.keys[a], self.keys[b]) < p
    }
}

fn provenance(builder: BuilderTag, points: &PointSet, spec: &KernelSpec, seed: &SeedSpec) -> Provenance {
    Provenance {
        builder,
        seed: Some(*seed),
        kernel: Some(spec.clone()),
        geometry: Some(*points.geometry()),
        warnings: Vec::new(),
    }
}

/// Decides all `n(n-1)/2` pairs. This is the reference sampler.
pub fn build_naive(points: &PointSet, spec: &KernelSpec, seed: &SeedSpec) -> Result<Graph> {
    let oracle = EdgeOracle::new(points, spec, seed, None)?;
    naive_with(&oracle, points, spec, seed)
}

fn naive_with(oracle: &EdgeOracle, points: &PointSet, spec: &KernelSpec, seed: &SeedSpec) -> Result<Graph> {
    let n = points.len();
    let rows: Vec<Vec<(u32, u32)>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).filter(|&j| oracle.decide(i, j)).map(|j| (i as u32, j as u32)).collect())
        .collect();
    let edges: Vec<(u32, u32)> = rows.into_iter().flatten().collect();
    Graph::from_edges(n, &edges, None, provenance(BuilderTag::Naive, points, spec, seed))
}

/// Same edge set as [`build_naive`], visiting only pairs that survive a
/// cell-level domination bound and the hash prefilter.
pub fn build_accelerated(points: &PointSet, spec: &KernelSpec, seed: &SeedSpec) -> Result<Graph> {
    let oracle = EdgeOracle::new(points, spec, seed, None)?;
    accelerated_with(&oracle, points, spec, seed)
}

/// Builds with caller-supplied reinforcement weights.
pub fn build_with_weights(points: &PointSet, spec: &KernelSpec, seed: &SeedSpec, weights: Vec<f64>, accelerated: bool) -> Result<Graph> {
    let oracle = EdgeOracle::new(points, spec, seed, Some(weights))?;
    if accelerated {
        accelerated_with(&oracle, points, spec, seed)
    } else {
        naive_with(&oracle, points, spec, seed)
    }
}

fn accelerated_with(oracle: &EdgeOracle, points: &PointSet, spec: &KernelSpec, seed: &SeedSpec) -> Result<Graph> {
    let n = points.len();
    let kernel = oracle.kernel();
    let w_top = oracle.weights().map_or(1.0, |w| w.iter().copied().fold(0.0, f64::max));
    if kernel.dominating_probability(0.0, 0.5, 0.5, w_top).is_none() {
        let mut g = naive_with(oracle, points, spec, seed)?;
        g.provenance_mut()
            .warnings
            .push(format!("{:?} has no domination bound; used the naive builder", spec.family));
        return Ok(g);
    }
    if n < 2 {
        return Graph::from_edges(n, &[], None, provenance(BuilderTag::Accelerated, points, spec, seed));
    }
    let geom = points.geometry();
    let d = geom.dimension;
    let near = near_field_radius(kernel, geom.diameter());
    let per_cell = (32.0 * geom.volume() / n as f64).powf(1.0 / d as f64);
    let grid = Grid::new(points, near.max(per_cell), oracle.weights());
    let groups = &grid.groups;
    let k32 = oracle.hasher.mix_key();

    // Vertex data copied into grid order so the pair loops read memory
    // sequentially.
    let ids = &grid.ids;
    let skeys: Vec<u32> = ids.iter().map(|&v| oracle.keys[v as usize]).collect();
    let sfeat: Vec<MarkFeatures> = ids.iter().map(|&v| oracle.feats[v as usize]).collect();
    let mut scoords = Vec::with_capacity(n * d);
    for &v in ids {
        scoords.extend_from_slice(points.position(v as usize));
    }
    let gfeat: Vec<MarkFeatures> = groups.iter().map(|g| kernel.features(g.tmin, g.wmax)).collect();
    let decide = |p: usize, q: usize| -> bool {
        let r = geom.distance_unchecked(&scoords[p * d..(p + 1) * d], &scoords[q * d..(q + 1) * d]);
        let prob = kernel.prob_features(r, &sfeat[p], &sfeat[q]);
        prob > 0.0 && oracle.hasher.uniform_with_keys(ids[p], ids[q], skeys[p], skeys[q]) < prob
    };

    // Group A scans everything after its own start in grid order, against a
    // per-element threshold derived from the dominating probability of the
    // group pair. Every unordered pair is seen exactly once.
    let rows: Vec<Vec<(u32, u32)>> = (0..groups.len())
        .into_par_iter()
        .map_init(
            || (Vec::<u32>::new(), Vec::<u32>::new()),
            |(thr, cand), ga| {
                let g1 = &groups[ga];
                let base = g1.start;
                thr.clear();
                thr.resize(n - base, 0);
                let mut last_cell = usize::MAX;
                let mut rmin = 0.0;
                for (gb, g2) in groups.iter().enumerate().skip(ga) {
                    if g2.cell != last_cell {
                        last_cell = g2.cell;
                        rmin = if g2.cell == g1.cell { 0.0 } else { grid.gap(g1.cell, g2.cell) };
                    }
                    let q = kernel.prob_features(rmin, &gfeat[ga], &gfeat[gb]) * (1.0 + DOMINATION_SLACK);
                    let t = if q.is_nan() { u32::MAX } else { PairHasher::high_threshold(q) };
                    thr[g2.start - base..g2.start - base + g2.len].fill(t);
                }
                let mut out = Vec::new();
                for p in base..base + g1.len {
                    cand.clear();
                    scan_row(k32, skeys[p], &skeys[p + 1..], &thr[p + 1 - base..], cand);
                    for &k in cand.iter() {
                        let q = p + 1 + k as usize;
                        if decide(p, q) {
                            let (i, j) = (ids[p], ids[q]);
                            out.push((i.min(j), i.max(j)));
                        }
                    }
                }
                out
            },
        )
        .collect();
    let edges: Vec<(u32, u32)> = rows.into_iter().flatten().collect();
    Graph::from_edges(n, &edges, None, provenance(BuilderTag::Accelerated, points, spec, seed))
}

/// Distance below which two median-mark vertices connect surely.
fn near_field_radius(kernel: &Kernel, diameter: f64) -> f64 {
    let sure = |r: f64| kernel.prob_raw(r, 0.5, 0.5, 1.0, 1.0) >= 1.0;
    if !sure(0.0) {
        return 0.0;
    }
    if sure(diameter) {
        return diameter;
    }
    let (mut lo, mut hi) = (0.0, diameter);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if sure(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
