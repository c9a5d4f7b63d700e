use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wdrcm_core::PointSet;
use wdrcm_kernels::KernelSpec;

use crate::graph::{BuilderTag, Graph, Provenance};
use crate::grid::Grid;
use crate::{GraphError, Result};

/// Exponent `e` on `(t∨s)` in the added-edge rule
/// `r^d <= kappa^(1/delta) (t∧s)^(-gamma) (t∨s)^e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AugmentRule {
    /// `e = -gamma/delta`.
    #[default]
    Ultrasmall,
    /// `e = gamma - 1`.
    NonUltrasmall,
    Custom(f64),
}

impl AugmentRule {
    pub fn exponent(&self, gamma: f64, delta: f64) -> f64 {
        match *self {
            AugmentRule::Ultrasmall => -gamma / delta,
            AugmentRule::NonUltrasmall => gamma - 1.0,
            AugmentRule::Custom(e) => e,
        }
    }
}

/// Right-hand side of the added-edge rule (compared with `r^d`).
pub fn augmentation_threshold(spec: &KernelSpec, rule: AugmentRule, t: f64, s: f64) -> f64 {
    let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
    let e = rule.exponent(spec.gamma, spec.delta);
    spec.kappa.powf(1.0 / spec.delta) * lo.powf(-spec.gamma) * hi.powf(e)
}

pub fn build_augmented(graph: &Graph, points: &PointSet, spec: &KernelSpec) -> Result<Graph> {
    build_augmented_with(graph, points, spec, AugmentRule::Ultrasmall)
}

/// Copies `graph` with conductance 1 and adds conductance-2 edges between
/// non-adjacent pairs satisfying the rule.
pub fn build_augmented_with(graph: &Graph, points: &PointSet, spec: &KernelSpec, rule: AugmentRule) -> Result<Graph> {
    spec.validate()?;
    if graph.n() != points.len() {
        return Err(GraphError::InvalidInput(format!("graph has {} vertices, point set {}", graph.n(), points.len())));
    }
    let e = rule.exponent(spec.gamma, spec.delta);
    if e > 0.0 {
        return Err(GraphError::InvalidInput(format!("augmentation exponent {e} must be non-positive")));
    }
    let n = points.len();
    let d = points.dimension() as i32;
    let mut edges: Vec<(u32, u32)> = graph.edges().map(|(a, b, _)| (a, b)).collect();
    let mut cond = vec![1u8; edges.len()];
    if n >= 2 {
        let geom = points.geometry();
        let per_cell = (32.0 * geom.volume() / n as f64).powf(1.0 / d as f64);
        let median = augmentation_threshold(spec, rule, 0.5, 0.5).powf(1.0 / d as f64);
        let grid = Grid::new(points, per_cell.max(median), None);
        // same factors, same order as `augmentation_threshold`
        let kp = spec.kappa.powf(1.0 / spec.delta);
        let lo_pow: Vec<f64> = points.marks().iter().map(|t| t.powf(-spec.gamma)).collect();
        let hi_pow: Vec<f64> = points.marks().iter().map(|t| t.powf(e)).collect();
        let added: Vec<Vec<(u32, u32)>> = (0..grid.cell_count())
            .into_par_iter()
            .map(|a| {
                let mut out = Vec::new();
                grid.for_each_block(a, |g1, g2, same, rmin| {
                    if rmin.powi(d) > augmentation_threshold(spec, rule, g1.tmin, g2.tmin) {
                        return;
                    }
                    for x in 0..g1.len {
                        let i = grid.ids[g1.start + x] as usize;
                        let y0 = if same { x + 1 } else { 0 };
                        for y in y0..g2.len {
                            let j = grid.ids[g2.start + y] as usize;
                            let rd = points.distance(i, j).powi(d);
                            let (lo, hi) = if points.mark(i) <= points.mark(j) { (i, j) } else { (j, i) };
                            if rd <= kp * lo_pow[lo] * hi_pow[hi] && !graph.has_edge(i, j) {
                                out.push((i.min(j) as u32, i.max(j) as u32));
                            }
                        }
                    }
                });
                out
            })
            .collect();
        for e in added.into_iter().flatten() {
            edges.push(e);
            cond.push(2);
        }
    }
    let mut prov = graph.provenance().clone();
    prov.builder = BuilderTag::Augmented;
    Ok(Graph::from_edges(n, &edges, Some(&cond), Provenance { ..prov })?)
}
