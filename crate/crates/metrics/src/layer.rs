use serde::{Deserialize, Serialize};
use wdrcm_core::PointSet;
use wdrcm_graph::Graph;

use crate::{check_vertex, MetricsError, Result, Searcher};

/// Mark thresholds of the layer hierarchy together with the exponents that
/// govern one ascent step: from mark `t` the next powerful vertex has mark at
/// most `t^alpha1` and lies within `|x - y|^d <= t^(-alpha2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerPlan {
    pub gamma: f64,
    pub delta: f64,
    pub dimension: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub eta: f64,
    /// Number of geometric layers below the top cutoff.
    pub k: usize,
    /// `(4D)^(-d alpha1^-k)` for `k = 1..=K`, followed by the top cutoff
    /// `(d log 4D)^(-1/eta)`. Strictly increasing.
    pub thresholds: Vec<f64>,
    /// BFS radius searched for a launch vertex.
    pub launch_hops: u32,
}

/// Marks above this never start an ascent.
const LAUNCH_MARK: f64 = 0.25;

impl LayerPlan {
    /// Open interval of admissible `alpha1`; empty unless `gamma > delta / (delta + 1)`.
    pub fn alpha1_range(gamma: f64, delta: f64) -> (f64, f64) {
        (1.0, gamma / (delta * (1.0 - gamma)))
    }

    pub fn alpha2_range(gamma: f64, delta: f64, alpha1: f64) -> (f64, f64) {
        (alpha1, gamma / delta * (1.0 + alpha1 * delta))
    }

    pub fn eta_of(gamma: f64, delta: f64, alpha1: f64, alpha2: f64) -> f64 {
        (gamma - (alpha2 - alpha1 * gamma) * delta).min(alpha2 - alpha1)
    }

    /// The `alpha2` at which both terms of `eta` coincide, which maximises it.
    pub fn balanced_alpha2(gamma: f64, delta: f64, alpha1: f64) -> f64 {
        (gamma + alpha1 * (gamma * delta + 1.0)) / (1.0 + delta)
    }

    /// `diameter` is the Euclidean scale of the query, usually the box diameter.
    pub fn new(gamma: f64, delta: f64, dimension: usize, alpha1: f64, alpha2: Option<f64>, diameter: f64) -> Result<Self> {
        let bad = |m: String| Err(MetricsError::InvalidPlan(m));
        if !(gamma > 0.0 && gamma < 1.0) || !(delta > 1.0) || !delta.is_finite() || dimension == 0 {
            return bad(format!("need 0 < gamma < 1, delta > 1, d >= 1 (got {gamma}, {delta}, {dimension})"));
        }
        let (a_lo, a_hi) = Self::alpha1_range(gamma, delta);
        if !(alpha1 > a_lo && alpha1 < a_hi) {
            return bad(format!("alpha1 = {alpha1} outside ({a_lo}, {a_hi})"));
        }
        let alpha2 = alpha2.unwrap_or_else(|| Self::balanced_alpha2(gamma, delta, alpha1));
        let (b_lo, b_hi) = Self::alpha2_range(gamma, delta, alpha1);
        if !(alpha2 > b_lo && alpha2 < b_hi) {
            return bad(format!("alpha2 = {alpha2} outside ({b_lo}, {b_hi})"));
        }
        let eta = Self::eta_of(gamma, delta, alpha1, alpha2);
        let d = dimension as f64;
        let log_scale = (4.0 * diameter).ln();
        if !(d * log_scale > 1.0) || !log_scale.is_finite() {
            return bad(format!("diameter {diameter} too small for a layer hierarchy"));
        }
        let log_cut = -(d * log_scale).ln() / eta;
        let mut thresholds = Vec::new();
        let mut k = 1;
        loop {
            let log_tau = -d * alpha1.powi(-k) * log_scale;
            if log_tau >= log_cut {
                break;
            }
            thresholds.push(log_tau.exp());
            k += 1;
        }
        let cut = log_cut.exp();
        if thresholds.last().is_some_and(|&t| t >= cut) {
            thresholds.pop();
        }
        let k = thresholds.len();
        thresholds.push(cut);
        Ok(LayerPlan { gamma, delta, dimension, alpha1, alpha2, eta, k, thresholds, launch_hops: 4 })
    }

    pub fn with_launch_hops(mut self, hops: u32) -> Self {
        self.launch_hops = hops;
        self
    }

    /// Mark cutoff of the top layer.
    pub fn top(&self) -> f64 {
        *self.thresholds.last().expect("plan always has a top cutoff")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Launch,
    Ascent,
    Top,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerFailure {
    pub stage: Stage,
    /// Vertex at which no admissible step was found.
    pub at: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerPath {
    /// Walk from source to target; consecutive entries are adjacent.
    pub path: Vec<u32>,
    /// Per endpoint (source, target).
    pub launch_hops: [u32; 2],
    pub ascent_hops: [u32; 2],
    pub top_hops: u32,
    /// Powerful vertices visited by each ascent, starting at the launch vertex.
    pub powerful: [Vec<u32>; 2],
}

impl LayerPath {
    pub fn hops(&self) -> u32 {
        self.path.len() as u32 - 1
    }
}

struct Side {
    walk: Vec<u32>,
    launch: u32,
    powerful: Vec<u32>,
}

struct Walker<'a> {
    g: &'a Graph,
    points: &'a PointSet,
    plan: &'a LayerPlan,
}

impl Walker<'_> {
    /// Most powerful admissible next vertex reached through a connector, as
    /// `(connector, next)`.
    fn step(&self, z: usize) -> Option<(u32, u32)> {
        let t0 = self.points.mark(z);
        let max_mark = t0.powf(self.plan.alpha1);
        let max_dist = t0.powf(-self.plan.alpha2);
        let d = self.plan.dimension as i32;
        let mut best: Option<(f64, u32, u32)> = None;
        for &c in self.g.neighbors(z) {
            if self.points.mark(c as usize) <= t0 {
                continue;
            }
            for &y in self.g.neighbors(c as usize) {
                let ty = self.points.mark(y as usize);
                if y as usize == z || ty > max_mark {
                    continue;
                }
                if best.is_some_and(|(bt, by, bc)| (bt, by, bc) <= (ty, y, c)) {
                    continue;
                }
                if self.points.distance(z, y as usize).powi(d) <= max_dist {
                    best = Some((ty, y, c));
                }
            }
        }
        best.map(|(_, y, c)| (c, y))
    }

    fn launch(&self, start: usize) -> Option<Vec<u32>> {
        let top = self.plan.top();
        let admissible = |v: usize| {
            let t = self.points.mark(v);
            t <= top || (t <= LAUNCH_MARK && self.step(v).is_some())
        };
        let mut parent = std::collections::HashMap::from([(start as u32, start as u32)]);
        let mut level = vec![start as u32];
        for _ in 0..=self.plan.launch_hops {
            level.sort_by(|&a, &b| self.points.mark(a as usize).total_cmp(&self.points.mark(b as usize)).then(a.cmp(&b)));
            if let Some(&v) = level.iter().find(|&&v| admissible(v as usize)) {
                let mut walk = vec![v];
                let mut x = v;
                while x as usize != start {
                    x = parent[&x];
                    walk.push(x);
                }
                walk.reverse();
                return Some(walk);
            }
            let mut next = Vec::new();
            for &u in &level {
                for &v in self.g.neighbors(u as usize) {
                    if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(v) {
                        e.insert(u);
                        next.push(v);
                    }
                }
            }
            level = next;
        }
        None
    }

    fn side(&self, start: usize) -> std::result::Result<Side, LayerFailure> {
        let mut walk = self.launch(start).ok_or(LayerFailure { stage: Stage::Launch, at: start as u32 })?;
        let launch = walk.len() as u32 - 1;
        let mut z = *walk.last().unwrap();
        let mut powerful = vec![z];
        let top = self.plan.top();
        while self.points.mark(z as usize) > top {
            let (c, y) = self.step(z as usize).ok_or(LayerFailure { stage: Stage::Ascent, at: z })?;
            assert!(self.points.mark(y as usize) <= self.points.mark(z as usize).powf(self.plan.alpha1));
            walk.push(c);
            walk.push(y);
            powerful.push(y);
            z = y;
        }
        Ok(Side { walk, launch, powerful })
    }
}

/// Builds a source-target walk through the layer hierarchy: a short launch
/// to a vertex that can start climbing, greedy connector hops towards
/// smaller marks until the top cutoff is reached, then a bidirectional search
/// through the top layer and its neighbours. `Ok(Err(_))` names the first
/// stage that found no admissible step.
pub fn greedy_layer_path(
    g: &Graph,
    points: &PointSet,
    plan: &LayerPlan,
    source: usize,
    target: usize,
) -> Result<std::result::Result<LayerPath, LayerFailure>> {
    if points.len() != g.n() {
        return Err(MetricsError::SizeMismatch(points.len(), g.n()));
    }
    if points.dimension() != plan.dimension {
        return Err(MetricsError::InvalidPlan(format!(
            "plan dimension {} differs from points dimension {}",
            plan.dimension,
            points.dimension()
        )));
    }
    check_vertex(g.n(), source)?;
    check_vertex(g.n(), target)?;
    if source == target {
        let v = source as u32;
        return Ok(Ok(LayerPath { path: vec![v], launch_hops: [0; 2], ascent_hops: [0; 2], top_hops: 0, powerful: [vec![v], vec![v]] }));
    }
    let w = Walker { g, points, plan };
    let a = match w.side(source) {
        Ok(s) => s,
        Err(f) => return Ok(Err(f)),
    };
    let b = match w.side(target) {
        Ok(s) => s,
        Err(f) => return Ok(Err(f)),
    };
    let top = plan.top();
    let mut allowed = vec![false; g.n()];
    for (v, &t) in points.marks().iter().enumerate() {
        if t <= top {
            allowed[v] = true;
            for &u in g.neighbors(v) {
                allowed[u as usize] = true;
            }
        }
    }
    let (za, zb) = (*a.walk.last().unwrap() as usize, *b.walk.last().unwrap() as usize);
    let (top_d, top_path) = Searcher::new(g.n()).between(g, za, zb, true, Some(&allowed))?;
    let Some(top_path) = top_path.filter(|_| top_d.is_finite()) else {
        return Ok(Err(LayerFailure { stage: Stage::Top, at: za as u32 }));
    };
    let mut path = a.walk.clone();
    path.extend_from_slice(&top_path[1..]);
    path.extend(b.walk.iter().rev().skip(1));
    let climb = |s: &Side| s.walk.len() as u32 - 1 - s.launch;
    Ok(Ok(LayerPath {
        path,
        launch_hops: [a.launch, b.launch],
        ascent_hops: [climb(&a), climb(&b)],
        top_hops: top_path.len() as u32 - 1,
        powerful: [a.powerful, b.powerful],
    }))
}
