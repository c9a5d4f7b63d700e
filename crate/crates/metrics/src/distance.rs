use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use wdrcm_core::fmt17;
use wdrcm_graph::Graph;

use crate::{check_vertex, MetricsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Unreachable => f.write_str("unreachable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub source: u32,
    pub target: u32,
    pub hops: Distance,
    /// Present when requested and the target is reachable; `path.len() == hops + 1`.
    pub path: Option<Vec<u32>>,
    pub conductance: Option<Distance>,
}

/// Reusable scratch space for repeated queries on graphs of up to `capacity`
/// vertices. Visited sets are reset by bumping an epoch, not by clearing.
#[derive(Debug, Clone)]
pub struct Searcher {
    epoch: u32,
    seen: [Vec<u32>; 2],
    dist: [Vec<u32>; 2],
    parent: [Vec<u32>; 2],
    frontier: [Vec<u32>; 2],
    next: Vec<u32>,
    buckets: [Vec<u32>; 3],
}

impl Searcher {
    pub fn new(capacity: usize) -> Self {
        Searcher {
            epoch: 0,
            seen: [vec![0; capacity], vec![0; capacity]],
            dist: [vec![0; capacity], vec![0; capacity]],
            parent: [vec![0; capacity], vec![0; capacity]],
            frontier: [Vec::new(), Vec::new()],
            next: Vec::new(),
            buckets: [Vec::new(), Vec::new(), Vec::new()],
        }
    }

    fn start(&mut self, n: usize) {
        if self.seen[0].len() < n {
            *self = Searcher::new(n);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            for s in &mut self.seen {
                s.fill(0);
            }
            self.epoch = 1;
        }
    }

    /// Hop distances from `source` to every vertex.
    pub fn distances_from(&mut self, g: &Graph, source: usize) -> Result<Vec<Distance>> {
        check_vertex(g.n(), source)?;
        self.start(g.n());
        let e = self.epoch;
        let mut out = vec![Distance::Unreachable; g.n()];
        let q = &mut self.frontier[0];
        q.clear();
        q.push(source as u32);
        self.seen[0][source] = e;
        self.dist[0][source] = 0;
        let mut head = 0;
        while head < q.len() {
            let u = q[head] as usize;
            head += 1;
            let du = self.dist[0][u];
            out[u] = Distance::Finite(du);
            for &v in g.neighbors(u) {
                if self.seen[0][v as usize] != e {
                    self.seen[0][v as usize] = e;
                    self.dist[0][v as usize] = du + 1;
                    q.push(v);
                }
            }
        }
        Ok(out)
    }

    /// Alternating-frontier search between two vertices. With `allowed`, only
    /// vertices flagged true may be used in the interior of the path; the two
    /// endpoints are always admitted.
    pub fn between(
        &mut self,
        g: &Graph,
        source: usize,
        target: usize,
        want_path: bool,
        allowed: Option<&[bool]>,
    ) -> Result<(Distance, Option<Vec<u32>>)> {
        check_vertex(g.n(), source)?;
        check_vertex(g.n(), target)?;
        if source == target {
            return Ok((Distance::Finite(0), want_path.then(|| vec![source as u32])));
        }
        self.start(g.n());
        let e = self.epoch;
        for (side, v) in [(0, source), (1, target)] {
            self.seen[side][v] = e;
            self.dist[side][v] = 0;
            self.parent[side][v] = v as u32;
            self.frontier[side].clear();
            self.frontier[side].push(v as u32);
        }
        loop {
            if self.frontier[0].is_empty() || self.frontier[1].is_empty() {
                return Ok((Distance::Unreachable, None));
            }
            let side = usize::from(self.frontier[1].len() < self.frontier[0].len());
            let other = 1 - side;
            let mut best: Option<(u32, u32, u32)> = None;
            self.next.clear();
            for k in 0..self.frontier[side].len() {
                let u = self.frontier[side][k];
                let du = self.dist[side][u as usize];
                for &v in g.neighbors(u as usize) {
                    let vi = v as usize;
                    if let Some(a) = allowed {
                        if !a[vi] && vi != source && vi != target {
                            continue;
                        }
                    }
                    if self.seen[other][vi] == e {
                        let total = du + 1 + self.dist[other][vi];
                        if best.map_or(true, |b| total < b.0) {
                            best = Some((total, u, v));
                        }
                    }
                    if self.seen[side][vi] != e {
                        self.seen[side][vi] = e;
                        self.dist[side][vi] = du + 1;
                        self.parent[side][vi] = u;
                        self.next.push(v);
                    }
                }
            }
            if let Some((total, u, v)) = best {
                let path = want_path.then(|| {
                    let (a, b) = if side == 0 { (u, v) } else { (v, u) };
                    let mut p = self.chain(0, a);
                    p.reverse();
                    p.extend(self.chain(1, b));
                    p
                });
                return Ok((Distance::Finite(total), path));
            }
            std::mem::swap(&mut self.frontier[side], &mut self.next);
        }
    }

    fn chain(&self, side: usize, mut v: u32) -> Vec<u32> {
        let mut out = vec![v];
        while self.dist[side][v as usize] > 0 {
            v = self.parent[side][v as usize];
            out.push(v);
        }
        out
    }

    /// Minimal total conductance between two vertices, via a three-bucket
    /// queue since edge weights are 1 or 2.
    pub fn conductance_distance(&mut self, g: &Graph, source: usize, target: usize) -> Result<Distance> {
        check_vertex(g.n(), source)?;
        check_vertex(g.n(), target)?;
        if !g.has_conductance() {
            return Err(MetricsError::MissingConductance);
        }
        self.start(g.n());
        let e = self.epoch;
        let (seen, dist) = (&mut self.seen[0], &mut self.dist[0]);
        for b in &mut self.buckets {
            b.clear();
        }
        seen[source] = e;
        dist[source] = 0;
        self.buckets[0].push(source as u32);
        let mut pending = 1usize;
        let mut cur = 0u32;
        let mut bucket = Vec::new();
        while pending > 0 {
            std::mem::swap(&mut bucket, &mut self.buckets[(cur % 3) as usize]);
            for &u in &bucket {
                pending -= 1;
                let u = u as usize;
                if dist[u] != cur {
                    continue;
                }
                if u == target {
                    return Ok(Distance::Finite(cur));
                }
                let cond = g.neighbor_conductances(u).expect("checked above");
                for (&v, &c) in g.neighbors(u).iter().zip(cond) {
                    let nd = cur + c as u32;
                    let vi = v as usize;
                    if seen[vi] != e || nd < dist[vi] {
                        seen[vi] = e;
                        dist[vi] = nd;
                        self.buckets[(nd % 3) as usize].push(v);
                        pending += 1;
                    }
                }
            }
            bucket.clear();
            cur += 1;
        }
        Ok(Distance::Unreachable)
    }
}

pub fn bfs_distance(g: &Graph, source: usize) -> Result<Vec<Distance>> {
    Searcher::new(g.n()).distances_from(g, source)
}

pub fn bidirectional_distance(g: &Graph, source: usize, target: usize) -> Result<DistanceResult> {
    let (hops, path) = Searcher::new(g.n()).between(g, source, target, true, None)?;
    Ok(DistanceResult { source: source as u32, target: target as u32, hops, path, conductance: None })
}

pub fn weighted_distance(g: &Graph, source: usize, target: usize) -> Result<Distance> {
    Searcher::new(g.n()).conductance_distance(g, source, target)
}

/// One line of a distance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub src: u32,
    pub dst: u32,
    pub hops: Distance,
    pub dw: Option<Distance>,
    pub euclidean_distance: f64,
}

/// `src,dst,hops,dw,euclidean_distance`; unreachable is spelled out and a
/// missing `dw` is left empty.
pub fn write_distance_csv<W: Write>(rows: &[DistanceRow], mut w: W) -> std::io::Result<()> {
    w.write_all(b"src,dst,hops,dw,euclidean_distance\n")?;
    for r in rows {
        let dw = r.dw.map(|d| d.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", r.src, r.dst, r.hops, dw, fmt17(r.euclidean_distance))?;
    }
    Ok(())
}
