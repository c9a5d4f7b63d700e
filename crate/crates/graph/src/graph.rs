use std::io::Write;

use serde::{Deserialize, Serialize};
use wdrcm_core::{BoxGeometry, SeedSpec};
use wdrcm_kernels::KernelSpec;

use crate::{GraphError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuilderTag {
    Naive,
    Accelerated,
    Augmented,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub builder: BuilderTag,
    pub seed: Option<SeedSpec>,
    pub kernel: Option<KernelSpec>,
    pub geometry: Option<BoxGeometry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Provenance {
    pub fn manual() -> Self {
        Provenance { builder: BuilderTag::Manual, seed: None, kernel: None, geometry: None, warnings: Vec::new() }
    }
}

/// Undirected simple graph in CSR form. Neighbour lists are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    adj: Vec<u32>,
    conductance: Option<Vec<u8>>,
    provenance: Provenance,
}

impl Graph {
    /// Builds from unordered edges; each edge must appear once and carry an
    /// optional conductance in {1, 2}.
    pub fn from_edges(n: usize, edges: &[(u32, u32)], conductance: Option<&[u8]>, provenance: Provenance) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(GraphError::InvalidInput(format!("{n} vertices do not fit 32-bit ids")));
        }
        if let Some(c) = conductance {
            if c.len() != edges.len() {
                return Err(GraphError::InvalidInput("conductance length differs from edge count".into()));
            }
            if let Some(bad) = c.iter().find(|&&w| w != 1 && w != 2) {
                return Err(GraphError::InvalidInput(format!("conductance {bad} not in {{1,2}}")));
            }
        }
        let mut deg = vec![0usize; n + 1];
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::InvalidInput(format!("self-loop at {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(GraphError::InvalidInput(format!("edge ({a},{b}) out of range for n={n}")));
            }
            deg[a as usize + 1] += 1;
            deg[b as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let offsets = deg;
        let mut fill = offsets.clone();
        let mut adj = vec![0u32; offsets[n]];
        let mut cond = conductance.map(|_| vec![0u8; offsets[n]]);
        for (e, &(a, b)) in edges.iter().enumerate() {
            for (x, y) in [(a, b), (b, a)] {
                let slot = fill[x as usize];
                adj[slot] = y;
                if let (Some(cv), Some(c)) = (cond.as_mut(), conductance) {
                    cv[slot] = c[e];
                }
                fill[x as usize] += 1;
            }
        }
        for i in 0..n {
            let (lo, hi) = (offsets[i], offsets[i + 1]);
            match cond.as_mut() {
                None => adj[lo..hi].sort_unstable(),
                Some(cv) => {
                    let mut pairs: Vec<(u32, u8)> = adj[lo..hi].iter().copied().zip(cv[lo..hi].iter().copied()).collect();
                    pairs.sort_unstable();
                    for (k, (v, c)) in pairs.into_iter().enumerate() {
                        adj[lo + k] = v;
                        cv[lo + k] = c;
                    }
                }
            }
            if adj[lo..hi].windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphError::InvalidInput(format!("duplicate edge at vertex {i}")));
            }
        }
        Ok(Graph { offsets, adj, conductance: cond, provenance })
    }

    pub fn empty(n: usize) -> Self {
        Graph { offsets: vec![0; n + 1], adj: Vec::new(), conductance: None, provenance: Provenance::manual() }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Conductances aligned with [`neighbors`](Self::neighbors).
    #[inline]
    pub fn neighbor_conductances(&self, i: usize) -> Option<&[u8]> {
        self.conductance.as_ref().map(|c| &c[self.offsets[i]..self.offsets[i + 1]])
    }

    pub fn has_conductance(&self) -> bool {
        self.conductance.is_some()
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    pub fn conductance(&self, i: usize, j: usize) -> Option<u8> {
        let k = self.neighbors(i).binary_search(&(j as u32)).ok()?;
        Some(self.neighbor_conductances(i).map_or(1, |c| c[k]))
    }

    /// Each edge once, as `(i, j, conductance)` with `i < j`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u8)> + '_ {
        (0..self.n()).flat_map(move |i| {
            let nb = self.neighbors(i);
            let c = self.neighbor_conductances(i);
            nb.iter()
                .enumerate()
                .filter(move |(_, &j)| j as usize > i)
                .map(move |(k, &j)| (i as u32, j, c.map_or(1, |c| c[k])))
        })
    }

    pub fn edge_list(&self) -> Vec<(u32, u32)> {
        self.edges().map(|(a, b, _)| (a, b)).collect()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn provenance_mut(&mut self) -> &mut Provenance {
        &mut self.provenance
    }

    /// True when every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n() <= other.n() && self.edges().all(|(a, b, _)| other.has_edge(a as usize, b as usize))
    }

    /// Symmetry, no loops, no duplicates, conductances in {1,2}.
    pub fn check_structure(&self) -> Result<()> {
        for i in 0..self.n() {
            let nb = self.neighbors(i);
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GraphError::InvalidInput(format!("unsorted or duplicate neighbours at {i}")));
            }
            for (k, &j) in nb.iter().enumerate() {
                if j as usize == i {
                    return Err(GraphError::InvalidInput(format!("self-loop at {i}")));
                }
                let back = self.conductance(j as usize, i);
                let here = self.neighbor_conductances(i).map_or(1, |c| c[k]);
                if back != Some(here) {
                    return Err(GraphError::InvalidInput(format!("asymmetric edge {i}-{j}")));
                }
                if here != 1 && here != 2 {
                    return Err(GraphError::InvalidInput(format!("bad conductance on {i}-{j}")));
                }
            }
        }
        Ok(())
    }

    /// `src,dst[,conductance]` with `src < dst`.
    pub fn write_edge_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let with_c = self.has_conductance();
        w.write_all(if with_c { b"src,dst,conductance\n" } else { b"src,dst\n" })?;
        for (a, b, c) in self.edges() {
            if with_c {
                writeln!(w, "{a},{b},{c}")?;
            } else {
                writeln!(w, "{a},{b}")?;
            }
        }
        Ok(())
    }
}
