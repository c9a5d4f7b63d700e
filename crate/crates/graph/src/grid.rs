use wdrcm_core::{Boundary, PointSet};

pub(crate) const GROUP: usize = 32;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Group {
    pub cell: usize,
    pub start: usize,
    pub len: usize,
    pub tmin: f64,
    pub wmax: f64,
}

/// Occupied cells of a uniform grid. Inside a cell vertices are sorted by
/// mark and cut into groups of at most [`GROUP`].
#[derive(Debug)]
pub(crate) struct Grid {
    pub side: f64,
    m: usize,
    dim: usize,
    torus: bool,
    cell_coords: Vec<u32>,
    cell_groups: Vec<(usize, usize)>,
    pub groups: Vec<Group>,
    pub ids: Vec<u32>,
}

impl Grid {
    pub fn new(points: &PointSet, target_side: f64, weights: Option<&[f64]>) -> Grid {
        let g = points.geometry();
        let dim = g.dimension;
        let target = if target_side.is_finite() && target_side > 0.0 { target_side } else { g.side };
        let m = ((g.side / target).floor() as usize).clamp(1, max_cells_per_axis(points.len(), dim));
        let side = g.side / m as f64;
        let n = points.len();
        let mut cell_of = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = 0usize;
            for &x in points.position(i).iter().rev() {
                let k = ((x / side) as usize).min(m - 1);
                c = c * m + k;
            }
            cell_of.push(c);
        }
        let mut ids: Vec<u32> = (0..n as u32).collect();
        ids.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            cell_of[a]
                .cmp(&cell_of[b])
                .then(points.mark(a).total_cmp(&points.mark(b)))
                .then(a.cmp(&b))
        });
        let mut cell_coords = Vec::new();
        let mut cell_groups = Vec::new();
        let mut groups = Vec::new();
        let mut i = 0;
        while i < n {
            let c = cell_of[ids[i] as usize];
            let mut j = i;
            while j < n && cell_of[ids[j] as usize] == c {
                j += 1;
            }
            let g0 = groups.len();
            // near-equal group sizes; a cell of 33 becomes 17 + 16, not 32 + 1
            let parts = (j - i).div_ceil(GROUP);
            for p in 0..parts {
                let s = i + p * (j - i) / parts;
                let e = i + (p + 1) * (j - i) / parts;
                let wmax = weights.map_or(1.0, |w| ids[s..e].iter().map(|&v| w[v as usize]).fold(0.0, f64::max));
                groups.push(Group { cell: cell_groups.len(), start: s, len: e - s, tmin: points.mark(ids[s] as usize), wmax });
            }
            cell_groups.push((g0, groups.len()));
            let mut rem = c;
            for _ in 0..dim {
                cell_coords.push((rem % m) as u32);
                rem /= m;
            }
            i = j;
        }
        Grid {
            side,
            m,
            dim,
            torus: g.boundary == Boundary::Torus,
            cell_coords,
            cell_groups,
            groups,
            ids,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cell_groups.len()
    }

    pub fn groups_of(&self, cell: usize) -> &[Group] {
        let (a, b) = self.cell_groups[cell];
        &self.groups[a..b]
    }

    /// Lower bound on the distance between any two points of the two cells.
    #[inline]
    pub fn gap(&self, a: usize, b: usize) -> f64 {
        let ca = &self.cell_coords[a * self.dim..(a + 1) * self.dim];
        let cb = &self.cell_coords[b * self.dim..(b + 1) * self.dim];
        let mut s = 0.0;
        for k in 0..self.dim {
            let mut di = ca[k].abs_diff(cb[k]) as usize;
            if self.torus {
                di = di.min(self.m - di);
            }
            if di > 1 {
                let g = (di - 1) as f64 * self.side;
                s += g * g;
            }
        }
        s.sqrt()
    }

    /// Calls `f(ga, gb, same_group, r_min)` for every group pair of cell `a`
    /// with cells `b >= a`, each unordered group pair once.
    pub fn for_each_block<F: FnMut(&Group, &Group, bool, f64)>(&self, a: usize, mut f: F) {
        let ga = self.groups_of(a);
        for (x, g1) in ga.iter().enumerate() {
            for (y, g2) in ga.iter().enumerate().skip(x) {
                f(g1, g2, x == y, 0.0);
            }
        }
        for b in a + 1..self.cell_count() {
            let r = self.gap(a, b);
            for g1 in ga {
                for g2 in self.groups_of(b) {
                    f(g1, g2, false, r);
                }
            }
        }
    }
}

// Caps the number of cells so the quadratic cell-pair loop stays cheap
// next to the pair work itself.
fn max_cells_per_axis(n: usize, dim: usize) -> usize {
    let cells = (n / 8).max(1) as f64;
    (cells.powf(1.0 / dim as f64).floor() as usize).max(1)
}
