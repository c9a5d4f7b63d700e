use wdrcm_graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Label per vertex, numbered by first appearance.
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
    /// Largest component; ties go to the lower label. `None` for an empty graph.
    pub giant: Option<u32>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn in_giant(&self, i: usize) -> bool {
        self.giant == Some(self.labels[i])
    }

    pub fn giant_size(&self) -> usize {
        self.giant.map_or(0, |g| self.sizes[g as usize])
    }

    pub fn giant_members(&self) -> Vec<u32> {
        (0..self.labels.len() as u32).filter(|&i| self.in_giant(i as usize)).collect()
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Union-find over the edge list.
pub fn components(g: &Graph) -> Components {
    let n = g.n();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut rank = vec![0u8; n];
    for (a, b, _) in g.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        let (hi, lo) = if rank[ra as usize] >= rank[rb as usize] { (ra, rb) } else { (rb, ra) };
        parent[lo as usize] = hi;
        if rank[hi as usize] == rank[lo as usize] {
            rank[hi as usize] += 1;
        }
    }
    let mut label_of_root = vec![u32::MAX; n];
    let mut labels = vec![0u32; n];
    let mut sizes = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i as u32) as usize;
        if label_of_root[r] == u32::MAX {
            label_of_root[r] = sizes.len() as u32;
            sizes.push(0);
        }
        labels[i] = label_of_root[r];
        sizes[labels[i] as usize] += 1;
    }
    let giant = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(k, _)| k as u32);
    Components { labels, sizes, giant }
}
