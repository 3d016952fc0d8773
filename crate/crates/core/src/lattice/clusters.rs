use super::{BoxRegion, Configuration};
use crate::error::{domain, Result};

/// A nonempty nearest-neighbor connected set of sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub sites: Vec<Vec<i64>>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Coordinate-wise minimum and maximum.
    pub fn bounds(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let first = self.sites.first()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for s in &self.sites[1..] {
            for (a, &x) in s.iter().enumerate() {
                lo[a] = lo[a].min(x);
                hi[a] = hi[a].max(x);
            }
        }
        Some((lo, hi))
    }

    pub fn bounding_box(&self) -> Option<BoxRegion> {
        let (lo, hi) = self.bounds()?;
        let sides = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        BoxRegion::new(lo, sides).ok()
    }
}

/// Maximal connected components of the occupied sites, ordered by their
/// smallest linear index; sites within a cluster are in index order.
pub fn connected_clusters(config: &Configuration) -> Vec<Cluster> {
    cluster_indices(config)
        .into_iter()
        .map(|idx| Cluster {
            sites: idx.into_iter().map(|i| config.region().coord_of(i)).collect(),
        })
        .collect()
}

pub(crate) fn cluster_indices(config: &Configuration) -> Vec<Vec<usize>> {
    let region = config.region();
    let mut seen = vec![false; region.volume()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in config.occupied_indices() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(i);
            region.for_each_neighbor(i, |j| {
                if config.get(j) && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            });
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Sup-norm diameter: the largest coordinate extent over all axes.
pub fn diameter_sup(cluster: &Cluster) -> Result<usize> {
    match cluster.bounds() {
        None => domain("diameter of an empty cluster"),
        Some((lo, hi)) => Ok(lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| (h - l) as usize)
            .max()
            .unwrap_or(0)),
    }
}

/// Whether some cluster touches both the minimal and maximal face along
/// `axis`.
pub fn crosses(config: &Configuration, axis: usize) -> Result<bool> {
    let region = config.region();
    if axis >= region.dim() {
        return domain(format!("axis {axis} out of range"));
    }
    let side = region.sides()[axis];
    Ok(cluster_indices(config).iter().any(|members| {
        let mut low = false;
        let mut high = false;
        for &i in members {
            let c = region.local_coord(i, axis);
            low |= c == 0;
            high |= c + 1 == side;
        }
        low && high
    }))
}

/// Incremental cluster bookkeeping for a growing configuration: a
/// union-find over sites with per-root bounding boxes.
#[derive(Debug, Clone)]
pub struct ClusterTracker {
    region: BoxRegion,
    parent: Vec<u32>,
    occupied: Vec<bool>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    max_diameter: usize,
}

impl ClusterTracker {
    pub fn new(region: &BoxRegion) -> Self {
        let n = region.volume();
        Self {
            region: region.clone(),
            parent: (0..n as u32).collect(),
            occupied: vec![false; n],
            lo: Vec::new(),
            hi: Vec::new(),
            max_diameter: 0,
        }
    }

    pub fn from_configuration(config: &Configuration) -> Self {
        let mut t = Self::new(config.region());
        for i in config.occupied_indices() {
            t.insert(i);
        }
        t
    }

    fn ensure_bounds(&mut self) {
        if self.lo.is_empty() {
            let d = self.region.dim();
            let n = self.region.volume();
            self.lo = vec![0; n * d];
            self.hi = vec![0; n * d];
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let p = self.parent[i] as usize;
            self.parent[i] = self.parent[p];
            i = p;
        }
        i
    }

    /// Occupies `index` and merges it with its occupied neighbors. Returns
    /// the root of the resulting cluster.
    pub fn insert(&mut self, index: usize) -> usize {
        self.ensure_bounds();
        let d = self.region.dim();
        if self.occupied[index] {
            return self.find(index);
        }
        self.occupied[index] = true;
        for a in 0..d {
            let c = self.region.local_coord(index, a) as u32;
            self.lo[index * d + a] = c;
            self.hi[index * d + a] = c;
        }
        let mut root = index;
        let nbrs = self.region.neighbor_indices(index);
        for j in nbrs {
            if !self.occupied[j] {
                continue;
            }
            let rj = self.find(j);
            if rj == root {
                continue;
            }
            // bounds live on the root
            self.parent[rj] = root as u32;
            for a in 0..d {
                self.lo[root * d + a] = self.lo[root * d + a].min(self.lo[rj * d + a]);
                self.hi[root * d + a] = self.hi[root * d + a].max(self.hi[rj * d + a]);
            }
            root = self.find(root);
        }
        let diam = self.diameter_of_root(root);
        self.max_diameter = self.max_diameter.max(diam);
        root
    }

    fn diameter_of_root(&self, root: usize) -> usize {
        let d = self.region.dim();
        (0..d)
            .map(|a| (self.hi[root * d + a] - self.lo[root * d + a]) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_occupied(&self, index: usize) -> bool {
        self.occupied[index]
    }

    /// Sup-norm diameter of the cluster containing `index`.
    pub fn cluster_diameter(&mut self, index: usize) -> usize {
        let r = self.find(index);
        self.diameter_of_root(r)
    }

    /// Bounding box of the cluster containing `index`.
    pub fn cluster_box(&mut self, index: usize) -> BoxRegion {
        let r = self.find(index);
        let d = self.region.dim();
        let offset = (0..d)
            .map(|a| self.region.lo(a) + self.lo[r * d + a] as i64)
            .collect();
        let sides = (0..d)
            .map(|a| (self.hi[r * d + a] - self.lo[r * d + a] + 1) as usize)
            .collect();
        BoxRegion::new(offset, sides).expect("cluster box lies in the region")
    }

    /// Whether the cluster containing `index` touches both faces on `axis`.
    pub fn cluster_spans(&mut self, index: usize, axis: usize) -> bool {
        let r = self.find(index);
        let d = self.region.dim();
        self.lo[r * d + axis] == 0 && self.hi[r * d + axis] as usize + 1 == self.region.sides()[axis]
    }

    pub fn max_diameter(&self) -> usize {
        self.max_diameter
    }
}
