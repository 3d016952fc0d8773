//! Box geometry on `Z^d`, occupancy configurations, clusters and crossings.
//!
//! Sites of a [`BoxRegion`] are indexed row-major with axis 0 varying
//! fastest. The layout is part of the public contract: event logs and
//! serialized configurations refer to sites through it.

mod boundary;
mod clusters;
mod format;

pub use boundary::{occupied_neighbor_count, BoundaryCondition};
pub use clusters::{connected_clusters, crosses, diameter_sup, Cluster, ClusterTracker};
pub use format::{ascii_grid, parse_configuration, write_configuration};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// An axis-aligned box `offset + [0, sides)` in `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxRegion {
    offset: Vec<i64>,
    sides: Vec<usize>,
}

impl BoxRegion {
    pub fn new(offset: Vec<i64>, sides: Vec<usize>) -> Result<Self> {
        if offset.len() != sides.len() {
            return Err(Error::DimensionMismatch {
                expected: sides.len(),
                got: offset.len(),
            });
        }
        if sides.contains(&0) {
            return domain("box sides must be at least 1");
        }
        let volume = sides
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .filter(|&v| v <= u32::MAX as usize);
        if volume.is_none() {
            return domain("box volume exceeds the index space");
        }
        Ok(Self { offset, sides })
    }

    /// Box with its minimal corner at the origin.
    pub fn at_origin(sides: Vec<usize>) -> Result<Self> {
        Self::new(vec![0; sides.len()], sides)
    }

    /// Box of side `side` in every one of `dim` axes, placed so that the
    /// origin sits at its center (lower-middle for even sides).
    pub fn centered_cube(dim: usize, side: usize) -> Result<Self> {
        let lo = -((side / 2) as i64);
        Self::new(vec![lo; dim], vec![side; dim])
    }

    /// The zero-dimensional lattice: a single site with no coordinates.
    pub fn singleton() -> Self {
        Self {
            offset: Vec::new(),
            sides: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn volume(&self) -> usize {
        self.sides.iter().product()
    }

    /// Smallest coordinate along `axis`.
    pub fn lo(&self, axis: usize) -> i64 {
        self.offset[axis]
    }

    /// Largest coordinate along `axis`.
    pub fn hi(&self, axis: usize) -> i64 {
        self.offset[axis] + self.sides[axis] as i64 - 1
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        site.len() == self.dim()
            && site
                .iter()
                .enumerate()
                .all(|(a, &x)| x >= self.lo(a) && x <= self.hi(a))
    }

    pub fn contains_region(&self, other: &BoxRegion) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|a| other.lo(a) >= self.lo(a) && other.hi(a) <= self.hi(a))
    }

    /// Index stride of `axis` in the linear layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.sides[..axis].iter().product()
    }

    pub fn index_of(&self, site: &[i64]) -> Option<usize> {
        if !self.contains(site) {
            return None;
        }
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (a, &x) in site.iter().enumerate() {
            idx += (x - self.offset[a]) as usize * stride;
            stride *= self.sides[a];
        }
        Some(idx)
    }

    pub(crate) fn checked_index(&self, site: &[i64]) -> Result<usize> {
        if site.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: site.len(),
            });
        }
        self.index_of(site).ok_or_else(|| Error::OutsideRegion {
            site: site.to_vec(),
        })
    }

    pub fn coord_of(&self, index: usize) -> Vec<i64> {
        let mut rest = index;
        self.sides
            .iter()
            .zip(&self.offset)
            .map(|(&s, &o)| {
                let c = rest % s;
                rest /= s;
                o + c as i64
            })
            .collect()
    }

    /// Position of the site along `axis`, relative to the box corner.
    #[inline]
    pub(crate) fn local_coord(&self, index: usize, axis: usize) -> usize {
        (index / self.stride(axis)) % self.sides[axis]
    }

    /// Calls `f` on the in-region nearest neighbors of the site at `index`,
    /// axis by axis, lower neighbor first.
    #[inline]
    pub fn for_each_neighbor(&self, index: usize, mut f: impl FnMut(usize)) {
        let mut stride = 1usize;
        for &side in &self.sides {
            let c = (index / stride) % side;
            if c > 0 {
                f(index - stride);
            }
            if c + 1 < side {
                f(index + stride);
            }
            stride *= side;
        }
    }

    pub fn neighbor_indices(&self, index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.dim());
        self.for_each_neighbor(index, |j| out.push(j));
        out
    }

    /// The same box grown by one site on every face.
    pub fn expanded(&self) -> BoxRegion {
        BoxRegion {
            offset: self.offset.iter().map(|o| o - 1).collect(),
            sides: self.sides.iter().map(|s| s + 2).collect(),
        }
    }

    /// The box with `axis` removed.
    pub fn without_axis(&self, axis: usize) -> BoxRegion {
        let mut offset = self.offset.clone();
        let mut sides = self.sides.clone();
        offset.remove(axis);
        sides.remove(axis);
        BoxRegion { offset, sides }
    }

    /// The sub-box keeping coordinates `lo..lo+len` along `axis`.
    pub fn slab(&self, axis: usize, lo: i64, len: usize) -> Result<BoxRegion> {
        let mut offset = self.offset.clone();
        let mut sides = self.sides.clone();
        offset[axis] = lo;
        sides[axis] = len;
        let sub = BoxRegion::new(offset, sides)?;
        if !self.contains_region(&sub) {
            return domain("slab exceeds the region");
        }
        Ok(sub)
    }
}

/// The ℓ1-distance-1 sites of `site` inside `region`, axis by axis with the
/// lower neighbor first.
pub fn neighbors(site: &[i64], region: &BoxRegion) -> Result<Vec<Vec<i64>>> {
    let idx = region.checked_index(site)?;
    Ok(region
        .neighbor_indices(idx)
        .into_iter()
        .map(|j| region.coord_of(j))
        .collect())
}

/// Occupancy field over a [`BoxRegion`], stored as a packed bit field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    region: BoxRegion,
    words: Vec<u64>,
}

impl Configuration {
    pub fn empty(region: BoxRegion) -> Self {
        let words = vec![0; region.volume().div_ceil(64)];
        Self { region, words }
    }

    pub fn full(region: BoxRegion) -> Self {
        let mut c = Self::empty(region);
        for i in 0..c.volume() {
            c.set(i, true);
        }
        c
    }

    pub fn from_sites(region: BoxRegion, sites: &[Vec<i64>]) -> Result<Self> {
        let mut c = Self::empty(region);
        for s in sites {
            let i = c.region.checked_index(s)?;
            c.set(i, true);
        }
        Ok(c)
    }

    pub fn from_bools(region: BoxRegion, bits: &[bool]) -> Result<Self> {
        if bits.len() != region.volume() {
            return domain("bit count does not match the region volume");
        }
        let mut c = Self::empty(region);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                c.set(i, true);
            }
        }
        Ok(c)
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn volume(&self) -> usize {
        self.region.volume()
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        let mask = 1u64 << (index % 64);
        if value {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    pub fn is_occupied(&self, site: &[i64]) -> bool {
        self.region.index_of(site).is_some_and(|i| self.get(i))
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.volume()
    }

    /// Linear indices of occupied sites in increasing order.
    pub fn occupied_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn occupied_sites(&self) -> Vec<Vec<i64>> {
        self.occupied_indices()
            .map(|i| self.region.coord_of(i))
            .collect()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.volume()).map(|i| self.get(i)).collect()
    }

    /// `self ⊆ other`; both must live on the same region.
    pub fn is_subset_of(&self, other: &Configuration) -> Result<bool> {
        self.check_region(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    pub fn union(&self, other: &Configuration) -> Result<Configuration> {
        self.check_region(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Ok(Configuration {
            region: self.region.clone(),
            words,
        })
    }

    pub fn complement(&self) -> Configuration {
        let mut c = Configuration {
            region: self.region.clone(),
            words: self.words.iter().map(|w| !w).collect(),
        };
        c.clear_padding();
        c
    }

    /// The restriction of this configuration to a sub-box.
    pub fn restrict(&self, sub: &BoxRegion) -> Result<Configuration> {
        if !self.region.contains_region(sub) {
            return domain("subregion is not contained in the region");
        }
        let mut out = Configuration::empty(sub.clone());
        for j in 0..sub.volume() {
            let site = sub.coord_of(j);
            if self.is_occupied(&site) {
                out.set(j, true);
            }
        }
        Ok(out)
    }

    /// Copies the occupied sites of `part` (a sub-box) into `self`.
    pub fn paste(&mut self, part: &Configuration) -> Result<()> {
        if !self.region.contains_region(&part.region) {
            return domain("pasted configuration does not fit the region");
        }
        for j in part.occupied_indices() {
            let i = self.region.index_of(&part.region.coord_of(j)).unwrap();
            self.set(i, true);
        }
        Ok(())
    }

    fn check_region(&self, other: &Configuration) -> Result<()> {
        if self.region != other.region {
            return Err(Error::RegionMismatch);
        }
        Ok(())
    }

    fn clear_padding(&mut self) {
        let v = self.volume();
        if !v.is_multiple_of(64) {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (v % 64)) - 1;
            }
        }
    }
}
