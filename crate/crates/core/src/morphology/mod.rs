//! Threshold-two bootstrap percolation and the sup-norm morphology used to
//! sandwich the growth process between deterministic configurations.

use std::collections::VecDeque;

use crate::error::{domain, Result};
use crate::lattice::{BoxRegion, ClusterTracker, Configuration};

/// Occupied-neighbor threshold of the bootstrap rule.
const THRESHOLD: u8 = 2;

/// Runs the bootstrap rule on `occupied` in place until no empty site has
/// two occupied neighbors. `on_occupy` sees every site the rule adds, in
/// FIFO order.
fn bootstrap_in_place(
    region: &BoxRegion,
    occupied: &mut [bool],
    counts: &mut [u8],
    queue: &mut VecDeque<usize>,
    mut on_occupy: impl FnMut(usize) -> bool,
) -> bool {
    while let Some(i) = queue.pop_front() {
        if occupied[i] {
            continue;
        }
        occupied[i] = true;
        if on_occupy(i) {
            return true;
        }
        region.for_each_neighbor(i, |j| {
            counts[j] += 1;
            if !occupied[j] && counts[j] == THRESHOLD {
                queue.push_back(j);
            }
        });
    }
    false
}

/// The smallest superset of `config` in which no empty site has at least
/// two occupied neighbors inside the region.
pub fn bootstrap_closure(config: &Configuration) -> Configuration {
    let region = config.region();
    let n = region.volume();
    let mut occupied = config.to_bools();
    let mut counts = vec![0u8; n];
    for i in config.occupied_indices() {
        region.for_each_neighbor(i, |j| counts[j] += 1);
    }
    let mut queue: VecDeque<usize> = (0..n)
        .filter(|&i| !occupied[i] && counts[i] >= THRESHOLD)
        .collect();
    bootstrap_in_place(region, &mut occupied, &mut counts, &mut queue, |_| false);
    Configuration::from_bools(region.clone(), &occupied).expect("same region")
}

/// Max filter of radius `radius` along one axis.
fn spread_along(region: &BoxRegion, bits: &[bool], axis: usize, radius: usize) -> Vec<bool> {
    let side = region.sides()[axis];
    let stride = region.stride(axis);
    let mut out = vec![false; bits.len()];
    let mut prefix = vec![0u32; side + 1];
    for start in (0..bits.len()).filter(|&i| region.local_coord(i, axis) == 0) {
        for p in 0..side {
            prefix[p + 1] = prefix[p] + bits[start + p * stride] as u32;
        }
        for p in 0..side {
            let lo = p.saturating_sub(radius);
            let hi = (p + radius + 1).min(side);
            out[start + p * stride] = prefix[hi] > prefix[lo];
        }
    }
    out
}

/// Occupies every site at sup-norm distance strictly less than `l` from an
/// occupied site.
pub fn dilate(config: &Configuration, l: usize) -> Configuration {
    let region = config.region();
    if l == 0 {
        return Configuration::empty(region.clone());
    }
    let mut bits = config.to_bools();
    for axis in 0..region.dim() {
        bits = spread_along(region, &bits, axis, l - 1);
    }
    Configuration::from_bools(region.clone(), &bits).expect("same region")
}

/// Empties every site at sup-norm distance strictly less than `l` from an
/// empty site.
pub fn erode(config: &Configuration, l: usize) -> Configuration {
    dilate(&config.complement(), l).complement()
}

/// Whether the bootstrap rule run on `subregion` alone, from the sites of
/// `config` inside it, fills the subregion.
pub fn internally_spanned(config: &Configuration, subregion: &BoxRegion) -> Result<bool> {
    Ok(bootstrap_closure(&config.restrict(subregion)?).is_full())
}

/// A box of sup-norm diameter between `k` and `2k + 1` that is internally
/// spanned in `config`, provided some component of the closure has
/// diameter above `2k + 1`.
///
/// The sites of `config` in the first such component (by smallest index)
/// are added one at a time in index order, each followed by the bootstrap
/// rule; the bounding box of the first cluster to reach diameter `k` is
/// returned. A cluster formed by a single occupation merges clusters of
/// diameter below `k` that all touch the new site, so it has diameter at
/// most `2k`.
pub fn al_witness(config: &Configuration, k: usize) -> Result<Option<BoxRegion>> {
    if k == 0 {
        return domain("witness scale must be positive");
    }
    let region = config.region();
    let closure = bootstrap_closure(config);
    let mut component = None;
    for idx in crate::lattice::connected_clusters(&closure) {
        let b = idx.bounding_box().expect("clusters are nonempty");
        if b.sides().iter().any(|&s| s > 2 * k + 2) {
            component = Some(b);
            break;
        }
    }
    let Some(component) = component else {
        return Ok(None);
    };

    let n = region.volume();
    let mut occupied = vec![false; n];
    let mut counts = vec![0u8; n];
    let mut tracker = ClusterTracker::new(region);
    let mut queue = VecDeque::new();
    let mut found = None;
    let seeds: Vec<usize> = config
        .occupied_indices()
        .filter(|&i| component.contains(&region.coord_of(i)))
        .collect();
    for s in seeds {
        queue.push_back(s);
        let hit = bootstrap_in_place(region, &mut occupied, &mut counts, &mut queue, |i| {
            tracker.insert(i);
            if tracker.cluster_diameter(i) >= k {
                found = Some(tracker.cluster_box(i));
                true
            } else {
                false
            }
        });
        if hit {
            return Ok(found);
        }
    }
    unreachable!("the component has diameter above 2k + 1")
}

/// The deterministic pair `(ρ, ξ)` bracketing a nucleation snapshot `η`:
/// `ρ` is the closure of `η` dilated by `l`, and `ξ` is `ρ` eroded by
/// `⌈l/2⌉`. Then `η ⊆ ξ ⊆ ρ`.
pub fn domination_pipeline(
    eta: &Configuration,
    l: usize,
) -> Result<(Configuration, Configuration)> {
    if l < 2 {
        return domain("dilation distance must be at least 2");
    }
    let rho = bootstrap_closure(&dilate(eta, l));
    let xi = erode(&rho, l.div_ceil(2));
    Ok((rho, xi))
}
