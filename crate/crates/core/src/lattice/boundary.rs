use serde::{Deserialize, Serialize};

use super::{BoxRegion, Configuration};
use crate::error::{domain, Result};

/// Occupancy of the one-site shell surrounding a box.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    #[default]
    Empty,
    /// The layer just below the box along `axis` is occupied.
    Floor(usize),
    /// The layers just below and just above the box along `axis` are occupied.
    Sandwich(usize),
    /// Arbitrary shell; the configuration lives on `region.expanded()` and
    /// only its shell sites are read.
    #[serde(skip)]
    External(Configuration),
}

impl BoundaryCondition {
    pub fn validate(&self, region: &BoxRegion) -> Result<()> {
        match self {
            BoundaryCondition::Empty => Ok(()),
            BoundaryCondition::Floor(a) | BoundaryCondition::Sandwich(a) => {
                if *a >= region.dim() {
                    return domain(format!(
                        "boundary axis {a} out of range for dimension {}",
                        region.dim()
                    ));
                }
                Ok(())
            }
            BoundaryCondition::External(shell) => {
                if *shell.region() != region.expanded() {
                    return domain("external boundary must live on the expanded region");
                }
                Ok(())
            }
        }
    }

    /// Whether the boundary occupies the outside neighbor of an in-region
    /// site reached by stepping off the `upper` (or lower) face on `axis`.
    fn occupies(&self, region: &BoxRegion, site_index: usize, axis: usize, upper: bool) -> bool {
        match self {
            BoundaryCondition::Empty => false,
            BoundaryCondition::Floor(a) => *a == axis && !upper,
            BoundaryCondition::Sandwich(a) => *a == axis,
            BoundaryCondition::External(shell) => {
                let mut site = region.coord_of(site_index);
                site[axis] += if upper { 1 } else { -1 };
                shell.is_occupied(&site)
            }
        }
    }

    /// Number of occupied boundary sites adjacent to each site of `region`.
    pub fn contact_counts(&self, region: &BoxRegion) -> Vec<u8> {
        let mut counts = vec![0u8; region.volume()];
        if matches!(self, BoundaryCondition::Empty) {
            return counts;
        }
        for (i, slot) in counts.iter_mut().enumerate() {
            for axis in 0..region.dim() {
                let c = region.local_coord(i, axis);
                if c == 0 && self.occupies(region, i, axis, false) {
                    *slot += 1;
                }
                if c + 1 == region.sides()[axis] && self.occupies(region, i, axis, true) {
                    *slot += 1;
                }
            }
        }
        counts
    }
}

/// Occupied neighbors of `site`: in-region neighbors occupied in `config`
/// plus adjacent boundary sites occupied by `boundary`.
pub fn occupied_neighbor_count(
    config: &Configuration,
    boundary: &BoundaryCondition,
    site: &[i64],
) -> Result<usize> {
    let region = config.region();
    let idx = region.checked_index(site)?;
    boundary.validate(region)?;
    let mut n = 0;
    region.for_each_neighbor(idx, |j| {
        if config.get(j) {
            n += 1;
        }
    });
    for axis in 0..region.dim() {
        let c = region.local_coord(idx, axis);
        if c == 0 && boundary.occupies(region, idx, axis, false) {
            n += 1;
        }
        if c + 1 == region.sides()[axis] && boundary.occupies(region, idx, axis, true) {
            n += 1;
        }
    }
    Ok(n)
}
