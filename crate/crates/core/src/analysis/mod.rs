//! Observables over configurations and trajectories.

pub mod stats;

use crate::dynamics::Trajectory;
use crate::error::{domain, Error, Result};
use crate::lattice::{connected_clusters, diameter_sup, ClusterTracker, Configuration};

/// Projection along `axis`: a base site is occupied when some site of its
/// column is.
pub fn project_columns(config: &Configuration, axis: usize) -> Result<Configuration> {
    let region = config.region();
    if region.dim() == 0 {
        return domain("cannot project a zero-dimensional configuration");
    }
    if axis >= region.dim() {
        return domain(format!("axis {axis} out of range"));
    }
    let base = region.without_axis(axis);
    let mut out = Configuration::empty(base.clone());
    for i in config.occupied_indices() {
        let mut x = region.coord_of(i);
        x.remove(axis);
        out.set(base.index_of(&x).expect("projection lies in the base"), true);
    }
    Ok(out)
}

/// Largest sup-norm cluster diameter; 0 for the empty configuration.
pub fn max_cluster_diameter(config: &Configuration) -> usize {
    connected_clusters(config)
        .iter()
        .map(|c| diameter_sup(c).expect("clusters are nonempty"))
        .max()
        .unwrap_or(0)
}

/// `a ⊆ b`.
pub fn contains(a: &Configuration, b: &Configuration) -> Result<bool> {
    a.is_subset_of(b)
}

/// Number of event times (time 0 included) at which `lower` is not
/// contained in `upper`. Both trajectories must share a region.
pub fn ordering_violations(lower: &Trajectory, upper: &Trajectory) -> Result<usize> {
    if lower.region() != upper.region() {
        return Err(Error::RegionMismatch);
    }
    let mut lo = lower.initial.to_bools();
    let mut up = upper.initial.to_bools();
    let mut excess = lo.iter().zip(&up).filter(|(a, b)| **a && !**b).count();
    let mut violations = (excess > 0) as usize;
    let (mut i, mut j) = (0, 0);
    let (le, ue) = (&lower.events, &upper.events);
    while i < le.len() || j < ue.len() {
        let t = match (le.get(i), ue.get(j)) {
            (Some(a), Some(b)) => a.time.min(b.time),
            (Some(a), None) => a.time,
            (None, Some(b)) => b.time,
            (None, None) => unreachable!(),
        };
        while let Some(e) = le.get(i).filter(|e| e.time <= t) {
            if !lo[e.site] && !up[e.site] {
                excess += 1;
            }
            lo[e.site] = true;
            i += 1;
        }
        while let Some(e) = ue.get(j).filter(|e| e.time <= t) {
            if lo[e.site] && !up[e.site] {
                excess -= 1;
            }
            up[e.site] = true;
            j += 1;
        }
        violations += (excess > 0) as usize;
    }
    Ok(violations)
}

/// For each threshold, the first time some cluster of the trajectory has
/// sup-norm diameter at least that threshold. A threshold of 0 is reached
/// at time 0 when the initial configuration is nonempty.
pub fn diameter_ladder_times(trajectory: &Trajectory, thresholds: &[usize]) -> Vec<Option<f64>> {
    let mut out = vec![None; thresholds.len()];
    let mut tracker = ClusterTracker::from_configuration(&trajectory.initial);
    let mut record = |tracker: &ClusterTracker, t: f64, nonempty: bool| {
        for (slot, &m) in out.iter_mut().zip(thresholds) {
            if slot.is_none() && nonempty && tracker.max_diameter() >= m {
                *slot = Some(t);
            }
        }
    };
    record(&tracker, 0.0, !trajectory.initial.is_empty());
    for e in &trajectory.events {
        tracker.insert(e.site);
        record(&tracker, e.time, true);
    }
    out
}
