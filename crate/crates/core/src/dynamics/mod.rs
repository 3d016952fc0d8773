//! The irreversible growth process and its variants.
//!
//! [`run_graphical`] realizes the process literally from the site clocks
//! of a [`GraphicalField`]: arrivals are processed in global time order and
//! an arrival at an empty site `x` occupies it when its mark is at most the
//! rate for the current number of occupied neighbors. Processes sharing a
//! field are therefore coupled, which is what [`run_coupled`] and
//! [`multilayer_run`] rely on. [`run_fast`] samples the same law with a
//! next-reaction scheme and no pathwise link to the field.

mod fast;
mod graphical;
mod stop;

pub use fast::run_fast;
pub use graphical::run_graphical;
pub use stop::{StopReason, StopRule};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{BoundaryCondition, BoxRegion, Configuration};
use crate::model::ModelParams;
use crate::randomness::GraphicalField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessVariant {
    #[default]
    Full,
    /// Zero-neighbor occupations suppressed: `c̃(0) = 0`.
    NonNucleating,
}

impl ProcessVariant {
    pub fn rates(self, params: &ModelParams) -> Vec<f64> {
        let mut r = params.rate_table();
        if self == ProcessVariant::NonNucleating {
            r[0] = 0.0;
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Graphical,
    #[default]
    Fast,
}

impl Engine {
    pub fn run(
        self,
        params: &ModelParams,
        process: &Process,
        field: &GraphicalField,
    ) -> Result<Trajectory> {
        match self {
            Engine::Graphical => run_graphical(params, process, field),
            Engine::Fast => run_fast(params, process, field),
        }
    }
}

/// Everything about one run except the parameters and the randomness. The
/// region is the region of `initial`.
#[derive(Debug, Clone)]
pub struct Process {
    pub boundary: BoundaryCondition,
    pub variant: ProcessVariant,
    pub initial: Configuration,
    pub stop: StopRule,
}

impl Process {
    pub fn new(initial: Configuration, stop: StopRule) -> Self {
        Self {
            boundary: BoundaryCondition::Empty,
            variant: ProcessVariant::Full,
            initial,
            stop,
        }
    }

    pub fn boundary(mut self, boundary: BoundaryCondition) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn variant(mut self, variant: ProcessVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn region(&self) -> &BoxRegion {
        self.initial.region()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    /// Linear index in the run's region.
    pub site: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial: Configuration,
    pub events: Vec<Event>,
    pub final_config: Configuration,
    pub stop_reason: StopReason,
    pub final_time: f64,
    /// Clock rings examined: every processed arrival for the graphical
    /// engine, every accepted firing for the fast one.
    pub arrivals: u64,
}

impl Trajectory {
    pub fn region(&self) -> &BoxRegion {
        self.initial.region()
    }

    /// Occupied set at time `t` (events at exactly `t` included).
    pub fn configuration_at(&self, t: f64) -> Configuration {
        let mut c = self.initial.clone();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            c.set(e.site, true);
        }
        c
    }

    /// Time at which `site` became occupied: 0 when initially occupied,
    /// `None` when it never was during the run.
    pub fn occupation_time(&self, site: &[i64]) -> Option<f64> {
        let idx = self.region().index_of(site)?;
        if self.initial.get(idx) {
            return Some(0.0);
        }
        self.events.iter().find(|e| e.site == idx).map(|e| e.time)
    }

    /// Event log as CSV with columns `time,x_1,…,x_d`.
    pub fn events_csv(&self) -> String {
        let d = self.region().dim();
        let mut out = String::from("time");
        for a in 1..=d {
            out.push_str(&format!(",x_{a}"));
        }
        out.push('\n');
        for e in &self.events {
            out.push_str(&format!("{:?}", e.time));
            for x in self.region().coord_of(e.site) {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// State shared by both engines after argument checking.
pub(crate) struct Setup {
    pub rates: Vec<f64>,
    /// Occupied neighbors (boundary included) of every site of the initial
    /// configuration.
    pub neighbors: Vec<u8>,
    pub occupied: Vec<bool>,
    pub time_limit: Option<f64>,
}

pub(crate) fn prepare(
    params: &ModelParams,
    process: &Process,
    field: &GraphicalField,
) -> Result<Setup> {
    params.checked()?;
    let region = process.region();
    if region.dim() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            got: region.dim(),
        });
    }
    if !field.region().contains_region(region) {
        return domain("run region is not covered by the graphical field");
    }
    process.boundary.validate(region)?;
    let rates = process.variant.rates(params);
    let mut neighbors = process.boundary.contact_counts(region);
    let occupied = process.initial.to_bools();
    for i in process.initial.occupied_indices() {
        region.for_each_neighbor(i, |j| neighbors[j] += 1);
    }
    let time_limit = process.stop.time_limit();
    stop::validate(&process.stop, process, &rates, &neighbors)?;
    Ok(Setup {
        rates,
        neighbors,
        occupied,
        time_limit,
    })
}

/// Runs several processes on one region against the same field.
pub fn run_coupled(
    params: &ModelParams,
    processes: &[Process],
    field: &GraphicalField,
) -> Result<Vec<Trajectory>> {
    if let Some(first) = processes.first() {
        if processes.iter().any(|p| p.region() != first.region()) {
            return Err(Error::RegionMismatch);
        }
    }
    processes
        .iter()
        .map(|p| run_graphical(params, p, field))
        .collect()
}

/// Final configurations of the height-2 slices of `cylinder` along `axis`,
/// each run independently with sandwich boundary conditions and without
/// nucleation, to time `horizon`, all from the same field.
pub fn multilayer_slices(
    params: &ModelParams,
    cylinder: &BoxRegion,
    axis: usize,
    field: &GraphicalField,
    horizon: f64,
) -> Result<Vec<Configuration>> {
    if axis >= cylinder.dim() {
        return domain(format!("slice axis {axis} out of range"));
    }
    let height = cylinder.sides()[axis];
    if !height.is_multiple_of(2) {
        return domain("cylinder height along the slice axis must be even");
    }
    (0..height / 2)
        .map(|k| {
            let slab = cylinder.slab(axis, cylinder.lo(axis) + 2 * k as i64, 2)?;
            let process = Process::new(Configuration::empty(slab), StopRule::TimeLimit(horizon))
                .boundary(BoundaryCondition::Sandwich(axis))
                .variant(ProcessVariant::NonNucleating);
            Ok(run_graphical(params, &process, field)?.final_config)
        })
        .collect()
}

/// The multilayer process: concatenation of [`multilayer_slices`].
pub fn multilayer_run(
    params: &ModelParams,
    cylinder: &BoxRegion,
    axis: usize,
    field: &GraphicalField,
    horizon: f64,
) -> Result<Configuration> {
    let mut out = Configuration::empty(cylinder.clone());
    for slice in multilayer_slices(params, cylinder, axis, field, horizon)? {
        out.paste(&slice)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
