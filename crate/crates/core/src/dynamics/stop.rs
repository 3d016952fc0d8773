use serde::{Deserialize, Serialize};

use super::Process;
use crate::error::{domain, Error, Result};
use crate::lattice::{BoxRegion, ClusterTracker};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    OriginOccupied,
    SiteOccupied(Vec<i64>),
    BoxFull,
    /// At least this many sites occupied.
    OccupiedAtLeast(usize),
    /// Some cluster reached this sup-norm diameter.
    MaxClusterDiameter(usize),
    /// Some cluster touches both faces along the axis.
    Crossed(usize),
    TimeLimit(f64),
    /// Whichever comes first.
    FirstOf(Vec<StopRule>),
}

impl StopRule {
    pub fn first_of(rules: impl IntoIterator<Item = StopRule>) -> StopRule {
        StopRule::FirstOf(rules.into_iter().collect())
    }

    pub(crate) fn atoms(&self) -> Vec<&StopRule> {
        match self {
            StopRule::FirstOf(rules) => rules.iter().flat_map(|r| r.atoms()).collect(),
            other => vec![other],
        }
    }

    /// Smallest time limit among the atoms.
    pub fn time_limit(&self) -> Option<f64> {
        self.atoms()
            .into_iter()
            .filter_map(|a| match a {
                StopRule::TimeLimit(t) => Some(*t),
                _ => None,
            })
            .reduce(f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    /// The atom of the stop rule that fired first.
    Rule(StopRule),
    /// No further change was possible and no rule fired.
    Exhausted,
}

impl StopReason {
    pub fn is_time_limit(&self) -> bool {
        matches!(self, StopReason::Rule(StopRule::TimeLimit(_)))
    }
}

enum Check {
    Site(usize),
    Full,
    AtLeast(usize),
    Diameter(usize),
    Crossed(usize),
}

/// Evaluates the non-temporal atoms of a stop rule as sites get occupied.
pub(crate) struct Monitor {
    checks: Vec<(Check, StopRule)>,
    tracker: Option<ClusterTracker>,
    volume: usize,
}

impl Monitor {
    pub fn new(rule: &StopRule, region: &BoxRegion) -> Result<Self> {
        let mut checks = Vec::new();
        let mut needs_tracker = false;
        for atom in rule.atoms() {
            let check = match atom {
                StopRule::OriginOccupied => {
                    let origin = vec![0; region.dim()];
                    let idx = region
                        .index_of(&origin)
                        .ok_or(Error::OutsideRegion { site: origin })?;
                    Check::Site(idx)
                }
                StopRule::SiteOccupied(s) => Check::Site(region.checked_index(s)?),
                StopRule::BoxFull => Check::Full,
                StopRule::OccupiedAtLeast(n) => Check::AtLeast(*n),
                StopRule::MaxClusterDiameter(m) => {
                    needs_tracker = true;
                    Check::Diameter(*m)
                }
                StopRule::Crossed(a) => {
                    if *a >= region.dim() {
                        return domain(format!("crossing axis {a} out of range"));
                    }
                    needs_tracker = true;
                    Check::Crossed(*a)
                }
                StopRule::TimeLimit(t) => {
                    if t.is_nan() || *t < 0.0 {
                        return domain("time limit must be nonnegative");
                    }
                    continue;
                }
                StopRule::FirstOf(_) => unreachable!("atoms are flattened"),
            };
            checks.push((check, atom.clone()));
        }
        Ok(Self {
            checks,
            tracker: needs_tracker.then(|| ClusterTracker::new(region)),
            volume: region.volume(),
        })
    }

    /// Registers the initially occupied sites and checks the rule at time 0.
    pub fn start(&mut self, occupied: &[bool]) -> Option<StopRule> {
        let count = occupied.iter().filter(|&&b| b).count();
        if let Some(t) = self.tracker.as_mut() {
            for (i, _) in occupied.iter().enumerate().filter(|(_, &b)| b) {
                t.insert(i);
            }
        }
        let occ: Vec<usize> = (0..occupied.len()).filter(|&i| occupied[i]).collect();
        self.evaluate(occupied, count, &occ)
    }

    /// Records that `site` was just occupied and checks the rule.
    pub fn after(&mut self, occupied: &[bool], count: usize, site: usize) -> Option<StopRule> {
        if let Some(t) = self.tracker.as_mut() {
            t.insert(site);
        }
        self.evaluate(occupied, count, &[site])
    }

    fn evaluate(&mut self, occupied: &[bool], count: usize, touched: &[usize]) -> Option<StopRule> {
        for (check, atom) in &self.checks {
            let hit = match check {
                Check::Site(i) => occupied[*i],
                Check::Full => count == self.volume,
                Check::AtLeast(n) => count >= *n,
                Check::Diameter(m) => self.tracker.as_ref().unwrap().max_diameter() >= *m && count > 0,
                Check::Crossed(a) => {
                    let t = self.tracker.as_mut().unwrap();
                    touched.iter().any(|&i| t.cluster_spans(i, *a))
                }
            };
            if hit {
                return Some(atom.clone());
            }
        }
        None
    }
}

/// Rejects rules that can never fire when no time limit bounds the run.
pub(crate) fn validate(
    rule: &StopRule,
    process: &Process,
    rates: &[f64],
    neighbors: &[u8],
) -> Result<()> {
    let region = process.region();
    let mut monitor = Monitor::new(rule, region)?;
    if rule.time_limit().is_some() {
        return Ok(());
    }
    let occupied = process.initial.to_bools();
    if monitor.start(&occupied).is_some() {
        return Ok(());
    }
    // with c(1) > 0 any seed of occupation spreads over the whole (connected) box
    let seeded = !process.initial.is_empty() || neighbors.iter().any(|&n| n > 0);
    let fills = rates[0] > 0.0 || (rates.len() > 1 && rates[1] > 0.0 && seeded);
    if fills {
        let mut full = Monitor::new(rule, region)?;
        if full.start(&vec![true; region.volume()]).is_some() {
            return Ok(());
        }
    }
    Err(Error::UnreachableStop)
}
