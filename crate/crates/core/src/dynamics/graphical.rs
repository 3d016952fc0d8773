use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::stop::{Monitor, StopReason, StopRule};
use super::{prepare, Event, Process, Trajectory};
use crate::error::Result;
use crate::lattice::Configuration;
use crate::model::ModelParams;
use crate::randomness::{GraphicalField, SiteStream};

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    site: u32,
    mark: f64,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // ties between sites broken by index
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.site.cmp(&other.site))
    }
}

/// Exact realization from the field's clocks.
///
/// An empty site whose current rate is zero cannot accept any arrival, so
/// its clock is parked and fast-forwarded past the current time once its
/// rate becomes positive. This skips work without changing the path.
pub fn run_graphical(
    params: &ModelParams,
    process: &Process,
    field: &GraphicalField,
) -> Result<Trajectory> {
    let setup = prepare(params, process, field)?;
    let region = process.region().clone();
    let rates = setup.rates;
    let mut nbrs = setup.neighbors;
    let mut occupied = setup.occupied;
    let limit = setup.time_limit;
    let mut count = process.initial.count();

    let mut monitor = Monitor::new(&process.stop, &region)?;
    let mut events = Vec::new();
    let finish = |events: Vec<Event>, occupied: &[bool], reason: StopReason, time: f64, arrivals: u64| {
        Ok(Trajectory {
            arrivals,
            initial: process.initial.clone(),
            events,
            final_config: Configuration::from_bools(region.clone(), occupied)?,
            stop_reason: reason,
            final_time: time,
        })
    };
    if let Some(atom) = monitor.start(&occupied) {
        return finish(events, &occupied, StopReason::Rule(atom), 0.0, 0);
    }

    let n = region.volume();
    let mut streams: Vec<Option<SiteStream>> = vec![None; n];
    let mut heap = BinaryHeap::with_capacity(n);
    for i in 0..n {
        if occupied[i] {
            continue;
        }
        let mut s = field.stream(&region.coord_of(i));
        if rates[nbrs[i] as usize] > 0.0 {
            let a = s.next_arrival();
            heap.push(Reverse(Pending {
                time: a.time,
                site: i as u32,
                mark: a.mark,
            }));
        }
        streams[i] = Some(s);
    }
    let mut parked: Vec<bool> = (0..n)
        .map(|i| !occupied[i] && rates[nbrs[i] as usize] == 0.0)
        .collect();
    let mut woken = Vec::new();
    let mut arrivals = 0u64;

    while let Some(Reverse(p)) = heap.pop() {
        arrivals += 1;
        if let Some(t) = limit {
            if p.time > t {
                return finish(events, &occupied, StopReason::Rule(StopRule::TimeLimit(t)), t, arrivals - 1);
            }
        }
        let i = p.site as usize;
        if p.mark <= rates[nbrs[i] as usize] {
            occupied[i] = true;
            count += 1;
            streams[i] = None;
            events.push(Event { time: p.time, site: i });
            region.for_each_neighbor(i, |j| {
                if !occupied[j] {
                    nbrs[j] += 1;
                    if parked[j] && rates[nbrs[j] as usize] > 0.0 {
                        woken.push(j);
                    }
                }
            });
            for j in woken.drain(..) {
                parked[j] = false;
                let s = streams[j].as_mut().unwrap();
                let mut a = s.next_arrival();
                while a.time <= p.time {
                    arrivals += 1;
                    a = s.next_arrival();
                }
                heap.push(Reverse(Pending {
                    time: a.time,
                    site: j as u32,
                    mark: a.mark,
                }));
            }
            if let Some(atom) = monitor.after(&occupied, count, i) {
                return finish(events, &occupied, StopReason::Rule(atom), p.time, arrivals);
            }
        } else {
            let a = streams[i].as_mut().unwrap().next_arrival();
            heap.push(Reverse(Pending {
                time: a.time,
                site: p.site,
                mark: a.mark,
            }));
        }
    }
    let end = events.last().map_or(0.0, |e: &Event| e.time);
    match limit {
        Some(t) => finish(events, &occupied, StopReason::Rule(StopRule::TimeLimit(t)), t.max(end), arrivals),
        None => finish(events, &occupied, StopReason::Exhausted, end, arrivals),
    }
}
