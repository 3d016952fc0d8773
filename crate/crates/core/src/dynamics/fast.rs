use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::stop::{Monitor, StopReason, StopRule};
use super::{prepare, Event, Process, Trajectory};
use crate::error::Result;
use crate::lattice::Configuration;
use crate::model::ModelParams;
use crate::randomness::{derive_seed, GraphicalField};

const FAST_STREAM: u64 = 0xfa57;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    time: f64,
    site: u32,
    generation: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.site.cmp(&other.site))
    }
}

/// Set of site indices with O(1) insert, remove and uniform sampling.
struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedSet {
    const ABSENT: u32 = u32::MAX;

    fn new(n: usize) -> Self {
        Self {
            items: Vec::new(),
            pos: vec![Self::ABSENT; n],
        }
    }

    fn insert(&mut self, i: usize) {
        if self.pos[i] == Self::ABSENT {
            self.pos[i] = self.items.len() as u32;
            self.items.push(i as u32);
        }
    }

    fn remove(&mut self, i: usize) {
        let p = self.pos[i];
        if p == Self::ABSENT {
            return;
        }
        let last = self.items.pop().unwrap();
        if last as usize != i {
            self.items[p as usize] = last;
            self.pos[last as usize] = p;
        }
        self.pos[i] = Self::ABSENT;
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn get(&self, k: usize) -> usize {
        self.items[k] as usize
    }
}

/// Next-reaction sampler with the same law as [`super::run_graphical`].
///
/// Every empty site with at least one occupied neighbor keeps a candidate
/// firing time, redrawn whenever its neighbor count changes. All
/// zero-neighbor sites share the rate `c(0)` and are pooled into one
/// nucleation clock of rate `c(0)·|pool|`, redrawn after every event; the
/// nucleating site is uniform in the pool. The randomness comes from a
/// generator seeded from the field's seed, not from its clocks.
pub fn run_fast(
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
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(field.seed(), FAST_STREAM));

    let mut monitor = Monitor::new(&process.stop, &region)?;
    let mut events = Vec::new();
    let finish = |events: Vec<Event>, occupied: &[bool], reason: StopReason, time: f64| {
        Ok(Trajectory {
            arrivals: events.len() as u64,
            initial: process.initial.clone(),
            events,
            final_config: Configuration::from_bools(region.clone(), occupied)?,
            stop_reason: reason,
            final_time: time,
        })
    };
    if let Some(atom) = monitor.start(&occupied) {
        return finish(events, &occupied, StopReason::Rule(atom), 0.0);
    }

    let n = region.volume();
    let nucleation_rate = rates[0];
    let mut pool = IndexedSet::new(n);
    let mut generation = vec![0u32; n];
    let mut heap = BinaryHeap::new();
    for i in 0..n {
        if occupied[i] {
            continue;
        }
        if nbrs[i] == 0 {
            pool.insert(i);
        } else {
            let r = rates[nbrs[i] as usize];
            if r > 0.0 {
                let dt: f64 = rng.sample(Exp1);
                heap.push(Reverse(Candidate {
                    time: dt / r,
                    site: i as u32,
                    generation: 0,
                }));
            }
        }
    }

    let mut now = 0.0f64;
    loop {
        while let Some(Reverse(c)) = heap.peek() {
            if generation[c.site as usize] != c.generation || occupied[c.site as usize] {
                heap.pop();
            } else {
                break;
            }
        }
        let individual = heap.peek().map(|Reverse(c)| *c);
        let nucleation = if nucleation_rate > 0.0 && pool.len() > 0 {
            let dt: f64 = rng.sample(Exp1);
            Some(now + dt / (nucleation_rate * pool.len() as f64))
        } else {
            None
        };
        let (time, site) = match (individual, nucleation) {
            (None, None) => break,
            (Some(c), Some(t)) if t < c.time => (t, pool.get(rng.random_range(0..pool.len()))),
            (None, Some(t)) => (t, pool.get(rng.random_range(0..pool.len()))),
            (Some(c), _) => {
                heap.pop();
                (c.time, c.site as usize)
            }
        };
        if let Some(t) = limit {
            if time > t {
                return finish(events, &occupied, StopReason::Rule(StopRule::TimeLimit(t)), t);
            }
        }
        now = time;
        occupied[site] = true;
        count += 1;
        pool.remove(site);
        generation[site] = generation[site].wrapping_add(1);
        events.push(Event { time, site });
        region.for_each_neighbor(site, |j| {
            if occupied[j] {
                return;
            }
            if nbrs[j] == 0 {
                pool.remove(j);
            }
            nbrs[j] += 1;
            generation[j] = generation[j].wrapping_add(1);
            let r = rates[nbrs[j] as usize];
            if r > 0.0 {
                let dt: f64 = rng.sample(Exp1);
                heap.push(Reverse(Candidate {
                    time: now + dt / r,
                    site: j as u32,
                    generation: generation[j],
                }));
            }
        });
        if let Some(atom) = monitor.after(&occupied, count, site) {
            return finish(events, &occupied, StopReason::Rule(atom), time);
        }
    }
    match limit {
        Some(t) => finish(events, &occupied, StopReason::Rule(StopRule::TimeLimit(t)), t.max(now)),
        None => finish(events, &occupied, StopReason::Exhausted, now),
    }
}
