//! The graphical construction: per-site Poisson clocks with uniform marks.
//!
//! Every site `x` of `Z^d` carries a rate-one Poisson process with arrival
//! times `τ(x,1) < τ(x,2) < …` and a mark `U(x,i)` attached to each
//! arrival. Both are pure functions of `(seed, x, i)`: the site coordinates
//! are hashed together with the seed into a stream key, and the stream's
//! `n`-th raw word is the SplitMix64 output at counter `n`, so any arrival
//! can be regenerated without replaying the others' state. Streams are keyed
//! by absolute coordinates, which lets sub-boxes of a region share the same
//! randomness.

use std::collections::HashMap;

use crate::error::{domain, Result};
use crate::lattice::{BoxRegion, Configuration};
use crate::model::ModelParams;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent 64-bit seed from a base seed and a label.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix64(mix64(seed ^ 0x5851_f42d_4c95_7f2d).wrapping_add(label.wrapping_mul(GOLDEN)))
}

fn site_key(seed: u64, site: &[i64]) -> u64 {
    let mut k = mix64(seed.wrapping_add(GOLDEN) ^ 0xd1b5_4a32_d192_ed03);
    k = mix64(k ^ site.len() as u64);
    for &c in site {
        k = mix64(k.wrapping_add(GOLDEN) ^ c as u64);
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub time: f64,
    pub mark: f64,
}

/// Sequential cursor over one site's arrivals.
#[derive(Debug, Clone)]
pub struct SiteStream {
    key: u64,
    count: u64,
    time: f64,
}

impl SiteStream {
    pub fn new(seed: u64, site: &[i64]) -> Self {
        Self {
            key: site_key(seed, site),
            count: 0,
            time: 0.0,
        }
    }

    #[inline]
    fn word(&self, n: u64) -> u64 {
        mix64(self.key.wrapping_add(n.wrapping_mul(GOLDEN)))
    }

    /// Number of arrivals already produced.
    pub fn consumed(&self) -> u64 {
        self.count
    }

    #[inline]
    pub fn next_arrival(&mut self) -> Arrival {
        let i = self.count;
        let gap = -(1.0 - unit_f64(self.word(2 * i + 1))).ln();
        let mark = unit_f64(self.word(2 * i + 2));
        self.time += gap;
        self.count += 1;
        Arrival {
            time: self.time,
            mark,
        }
    }
}

impl Iterator for SiteStream {
    type Item = Arrival;

    fn next(&mut self) -> Option<Arrival> {
        Some(self.next_arrival())
    }
}

/// Seeded source of all site clocks over a region.
#[derive(Debug, Clone)]
pub struct GraphicalField {
    seed: u64,
    region: BoxRegion,
    cache: HashMap<usize, (SiteStream, Vec<Arrival>)>,
}

impl GraphicalField {
    pub fn new(seed: u64, region: BoxRegion) -> Self {
        Self {
            seed,
            region,
            cache: HashMap::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    /// A fresh cursor over the arrivals of `site`.
    pub fn stream(&self, site: &[i64]) -> SiteStream {
        SiteStream::new(self.seed, site)
    }

    /// Earliest arrival at `site` strictly after `after`, with its mark.
    /// Arrivals are cached up to the largest time requested.
    pub fn next_event(&mut self, site: &[i64], after: f64) -> Result<Arrival> {
        if after.is_nan() || after < 0.0 {
            return domain("`after` must be a nonnegative time");
        }
        let idx = self.region.checked_index(site)?;
        let seed = self.seed;
        let (stream, seen) = self
            .cache
            .entry(idx)
            .or_insert_with(|| (SiteStream::new(seed, site), Vec::new()));
        let pos = seen.partition_point(|a| a.time <= after);
        if let Some(a) = seen.get(pos) {
            return Ok(*a);
        }
        loop {
            let a = stream.next_arrival();
            seen.push(a);
            if a.time > after {
                return Ok(a);
            }
        }
    }
}

/// Sites whose clock rang by `horizon` with a mark at most `c(k)`:
/// independent Bernoulli with parameter `1 − exp(−c(k)·horizon)`.
pub fn bernoulli_snapshot(
    field: &GraphicalField,
    params: &ModelParams,
    rate_index: usize,
    horizon: f64,
) -> Result<Configuration> {
    params.checked()?;
    if horizon.is_nan() || horizon < 0.0 {
        return domain("horizon must be nonnegative");
    }
    let rate = params.rate(rate_index)?;
    let region = field.region();
    let mut out = Configuration::empty(region.clone());
    for i in 0..region.volume() {
        let mut s = field.stream(&region.coord_of(i));
        loop {
            let a = s.next_arrival();
            if a.time > horizon {
                break;
            }
            if a.mark <= rate {
                out.set(i, true);
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region() -> BoxRegion {
        BoxRegion::at_origin(vec![10, 10]).unwrap()
    }

    #[test]
    fn replayable() {
        let mut f = GraphicalField::new(7, region());
        let a = f.next_event(&[3, 4], 2.5).unwrap();
        let mut g = GraphicalField::new(7, region());
        assert_eq!(g.next_event(&[3, 4], 2.5).unwrap(), a);
        assert_eq!(f.next_event(&[3, 4], 2.5).unwrap(), a);
        assert!(a.time > 2.5);
    }

    #[test]
    fn next_event_walks_the_stream() {
        let mut f = GraphicalField::new(1, region());
        let mut s = f.stream(&[0, 0]);
        let first: Vec<Arrival> = (0..5).map(|_| s.next_arrival()).collect();
        assert_eq!(f.next_event(&[0, 0], 0.0).unwrap(), first[0]);
        assert_eq!(f.next_event(&[0, 0], first[2].time).unwrap(), first[3]);
        assert_eq!(f.next_event(&[0, 0], first[0].time).unwrap(), first[1]);
    }

    #[test]
    fn seeds_and_sites_decorrelate() {
        let f = GraphicalField::new(1, region());
        let g = GraphicalField::new(2, region());
        let a = f.stream(&[0, 0]).next_arrival();
        assert_ne!(a, g.stream(&[0, 0]).next_arrival());
        assert_ne!(a, f.stream(&[0, 1]).next_arrival());
        assert_ne!(a, f.stream(&[1, 0]).next_arrival());
    }

    #[test]
    fn outside_site_is_rejected() {
        let mut f = GraphicalField::new(1, region());
        assert!(f.next_event(&[10, 0], 0.0).is_err());
        assert!(f.next_event(&[0, 0], -1.0).is_err());
    }

    #[test]
    fn gap_mean_and_mark_histogram() {
        let f = GraphicalField::new(99, region());
        let mut s = f.stream(&[5, 5]);
        let n = 100_000;
        let mut bins = [0usize; 10];
        let mut last = 0.0;
        let mut total = 0.0;
        for _ in 0..n {
            let a = s.next_arrival();
            total += a.time - last;
            last = a.time;
            bins[((a.mark * 10.0) as usize).min(9)] += 1;
        }
        let mean = total / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean gap {mean}");
        for b in bins {
            let frac = b as f64 / n as f64;
            assert!((frac - 0.1).abs() < 0.01, "bin fraction {frac}");
        }
    }

    #[test]
    fn snapshot_edge_cases() {
        let f = GraphicalField::new(3, region());
        let p = ModelParams::new(2, vec![0.0, 1.0, 2.0], 1.0).unwrap();
        assert!(bernoulli_snapshot(&f, &p, 0, 0.0).unwrap().is_empty());
        // c(4) = 1
        assert!(bernoulli_snapshot(&f, &p, 4, 20.0).unwrap().is_full());
    }

    #[test]
    fn snapshot_is_monotone_in_time_and_index() {
        let f = GraphicalField::new(11, region());
        let p = ModelParams::new(2, vec![0.0, 1.0, 2.0], 1.0).unwrap();
        let a = bernoulli_snapshot(&f, &p, 0, 1.0).unwrap();
        let b = bernoulli_snapshot(&f, &p, 0, 3.0).unwrap();
        let c = bernoulli_snapshot(&f, &p, 1, 3.0).unwrap();
        assert!(a.is_subset_of(&b).unwrap());
        assert!(b.is_subset_of(&c).unwrap());
    }

    #[test]
    fn snapshot_density_matches_bernoulli_law() {
        let r = BoxRegion::at_origin(vec![100, 100]).unwrap();
        let f = GraphicalField::new(2024, r);
        let p = ModelParams::new(2, vec![0.0, 1.0, 2.0], 1.0).unwrap();
        let tau = 4.0;
        let prob = 1.0 - (-p.rate(0).unwrap() * tau).exp();
        let snap = bernoulli_snapshot(&f, &p, 0, tau).unwrap();
        let n = snap.volume() as f64;
        let se = (prob * (1.0 - prob) / n).sqrt();
        let density = snap.count() as f64 / n;
        assert!((density - prob).abs() < 3.0 * se, "{density} vs {prob}");
    }
}
