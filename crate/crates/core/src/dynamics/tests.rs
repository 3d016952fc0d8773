use super::*;
use crate::lattice::crosses;

fn params2() -> ModelParams {
    ModelParams::new(2, vec![0.0, 1.0, 2.0], 1.0).unwrap()
}

fn square(n: usize) -> BoxRegion {
    BoxRegion::at_origin(vec![n, n]).unwrap()
}

fn field(seed: u64, region: &BoxRegion) -> GraphicalField {
    GraphicalField::new(seed, region.clone())
}

#[test]
fn non_nucleating_from_empty_stays_empty() {
    let r = square(6);
    let p = Process::new(Configuration::empty(r.clone()), StopRule::TimeLimit(1e6))
        .variant(ProcessVariant::NonNucleating);
    for engine in [Engine::Graphical, Engine::Fast] {
        let t = engine.run(&params2(), &p, &field(1, &r)).unwrap();
        assert!(t.final_config.is_empty());
        assert!(t.events.is_empty());
        assert!(t.stop_reason.is_time_limit());
        assert_eq!(t.final_time, 1e6);
    }
}

#[test]
fn full_initial_stops_immediately() {
    let r = square(4);
    let p = Process::new(
        Configuration::full(r.clone()),
        StopRule::first_of([StopRule::BoxFull, StopRule::TimeLimit(5.0)]),
    );
    let g = run_graphical(&params2(), &p, &field(3, &r)).unwrap();
    let f = run_fast(&params2(), &p, &field(3, &r)).unwrap();
    for t in [&g, &f] {
        assert!(t.events.is_empty());
        assert_eq!(t.stop_reason, StopReason::Rule(StopRule::BoxFull));
        assert_eq!(t.final_time, 0.0);
    }
    assert_eq!(g.final_config, f.final_config);
}

#[test]
fn deterministic_given_field() {
    let r = square(8);
    let p = Process::new(Configuration::empty(r.clone()), StopRule::TimeLimit(30.0));
    for engine in [Engine::Graphical, Engine::Fast] {
        let a = engine.run(&params2(), &p, &field(42, &r)).unwrap();
        let b = engine.run(&params2(), &p, &field(42, &r)).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(a.final_config, b.final_config);
    }
}

#[test]
fn trajectory_invariants() {
    let r = square(10);
    let p = Process::new(Configuration::empty(r.clone()), StopRule::TimeLimit(40.0));
    for engine in [Engine::Graphical, Engine::Fast] {
        let t = engine.run(&params2(), &p, &field(5, &r)).unwrap();
        assert!(!t.events.is_empty());
        assert!(t.events.windows(2).all(|w| w[0].time < w[1].time));
        let mut seen = std::collections::HashSet::new();
        assert!(t.events.iter().all(|e| seen.insert(e.site)));
        assert_eq!(t.configuration_at(f64::INFINITY), t.final_config);
        assert!(t.events.iter().all(|e| e.time <= 40.0));
    }
}

#[test]
fn graphical_arrival_count_tracks_volume_times_time() {
    // rates all tiny so nothing fills up and every clock keeps ringing
    let params = ModelParams::new(2, vec![5.0, 5.0, 5.0], 3.0).unwrap();
    let r = square(20);
    let horizon = 50.0;
    let p = Process::new(Configuration::empty(r.clone()), StopRule::TimeLimit(horizon));
    let t = run_graphical(&params, &p, &field(8, &r)).unwrap();
    let expected = r.volume() as f64 * horizon;
    let rel = (t.arrivals as f64 - expected).abs() / expected;
    assert!(rel < 0.02, "arrivals {} vs {expected}", t.arrivals);
}

#[test]
fn nucleation_moves_are_in_the_zero_snapshot() {
    let r = square(12);
    let params = params2();
    let f = field(77, &r);
    let horizon = 25.0;
    let p = Process::new(Configuration::empty(r.clone()), StopRule::TimeLimit(horizon));
    let t = run_graphical(&params, &p, &f).unwrap();
    let snap = crate::randomness::bernoulli_snapshot(&f, &params, 0, horizon).unwrap();
    let mut occ = Configuration::empty(r.clone());
    let mut nucleations = 0;
    for e in &t.events {
        let mut n = 0;
        r.for_each_neighbor(e.site, |j| n += occ.get(j) as usize);
        if n == 0 {
            nucleations += 1;
            assert!(snap.get(e.site));
        }
        occ.set(e.site, true);
    }
    assert!(nucleations > 0);
}

#[test]
fn unreachable_stop_is_rejected() {
    let r = square(4);
    let p = Process::new(Configuration::empty(r.clone()), StopRule::BoxFull)
        .variant(ProcessVariant::NonNucleating);
    assert_eq!(
        run_graphical(&params2(), &p, &field(1, &r)).unwrap_err(),
        Error::UnreachableStop
    );
    let p = Process::new(Configuration::empty(r.clone()), StopRule::MaxClusterDiameter(4));
    assert_eq!(
        run_fast(&params2(), &p, &field(1, &r)).unwrap_err(),
        Error::UnreachableStop
    );
    // a floor seeds the non-nucleating growth, so filling is reachable
    let p = Process::new(Configuration::empty(r.clone()), StopRule::BoxFull)
        .variant(ProcessVariant::NonNucleating)
        .boundary(BoundaryCondition::Floor(1));
    let t = run_fast(&params2(), &p, &field(1, &r)).unwrap();
    assert!(t.final_config.is_full());
}

#[test]
fn stop_rules_fire() {
    let r = BoxRegion::centered_cube(2, 7).unwrap();
    let p = Process::new(Configuration::empty(r.clone()), StopRule::OriginOccupied);
    let t = run_graphical(&params2(), &p, &field(9, &r)).unwrap();
    assert_eq!(t.stop_reason, StopReason::Rule(StopRule::OriginOccupied));
    assert_eq!(t.events.last().unwrap().site, r.index_of(&[0, 0]).unwrap());

    let p = Process::new(Configuration::empty(r.clone()), StopRule::Crossed(0));
    let t = run_fast(&params2(), &p, &field(9, &r)).unwrap();
    assert!(crosses(&t.final_config, 0).unwrap());
    assert!(!crosses(&t.configuration_at(t.final_time - 1e-12), 0).unwrap());

    let p = Process::new(Configuration::empty(r.clone()), StopRule::MaxClusterDiameter(3));
    let t = run_fast(&params2(), &p, &field(9, &r)).unwrap();
    assert!(crate::analysis::max_cluster_diameter(&t.final_config) >= 3);
    let before = t.configuration_at(t.final_time - 1e-12);
    assert!(crate::analysis::max_cluster_diameter(&before) < 3);
}

#[test]
fn origin_outside_region_is_rejected() {
    let r = square(3).slab(0, 1, 2).unwrap();
    let p = Process::new(Configuration::empty(r.clone()), StopRule::OriginOccupied);
    assert!(run_graphical(&params2(), &p, &field(1, &r)).is_err());
}

#[test]
fn field_must_cover_region() {
    let r = square(4);
    let p = Process::new(Configuration::empty(r.clone()), StopRule::TimeLimit(1.0));
    assert!(run_graphical(&params2(), &p, &field(1, &square(3))).is_err());
}

#[test]
fn coupled_runs_respect_initial_order() {
    let r = square(8);
    let alpha = Configuration::from_sites(r.clone(), &[vec![1, 1]]).unwrap();
    let rho = Configuration::from_sites(r.clone(), &[vec![1, 1], vec![5, 6], vec![6, 6]]).unwrap();
    let stop = StopRule::TimeLimit(20.0);
    let runs = run_coupled(
        &params2(),
        &[Process::new(alpha, stop.clone()), Process::new(rho, stop)],
        &field(12, &r),
    )
    .unwrap();
    let v = crate::analysis::ordering_violations(&runs[0], &runs[1]).unwrap();
    assert_eq!(v, 0);
}

#[test]
fn floor_dominates_empty_boundary() {
    let r = square(6);
    let stop = StopRule::TimeLimit(30.0);
    let e = Configuration::empty(r.clone());
    let runs = run_coupled(
        &params2(),
        &[
            Process::new(e.clone(), stop.clone()),
            Process::new(e, stop).boundary(BoundaryCondition::Floor(1)),
        ],
        &field(4, &r),
    )
    .unwrap();
    assert_eq!(crate::analysis::ordering_violations(&runs[0], &runs[1]).unwrap(), 0);
}

#[test]
fn coupled_requires_matching_regions() {
    let stop = StopRule::TimeLimit(1.0);
    let res = run_coupled(
        &params2(),
        &[
            Process::new(Configuration::empty(square(3)), stop.clone()),
            Process::new(Configuration::empty(square(4)), stop),
        ],
        &field(1, &square(4)),
    );
    assert_eq!(res.unwrap_err(), Error::RegionMismatch);
}

#[test]
fn multilayer_edge_cases() {
    let cyl = BoxRegion::at_origin(vec![5, 6]).unwrap();
    let f = field(2, &cyl);
    assert!(multilayer_run(&params2(), &cyl, 1, &f, 0.0).unwrap().is_empty());
    let odd = BoxRegion::at_origin(vec![5, 5]).unwrap();
    assert!(multilayer_run(&params2(), &odd, 1, &field(2, &odd), 1.0).is_err());
}

#[test]
fn multilayer_dominates_floor_process() {
    let params = ModelParams::new(2, vec![0.0, 0.5, 1.0], 1.0).unwrap();
    let cyl = BoxRegion::at_origin(vec![6, 8]).unwrap();
    for seed in 0..20 {
        let f = field(seed, &cyl);
        let horizon = 4.0;
        let ml = multilayer_run(&params, &cyl, 1, &f, horizon).unwrap();
        let floor = Process::new(Configuration::empty(cyl.clone()), StopRule::TimeLimit(horizon))
            .boundary(BoundaryCondition::Floor(1))
            .variant(ProcessVariant::NonNucleating);
        let t = run_graphical(&params, &floor, &f).unwrap();
        assert!(t.final_config.is_subset_of(&ml).unwrap(), "seed {seed}");
        // crossing the multilayer needs every slice nonempty
        let slices = multilayer_slices(&params, &cyl, 1, &f, horizon).unwrap();
        if slices.iter().any(|s| s.is_empty()) {
            assert!(!crosses(&ml, 1).unwrap());
        }
    }
}

#[test]
fn zero_dimensional_nucleation_time() {
    let params = ModelParams::new(0, vec![0.5], 2.0).unwrap();
    let r = BoxRegion::singleton();
    let rate = params.rate(0).unwrap();
    let n = 2000;
    let t_probe = 1.0 / rate;
    let mut hits = 0;
    for seed in 0..n {
        let p = Process::new(Configuration::empty(r.clone()), StopRule::TimeLimit(t_probe));
        let t = run_graphical(&params, &p, &field(seed, &r)).unwrap();
        hits += t.final_config.is_full() as usize;
    }
    let expected = 1.0 - (-rate * t_probe).exp();
    let se = (expected * (1.0 - expected) / n as f64).sqrt();
    let freq = hits as f64 / n as f64;
    assert!((freq - expected).abs() < 3.0 * se, "{freq} vs {expected}");
}

#[test]
fn csv_log_layout() {
    let r = BoxRegion::at_origin(vec![3, 3]).unwrap();
    let p = Process::new(Configuration::empty(r.clone()), StopRule::OccupiedAtLeast(2));
    let t = run_graphical(&params2(), &p, &field(1, &r)).unwrap();
    let csv = t.events_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "time,x_1,x_2");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1].split(',').count(), 3);
}
