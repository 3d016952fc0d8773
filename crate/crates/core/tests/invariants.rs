use proptest::prelude::*;

use nucleation::analysis::ordering_violations;
use nucleation::dynamics::{run_coupled, run_fast, run_graphical, Engine, Process, StopRule};
use nucleation::harness::{measure_relaxation, ExperimentKind, ExperimentSpec, Scale, Volume};
use nucleation::lattice::{parse_configuration, write_configuration, BoxRegion, Configuration};
use nucleation::model::{predicted_exponent, theory, ModelParams, VolumeExponent};
use nucleation::randomness::GraphicalField;

fn gammas(d: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.0f64..3.0, proptest::collection::vec(0.0f64..3.0, d)).prop_map(|(g0, steps)| {
        let mut g = vec![g0];
        for s in steps {
            let next = g.last().unwrap() + s;
            g.push(next);
        }
        g
    })
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0usize..=5)
        .prop_flat_map(|d| (Just(d), gammas(d), 0.1f64..10.0))
        .prop_map(|(d, g, b)| ModelParams::new(d, g, b).unwrap())
}

fn config(max_side: usize, dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Configuration> {
    proptest::collection::vec(1usize..=max_side, dims)
        .prop_flat_map(|sides| {
            let n: usize = sides.iter().product();
            (Just(sides), proptest::collection::vec(any::<bool>(), n))
        })
        .prop_map(|(sides, bits)| {
            Configuration::from_bools(BoxRegion::at_origin(sides).unwrap(), &bits).unwrap()
        })
}

proptest! {
    #[test]
    fn kappas_sit_between_neighbouring_gammas(p in params()) {
        let t = theory(&p);
        prop_assert_eq!(t.kappas[0], p.gammas[0]);
        for i in 1..=p.dim {
            prop_assert!(t.kappas[i] >= p.gammas[i - 1] - 1e-12);
            prop_assert!(t.kappas[i] <= p.gammas[i] + 1e-12);
            prop_assert!(t.lengths[i] >= 0.0);
        }
    }

    #[test]
    fn predicted_exponent_shrinks_with_volume(p in params(), a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        let small = predicted_exponent(&p, VolumeExponent::Finite(lo)).unwrap();
        let large = predicted_exponent(&p, VolumeExponent::Finite(hi)).unwrap();
        let inf = predicted_exponent(&p, VolumeExponent::Infinite).unwrap();
        prop_assert!(large <= small);
        prop_assert!(inf <= large);
        prop_assert_eq!(predicted_exponent(&p, VolumeExponent::Finite(0.0)).unwrap(), p.gammas[p.dim].max(inf));
    }

    #[test]
    fn serialization_round_trips(c in config(9, 0..=3)) {
        let text = write_configuration(&c);
        prop_assert_eq!(parse_configuration(&text).unwrap(), c);
    }

    #[test]
    fn coupled_processes_stay_ordered(
        (lower, extra) in config(8, 1..=2).prop_flat_map(|c| {
            let n = c.volume();
            (Just(c), proptest::collection::vec(proptest::bool::weighted(0.3), n))
        }),
        seed in any::<u64>(),
        horizon in 0.0f64..30.0,
    ) {
        let region = lower.region().clone();
        let d = region.dim();
        let upper = lower.union(&Configuration::from_bools(region.clone(), &extra).unwrap()).unwrap();
        let p = ModelParams::new(d, (0..=d).map(|i| i as f64 * 0.5).collect(), 1.0).unwrap();
        let stop = StopRule::TimeLimit(horizon);
        let runs = run_coupled(
            &p,
            &[Process::new(lower, stop.clone()), Process::new(upper, stop)],
            &GraphicalField::new(seed, region),
        ).unwrap();
        prop_assert_eq!(ordering_violations(&runs[0], &runs[1]).unwrap(), 0);
    }

    #[test]
    fn both_engines_fill_the_box(seed in any::<u64>(), side in 1usize..6) {
        let p = ModelParams::new(2, vec![0.0, 0.5, 1.0], 1.0).unwrap();
        let region = BoxRegion::at_origin(vec![side, side]).unwrap();
        let process = Process::new(Configuration::empty(region.clone()), StopRule::BoxFull);
        let field = GraphicalField::new(seed, region);
        for t in [run_graphical(&p, &process, &field).unwrap(), run_fast(&p, &process, &field).unwrap()] {
            prop_assert!(t.final_config.is_full());
            prop_assert_eq!(t.events.len(), side * side);
            prop_assert_eq!(t.final_time, t.events.last().unwrap().time);
        }
    }
}

#[test]
fn rows_are_reproducible_from_their_seed() {
    let p = ModelParams::new(1, vec![0.5, 1.5], 1.0).unwrap();
    let mut spec = ExperimentSpec::new(ExperimentKind::Relaxation, p, vec![1.0, 2.0], Volume::Cube(Scale::Fixed(11)));
    spec.trials = 8;
    spec.base_seed = 500;
    for engine in [Engine::Graphical, Engine::Fast] {
        spec.engine = engine;
        let all = measure_relaxation(&spec).unwrap();
        for row in &all.rows {
            let mut one = spec.clone();
            one.trials = 1;
            one.base_seed = row.seed;
            one.beta_grid = vec![row.beta];
            let again = measure_relaxation(&one).unwrap();
            assert_eq!(again.rows[0].value, row.value);
        }
    }
}
