use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nucleation::dynamics::{Engine, Process, StopRule};
use nucleation::harness::{map_trials_parallel, map_trials_sequential, trial_seed};
use nucleation::lattice::{BoxRegion, Configuration};
use nucleation::model::ModelParams;
use nucleation::randomness::GraphicalField;

fn relaxation_time(params: &ModelParams, region: &BoxRegion, engine: Engine, seed: u64) -> f64 {
    let process = Process::new(Configuration::empty(region.clone()), StopRule::OriginOccupied);
    engine
        .run(params, &process, &GraphicalField::new(seed, region.clone()))
        .unwrap()
        .final_time
}

fn trial_maps(c: &mut Criterion) {
    let params = ModelParams::new(2, vec![0.0, 1.0, 2.0], 2.0).unwrap();
    let region = BoxRegion::centered_cube(2, 33).unwrap();
    let trials = 64;
    let mut group = c.benchmark_group("trial_map");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            map_trials_sequential(trials, |t| {
                relaxation_time(&params, &region, Engine::Fast, trial_seed(1, t))
            })
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            map_trials_parallel(trials, |t| {
                relaxation_time(&params, &region, Engine::Fast, trial_seed(1, t))
            })
        })
    });
    group.finish();
}

fn engines(c: &mut Criterion) {
    let params = ModelParams::new(1, vec![0.5, 2.0], 3.0).unwrap();
    let mut group = c.benchmark_group("engine");
    group.sample_size(20);
    for side in [9usize, 101, 1001] {
        let region = BoxRegion::centered_cube(1, side).unwrap();
        for engine in [Engine::Graphical, Engine::Fast] {
            group.bench_with_input(BenchmarkId::new(format!("{engine:?}"), side), &side, |b, _| {
                let mut seed = 0;
                b.iter(|| {
                    seed += 1;
                    relaxation_time(&params, &region, engine, seed)
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, trial_maps, engines);
criterion_main!(benches);
