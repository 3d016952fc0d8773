use super::*;
use crate::dynamics::Engine;
use crate::model::ModelParams;

fn params(gammas: &[f64]) -> ModelParams {
    ModelParams::new(gammas.len() - 1, gammas.to_vec(), 1.0).unwrap()
}

fn synthetic(slope: f64, scale: f64) -> ExperimentResult {
    let spec = ExperimentSpec::new(
        ExperimentKind::Relaxation,
        params(&[0.5]),
        vec![1.0, 2.0, 3.0, 4.0],
        Volume::Cube(Scale::Fixed(1)),
    );
    let rows = spec
        .beta_grid
        .iter()
        .map(|&beta| Row {
            beta,
            trial: 0,
            seed: 0,
            observable: "tau".into(),
            value: scale * (slope * beta).exp(),
            censored: false,
        })
        .collect();
    assemble(&spec, rows, Some("tau"))
}

#[test]
fn fit_on_exact_lines() {
    let f = fit_exponent(&synthetic(2.5, 1.0), "tau").unwrap();
    assert!((f.slope - 2.5).abs() < 1e-12);
    assert!(f.slope_stderr < 1e-9);
    let f = fit_exponent(&synthetic(1.2, 7.0), "tau").unwrap();
    assert!((f.slope - 1.2).abs() < 1e-12);
    assert!((f.intercept - 7f64.ln()).abs() < 1e-9);
}

#[test]
fn fit_needs_three_points() {
    let mut r = synthetic(1.0, 1.0);
    r.summary.truncate(2);
    assert!(fit_exponent(&r, "tau").is_err());
    assert!(fit_exponent(&synthetic(1.0, 1.0), "other").is_err());
}

#[test]
fn summary_handles_censoring() {
    let row = |value, censored| Row {
        beta: 2.0,
        trial: 0,
        seed: 0,
        observable: "tau".into(),
        value,
        censored,
    };
    let s = summarize(&[row(1.0, false), row(3.0, false), row(9.0, true)]);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].count, 3);
    assert_eq!(s[0].censored, 1);
    assert_eq!(s[0].median, Some(3.0));
    assert_eq!(s[0].mean, Some(2.0));
    assert!((s[0].ln_median_over_beta.unwrap() - 3f64.ln() / 2.0).abs() < 1e-15);
    let s = summarize(&[row(1.0, false), row(9.0, true)]);
    assert_eq!(s[0].median, None);
}

#[test]
fn spec_validation() {
    let mut spec = ExperimentSpec::new(
        ExperimentKind::Relaxation,
        params(&[0.5]),
        vec![2.0],
        Volume::Cube(Scale::Fixed(1)),
    );
    assert!(spec.validate().is_ok());
    spec.trials = 0;
    assert!(spec.validate().is_err());
    spec.trials = 1;
    spec.beta_grid.clear();
    assert!(spec.validate().is_err());
    spec.beta_grid = vec![-1.0];
    assert!(spec.validate().is_err());
    spec.beta_grid = vec![1.0];
    spec.horizon_exponent = Some(f64::NAN);
    assert!(spec.validate().is_err());
    spec.horizon_exponent = Some(f64::NEG_INFINITY);
    assert_eq!(spec.horizon(3.0), Some(0.0));
    assert!(spec.validate().is_ok());
}

#[test]
fn spec_toml() {
    let text = r#"
kind = "relaxation"
beta_grid = [2.0, 3.0, 4.0]
trials = 5
base_seed = 11
engine = "graphical"

[params]
dim = 1
gammas = [0.5, 2.0]
beta = 1.0

[volume]
cube = { exponent = 0.25 }
"#;
    let spec = ExperimentSpec::from_toml(text).unwrap();
    assert_eq!(spec.kind, ExperimentKind::Relaxation);
    assert_eq!(spec.volume, Volume::Cube(Scale::Exponent(0.25)));
    assert_eq!(spec.engine, Engine::Graphical);
    let region = spec.region(&spec.params_at(4.0).unwrap()).unwrap();
    assert_eq!(region.sides(), &[3]);
    let bad = format!("{text}\n[extra]\nx = 1\n");
    assert!(matches!(ExperimentSpec::from_toml(&bad), Err(Error::Parse(_))));
    let back = toml::to_string(&spec).unwrap();
    assert_eq!(ExperimentSpec::from_toml(&back).unwrap(), spec);
}

#[test]
fn kind_must_match() {
    let spec = ExperimentSpec::new(
        ExperimentKind::Crossing,
        params(&[0.5]),
        vec![2.0],
        Volume::Cube(Scale::Fixed(1)),
    );
    assert!(measure_relaxation(&spec).is_err());
    assert!(domination_experiment(&spec).is_err());
}

#[test]
fn relaxation_is_reproducible() {
    let mut spec = ExperimentSpec::new(
        ExperimentKind::Relaxation,
        params(&[0.5, 2.0]),
        vec![1.0, 1.5],
        Volume::Cube(Scale::Fixed(7)),
    );
    spec.trials = 6;
    spec.base_seed = 3;
    for engine in [Engine::Graphical, Engine::Fast] {
        spec.engine = engine;
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.rows_csv().unwrap(), b.rows_csv().unwrap());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.rows.len(), 12);
        assert!(a.rows.iter().all(|r| !r.censored && r.value > 0.0));
        assert_eq!(a.rows[7].seed, 4);
    }
    let csv = run_experiment(&spec).unwrap().rows_csv().unwrap();
    assert!(csv.starts_with("beta,trial,seed,observable,value,censored\n"));
}

#[test]
fn sequential_and_parallel_maps_agree() {
    let f = |i: usize| i * i + 1;
    let seq = map_trials_sequential(50, f);
    assert_eq!(seq, map_trials(50, f));
    #[cfg(feature = "parallel")]
    assert_eq!(seq, map_trials_parallel(50, f));
}

#[test]
fn horizon_censors_relaxation() {
    let mut spec = ExperimentSpec::new(
        ExperimentKind::Relaxation,
        params(&[3.0]),
        vec![4.0],
        Volume::Cube(Scale::Fixed(1)),
    );
    spec.trials = 20;
    spec.horizon_exponent = Some(0.0);
    let r = measure_relaxation(&spec).unwrap();
    // rate e^{-12} against a horizon of 1: essentially all censored
    assert!(r.rows.iter().all(|row| row.censored && row.value == 1.0));
    assert_eq!(r.summary[0].median, None);
    assert!(r.fit.is_none());
}

#[test]
fn zero_horizon_experiments() {
    let base = params(&[0.0, 1.0, 3.0]);
    let mut spec = ExperimentSpec::new(
        ExperimentKind::ClusterBound,
        base.clone(),
        vec![2.0, 3.0],
        Volume::Cube(Scale::Fixed(6)),
    );
    spec.trials = 3;
    spec.horizon_exponent = Some(f64::NEG_INFINITY);
    let r = cluster_bound_experiment(&spec).unwrap();
    assert!(r
        .rows
        .iter()
        .filter(|x| x.observable == "max_diameter" || x.observable == "exceeds")
        .all(|x| x.value == 0.0));

    spec.kind = ExperimentKind::Domination;
    let r = domination_experiment(&spec).unwrap();
    assert!(r
        .rows
        .iter()
        .filter(|x| x.observable != "dilation")
        .all(|x| x.value == 1.0));

    spec.kind = ExperimentKind::Crossing;
    spec.cylinder = Some(Cylinder {
        base: Scale::Fixed(4),
        height: Scale::Fixed(4),
    });
    spec.engine = Engine::Graphical;
    let r = crossing_experiment(&spec).unwrap();
    for row in &r.rows {
        let expect = matches!(row.observable.as_str(), "slice_void" | "floor_in_multilayer");
        assert_eq!(row.value, expect as u8 as f64, "{}", row.observable);
    }
}

#[test]
fn experiments_need_a_horizon() {
    let spec = ExperimentSpec::new(
        ExperimentKind::ClusterBound,
        params(&[0.0, 1.0]),
        vec![2.0],
        Volume::Cube(Scale::Fixed(4)),
    );
    assert!(cluster_bound_experiment(&spec).is_err());
}

#[test]
fn growth_ladder_is_monotone() {
    let mut spec = ExperimentSpec::new(
        ExperimentKind::GrowthSpeed,
        params(&[0.0, 1.0, 2.0]),
        vec![1.0, 2.0],
        Volume::Cube(Scale::Fixed(9)),
    );
    spec.trials = 4;
    spec.ladder = vec![0, 1, 2, 4, 8];
    for engine in [Engine::Graphical, Engine::Fast] {
        spec.engine = engine;
        let r = growth_speed_experiment(&spec).unwrap();
        for chunk in r.rows.chunks(5) {
            assert_eq!(chunk[0].observable, "time_to_diameter_0");
            assert_eq!(chunk[0].value, 0.0);
            assert!(chunk.windows(2).all(|w| w[0].value <= w[1].value));
            assert!(chunk.iter().all(|x| !x.censored));
        }
    }
}

#[test]
fn critical_scales() {
    let p = params(&[0.0, 1.0, 3.0]).with_beta(4.0);
    // κ_2 = max(1, (3 + 2·0.5)/3) = 4/3, L_2 = (3 − 4/3)/2 = 5/6
    let l2: f64 = 5.0 / 6.0;
    let expected = ((4.0 * l2).exp() / 4.0).ceil() as usize;
    assert_eq!(Dilation::Critical.length(&p).unwrap(), expected.max(2));
    assert_eq!(Scale::Exponent(0.0).length(&p).unwrap(), 1);
    assert_eq!(Scale::Beta.length(&p).unwrap(), 4);
    assert!(Scale::Exponent(10.0).length(&p).is_err());
}
