use super::{assemble, run_grid, ExperimentResult, ExperimentSpec, Row};
use super::spec::{ClusterThreshold, ExperimentKind, Target};
use crate::analysis::{diameter_ladder_times, max_cluster_diameter};
use crate::dynamics::{
    multilayer_slices, run_graphical, Process, ProcessVariant, StopReason, StopRule, Trajectory,
};
use crate::error::{domain, Result};
use crate::lattice::{crosses, BoundaryCondition, BoxRegion, Configuration};
use crate::model::{theory, ModelParams};
use crate::morphology::domination_pipeline;
use crate::randomness::{bernoulli_snapshot, GraphicalField};

fn check_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind != kind {
        return domain(format!("expected a {kind:?} spec, got {:?}", spec.kind));
    }
    Ok(())
}

struct RowSink {
    beta: f64,
    trial: usize,
    seed: u64,
    rows: Vec<Row>,
}

impl RowSink {
    fn new(beta: f64, trial: usize, seed: u64) -> Self {
        Self {
            beta,
            trial,
            seed,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, observable: impl Into<String>, value: f64, censored: bool) {
        self.rows.push(Row {
            beta: self.beta,
            trial: self.trial,
            seed: self.seed,
            observable: observable.into(),
            value,
            censored,
        });
    }

    fn flag(&mut self, observable: &str, value: bool) {
        self.push(observable, value as u8 as f64, false);
    }
}

fn bounded(rule: StopRule, horizon: Option<f64>) -> StopRule {
    match horizon {
        Some(t) => StopRule::first_of([rule, StopRule::TimeLimit(t)]),
        None => rule,
    }
}

fn reached(t: &Trajectory) -> bool {
    matches!(&t.stop_reason, StopReason::Rule(r) if !matches!(r, StopRule::TimeLimit(_)))
}

/// Time for the spec's process, started empty, to satisfy `rule`.
fn hitting_time_experiment(
    spec: &ExperimentSpec,
    kind: ExperimentKind,
    observable: &str,
    rule: StopRule,
) -> Result<ExperimentResult> {
    check_kind(spec, kind)?;
    let rows = run_grid(spec, |spec, beta, trial, seed| {
        let params = spec.params_at(beta)?;
        let region = spec.region(&params)?;
        let process = Process::new(
            Configuration::empty(region.clone()),
            bounded(rule.clone(), spec.horizon(beta)),
        )
        .boundary(spec.boundary.clone())
        .variant(spec.variant);
        let t = spec.engine.run(&params, &process, &GraphicalField::new(seed, region))?;
        let mut sink = RowSink::new(beta, trial, seed);
        sink.push(observable, t.final_time, !reached(&t));
        Ok(sink.rows)
    })?;
    Ok(assemble(spec, rows, Some(observable)))
}

/// Relaxation time from the empty box: the first time the origin (or the
/// whole box) is occupied, observable `tau`. Runs cut by the horizon are
/// censored. The fit is `ln(median tau)` against `β`.
pub fn measure_relaxation(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let rule = match spec.target {
        Target::Origin => StopRule::OriginOccupied,
        Target::Full => StopRule::BoxFull,
    };
    hitting_time_experiment(spec, ExperimentKind::Relaxation, "tau", rule)
}

/// First occupation anywhere in the box, observable `first_occupation`.
pub fn nucleation_law_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    hitting_time_experiment(
        spec,
        ExperimentKind::NucleationLaw,
        "first_occupation",
        StopRule::OccupiedAtLeast(1),
    )
}

fn diameter_threshold(spec: &ExperimentSpec, params: &ModelParams) -> f64 {
    match spec.threshold {
        ClusterThreshold::Beta => params.beta,
        ClusterThreshold::CriticalLength => (params.beta * theory(params).length_d()).exp().ceil(),
    }
}

/// Largest cluster at the horizon: `max_diameter`, the `threshold` in
/// force and the indicator `exceeds` of a diameter strictly above it.
pub fn cluster_bound_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    check_kind(spec, ExperimentKind::ClusterBound)?;
    let rows = run_grid(spec, |spec, beta, trial, seed| {
        let params = spec.params_at(beta)?;
        let region = spec.region(&params)?;
        let horizon = spec.required_horizon(beta)?;
        let process = Process::new(Configuration::empty(region.clone()), StopRule::TimeLimit(horizon))
            .boundary(spec.boundary.clone())
            .variant(spec.variant);
        let t = spec.engine.run(&params, &process, &GraphicalField::new(seed, region))?;
        let diam = max_cluster_diameter(&t.final_config);
        let threshold = diameter_threshold(spec, &params);
        let mut sink = RowSink::new(beta, trial, seed);
        sink.push("max_diameter", diam as f64, false);
        sink.push("threshold", threshold, false);
        sink.flag("exceeds", diam as f64 > threshold);
        Ok(sink.rows)
    })?;
    Ok(assemble(spec, rows, None))
}

/// Non-nucleating growth from a floor at the bottom of a cylinder (last
/// axis up) until the horizon: indicator `crossed`. When the height is
/// even, the multilayer of sandwiched height-2 slices is run from the same
/// field, adding `multilayer_crossed` and `slice_void` (the bottom slice is
/// still empty); with the graphical engine, `floor_in_multilayer` records
/// the coupling bound between the two.
pub fn crossing_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    check_kind(spec, ExperimentKind::Crossing)?;
    let rows = run_grid(spec, |spec, beta, trial, seed| {
        let params = spec.params_at(beta)?;
        let cylinder = spec.cylinder_region(&params)?;
        let axis = params.dim - 1;
        let horizon = spec.required_horizon(beta)?;
        let field = GraphicalField::new(seed, cylinder.clone());
        let process = Process::new(Configuration::empty(cylinder.clone()), StopRule::TimeLimit(horizon))
            .boundary(BoundaryCondition::Floor(axis))
            .variant(ProcessVariant::NonNucleating);
        let t = spec.engine.run(&params, &process, &field)?;
        let mut sink = RowSink::new(beta, trial, seed);
        sink.flag("crossed", crosses(&t.final_config, axis)?);
        if cylinder.sides()[axis] % 2 == 0 {
            let slices = multilayer_slices(&params, &cylinder, axis, &field, horizon)?;
            let mut ml = Configuration::empty(cylinder.clone());
            for s in &slices {
                ml.paste(s)?;
            }
            sink.flag("multilayer_crossed", crosses(&ml, axis)?);
            sink.flag("slice_void", slices[0].is_empty());
            if spec.engine == crate::dynamics::Engine::Graphical {
                sink.flag("floor_in_multilayer", t.final_config.is_subset_of(&ml)?);
            }
        }
        Ok(sink.rows)
    })?;
    Ok(assemble(spec, rows, None))
}

fn default_ladder(region: &BoxRegion) -> Vec<usize> {
    let max = region.sides().iter().max().map_or(0, |s| s - 1);
    std::iter::successors(Some(1usize), |m| Some(m * 2))
        .take_while(|&m| m <= max)
        .collect()
}

fn center(region: &BoxRegion) -> Vec<i64> {
    (0..region.dim())
        .map(|a| region.lo(a) + (region.sides()[a] / 2) as i64)
        .collect()
}

/// A single droplet at the center of the box grown without nucleation:
/// `time_to_diameter_m` for each rung `m` of the ladder, censored when
/// the horizon comes first. The fit uses the smallest positive rung.
pub fn growth_speed_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    check_kind(spec, ExperimentKind::GrowthSpeed)?;
    let name = |m: usize| format!("time_to_diameter_{m}");
    let rows = run_grid(spec, |spec, beta, trial, seed| {
        let params = spec.params_at(beta)?;
        let region = spec.region(&params)?;
        let ladder = if spec.ladder.is_empty() {
            default_ladder(&region)
        } else {
            spec.ladder.clone()
        };
        let top = ladder.iter().copied().max().unwrap_or(0);
        let initial = Configuration::from_sites(region.clone(), &[center(&region)])?;
        let process = Process::new(initial, bounded(StopRule::MaxClusterDiameter(top), spec.horizon(beta)))
            .boundary(spec.boundary.clone())
            .variant(ProcessVariant::NonNucleating);
        let t = spec.engine.run(&params, &process, &GraphicalField::new(seed, region))?;
        let mut sink = RowSink::new(beta, trial, seed);
        for (&m, time) in ladder.iter().zip(diameter_ladder_times(&t, &ladder)) {
            match time {
                Some(v) => sink.push(name(m), v, false),
                None => sink.push(name(m), t.final_time, true),
            }
        }
        Ok(sink.rows)
    })?;
    let first = spec.ladder.iter().copied().filter(|&m| m > 0).min().unwrap_or(1);
    Ok(assemble(spec, rows, Some(&name(first))))
}

/// Per trial, from one field: the nucleation snapshot `η` at the horizon,
/// its closure bracket `(ρ, ξ)` at the spec's dilation, and the process
/// `σ` (graphical engine, whatever the spec says) up to the horizon.
/// Records `sigma_in_rho`, `eta_in_xi` and the `dilation` used.
pub fn domination_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    check_kind(spec, ExperimentKind::Domination)?;
    let rows = run_grid(spec, |spec, beta, trial, seed| {
        let params = spec.params_at(beta)?;
        let region = spec.region(&params)?;
        let horizon = spec.required_horizon(beta)?;
        let field = GraphicalField::new(seed, region.clone());
        let eta = bernoulli_snapshot(&field, &params, 0, horizon)?;
        let l = spec.dilation.length(&params)?;
        let (rho, xi) = domination_pipeline(&eta, l)?;
        let process = Process::new(Configuration::empty(region), StopRule::TimeLimit(horizon))
            .boundary(spec.boundary.clone())
            .variant(spec.variant);
        let sigma = run_graphical(&params, &process, &field)?.final_config;
        let mut sink = RowSink::new(beta, trial, seed);
        sink.flag("sigma_in_rho", sigma.is_subset_of(&rho)?);
        sink.flag("eta_in_xi", eta.is_subset_of(&xi)?);
        sink.push("dilation", l as f64, false);
        Ok(sink.rows)
    })?;
    Ok(assemble(spec, rows, None))
}
