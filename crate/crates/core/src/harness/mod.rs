//! Seeded multi-trial experiments over a grid of `β` values, with
//! per-`β` summaries and exponent fits.
//!
//! Trial `t` of every grid point uses the field seed `base_seed + t`, so
//! the same clocks are reused across `β` and every row can be recomputed
//! from the spec alone. Trials run on the rayon pool when the `parallel`
//! feature is enabled; results are collected in `(β, trial)` order either
//! way, so output does not depend on scheduling.

mod experiments;
mod spec;

pub use experiments::{
    cluster_bound_experiment, crossing_experiment, domination_experiment,
    growth_speed_experiment, measure_relaxation, nucleation_law_experiment,
};
pub use spec::{
    ClusterThreshold, Cylinder, Dilation, ExperimentKind, ExperimentSpec, Scale, Target, Volume,
};

use serde::{Deserialize, Serialize};

use crate::analysis::stats::{censored_median, mean, ols, LinearFit};
use crate::error::{domain, Error, Result};

/// One measurement of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub beta: f64,
    pub trial: usize,
    pub seed: u64,
    pub observable: String,
    pub value: f64,
    /// The event did not happen before the horizon; `value` is the
    /// horizon.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub beta: f64,
    pub observable: String,
    pub count: usize,
    pub censored: usize,
    /// Mean of the uncensored values.
    pub mean: Option<f64>,
    /// Median with censored values counted as infinite; absent when half
    /// or more are censored.
    pub median: Option<f64>,
    pub ln_median_over_beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<Row>,
    pub summary: Vec<SummaryRow>,
    /// Fit of `ln(median)` against `β` for the primary time observable,
    /// when at least three grid points have a median.
    pub fit: Option<LinearFit>,
}

pub fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

/// Maps `f` over `0..n` on the calling thread.
pub fn map_trials_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Maps `f` over `0..n` on the rayon pool, preserving order.
#[cfg(feature = "parallel")]
pub fn map_trials_parallel<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// The default trial map: parallel when the `parallel` feature is on.
pub fn map_trials<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_trials_parallel(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_trials_sequential(n, f)
    }
}

/// Runs one job per `(β, trial)` pair and flattens the rows in grid order.
pub(crate) fn run_grid<F>(spec: &ExperimentSpec, job: F) -> Result<Vec<Row>>
where
    F: Fn(&ExperimentSpec, f64, usize, u64) -> Result<Vec<Row>> + Sync + Send,
{
    spec.validate()?;
    let n = spec.beta_grid.len() * spec.trials;
    let out = map_trials(n, |k| {
        let beta = spec.beta_grid[k / spec.trials];
        let trial = k % spec.trials;
        job(spec, beta, trial, trial_seed(spec.base_seed, trial))
    });
    let mut rows = Vec::new();
    for r in out {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Per-`(β, observable)` aggregates, in order of first appearance.
pub fn summarize(rows: &[Row]) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, &str)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(b, o)| b == r.beta && o == r.observable) {
            keys.push((r.beta, &r.observable));
        }
    }
    keys.into_iter()
        .map(|(beta, obs)| {
            let group: Vec<&Row> = rows
                .iter()
                .filter(|r| r.beta == beta && r.observable == obs)
                .collect();
            let values: Vec<Option<f64>> = group
                .iter()
                .map(|r| (!r.censored).then_some(r.value))
                .collect();
            let finite: Vec<f64> = values.iter().flatten().copied().collect();
            let median = censored_median(&values);
            SummaryRow {
                beta,
                observable: obs.to_string(),
                count: group.len(),
                censored: group.len() - finite.len(),
                mean: mean(&finite),
                median,
                ln_median_over_beta: median.filter(|&m| m > 0.0).map(|m| m.ln() / beta),
            }
        })
        .collect()
}

/// Least-squares slope of `ln(median)` against `β` for `observable`, over
/// the grid points whose median is exact and positive.
pub fn fit_exponent(result: &ExperimentResult, observable: &str) -> Result<LinearFit> {
    fit_summary(&result.summary, observable)
}

/// [`fit_exponent`] from summary rows alone.
pub fn fit_summary(summary: &[SummaryRow], observable: &str) -> Result<LinearFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = summary
        .iter()
        .filter(|s| s.observable == observable)
        .filter_map(|s| s.median.filter(|&m| m > 0.0).map(|m| (s.beta, m.ln())))
        .unzip();
    if x.len() < 3 {
        return domain(format!(
            "need at least 3 usable grid points for `{observable}`, have {}",
            x.len()
        ));
    }
    ols(&x, &y)
}

pub(crate) fn assemble(spec: &ExperimentSpec, rows: Vec<Row>, fit_on: Option<&str>) -> ExperimentResult {
    let summary = summarize(&rows);
    let mut result = ExperimentResult {
        spec: spec.clone(),
        rows,
        summary,
        fit: None,
    };
    if let Some(obs) = fit_on {
        result.fit = fit_exponent(&result, obs).ok();
    }
    result
}

/// Dispatches on `spec.kind`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    match spec.kind {
        ExperimentKind::Relaxation => measure_relaxation(spec),
        ExperimentKind::NucleationLaw => nucleation_law_experiment(spec),
        ExperimentKind::ClusterBound => cluster_bound_experiment(spec),
        ExperimentKind::Crossing => crossing_experiment(spec),
        ExperimentKind::GrowthSpeed => growth_speed_experiment(spec),
        ExperimentKind::Domination => domination_experiment(spec),
    }
}

fn output_error(e: impl std::fmt::Display) -> Error {
    Error::Output(e.to_string())
}

fn write_csv<T: Serialize>(items: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for item in items {
        w.serialize(item).map_err(output_error)?;
    }
    let bytes = w.into_inner().map_err(output_error)?;
    String::from_utf8(bytes).map_err(output_error)
}

impl ExperimentResult {
    /// Rows as CSV: `beta,trial,seed,observable,value,censored`.
    pub fn rows_csv(&self) -> Result<String> {
        write_csv(&self.rows)
    }

    /// Summary as CSV:
    /// `beta,observable,count,censored,mean,median,ln_median_over_beta`,
    /// with empty cells for absent values.
    pub fn summary_csv(&self) -> Result<String> {
        write_csv(&self.summary)
    }

    /// The whole result, spec included, as JSON.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(output_error)
    }

    pub fn summary_for(&self, observable: &str) -> Vec<&SummaryRow> {
        self.summary.iter().filter(|s| s.observable == observable).collect()
    }
}

#[cfg(test)]
mod tests;
