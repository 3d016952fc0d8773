mod args;

use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use nucleation::analysis::{max_cluster_diameter, ordering_violations};
use nucleation::dynamics::{Process, ProcessVariant, StopRule, Trajectory};
use nucleation::harness::{
    cluster_bound_experiment, crossing_experiment, domination_experiment, fit_summary,
    growth_speed_experiment, measure_relaxation, nucleation_law_experiment, summarize,
    ClusterThreshold, Cylinder, Dilation, ExperimentKind, ExperimentResult, ExperimentSpec, Row,
    Scale, Target, Volume,
};
use nucleation::lattice::{
    connected_clusters, parse_configuration, write_configuration, BoundaryCondition, BoxRegion,
    Configuration,
};
use nucleation::model::{predicted_exponent, theory, VolumeExponent};
use nucleation::morphology::{
    al_witness, bootstrap_closure, dilate, domination_pipeline, erode, internally_spanned,
};
use nucleation::randomness::{bernoulli_snapshot, derive_seed, GraphicalField};

use args::{
    parse_boundary, parse_list, EngineArg, ExperimentArgs, Format, ModelArgs, OutputArgs,
    VariantArg, VolumeArgs,
};

#[derive(Debug, Parser)]
#[command(name = "nucleation", version, about = "Kinetically constrained nucleation and growth on Z^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical constants and the predicted relaxation exponent.
    Theory {
        #[command(flatten)]
        model: ModelArgs,
        /// Volume exponent; infinite volume when absent.
        #[arg(long = "L", value_name = "L")]
        length_exponent: Option<f64>,
    },
    /// One run; writes the event log.
    Simulate(SimulateArgs),
    /// Relaxation times of the origin (or the whole box) over a β grid.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_enum, default_value = "origin")]
        target: TargetArg,
        /// Also write the per-β summary CSV here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// First occupation time of the origin without growth.
    Law {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Exponent fit of the medians in a rows CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "tau")]
        observable: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Deterministic operations on a serialized configuration.
    Bootstrap(BootstrapArgs),
    /// Ordering audit of monotonically coupled processes.
    Couple(CoupleArgs),
    /// Largest cluster against a threshold at the horizon.
    Bound {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_enum, default_value = "critical")]
        threshold: ThresholdArg,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Floor crossing of a cylinder, with the multilayer comparison.
    Cross {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Base side.
        #[arg(long, conflicts_with = "base_exp")]
        base: Option<usize>,
        /// Base side exponent: side ⌈exp(β·x)⌉.
        #[arg(long)]
        base_exp: Option<f64>,
        /// Height.
        #[arg(long, conflicts_with = "height_exp")]
        height: Option<usize>,
        /// Height exponent: height ⌈exp(β·x)⌉.
        #[arg(long)]
        height_exp: Option<f64>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Times for a cluster grown from the centre to reach each diameter.
    Speed {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated diameters; powers of two when absent.
        #[arg(long)]
        ladder: Option<String>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Containment checks of the dilate-close-erode construction.
    Dominate {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Dilation distance; the critical one when absent.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Origin,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ThresholdArg {
    Beta,
    Critical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UntilArg {
    Origin,
    Full,
    Time,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    volume: VolumeArgs,
    #[arg(long, default_value = "empty")]
    boundary: String,
    #[arg(long, value_enum, default_value = "full")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "fast")]
    engine: EngineArg,
    #[arg(long, value_enum, default_value = "origin")]
    until: UntilArg,
    /// Time limit; required with `--until time`, optional otherwise.
    #[arg(long)]
    time: Option<f64>,
    /// Initial configuration file; empty when absent.
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Also write the final configuration here.
    #[arg(long = "final")]
    final_config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MorphOp {
    Closure,
    Dilate,
    Erode,
    Spanned,
    Witness,
    Pipeline,
}

#[derive(Debug, clap::Args)]
struct BootstrapArgs {
    /// Configuration file, `-` for standard input.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    op: MorphOp,
    /// Distance for dilate, erode and pipeline.
    #[arg(long)]
    l: Option<usize>,
    /// Diameter for witness.
    #[arg(long)]
    k: Option<usize>,
    /// Subbox corner for spanned.
    #[arg(long)]
    sub_offset: Option<String>,
    /// Subbox sides for spanned.
    #[arg(long)]
    sub_sides: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct CoupleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    volume: VolumeArgs,
    /// Horizon exponent κ: runs stop at exp(β·κ).
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Theory {
            model,
            length_exponent,
        } => theory_cmd(&model, length_exponent),
        Command::Simulate(a) => simulate(&a),
        Command::Sweep {
            exp,
            target,
            summary,
        } => {
            let mut spec = exp.build(ExperimentKind::Relaxation, None)?;
            if exp_has_no_spec(&exp) {
                spec.target = match target {
                    TargetArg::Origin => Target::Origin,
                    TargetArg::Full => Target::Full,
                };
            }
            report(&measure_relaxation(&spec)?, &exp.output, summary.as_deref())
        }
        Command::Law { exp, summary } => {
            let spec = exp.build(ExperimentKind::NucleationLaw, Some(Volume::Cube(Scale::Fixed(1))))?;
            report(&nucleation_law_experiment(&spec)?, &exp.output, summary.as_deref())
        }
        Command::Fit {
            input,
            observable,
            output,
        } => fit(&input, &observable, &output),
        Command::Bootstrap(a) => bootstrap(&a),
        Command::Couple(a) => couple(&a),
        Command::Bound {
            exp,
            threshold,
            summary,
        } => {
            let mut spec = exp.build(ExperimentKind::ClusterBound, None)?;
            if exp_has_no_spec(&exp) {
                spec.threshold = match threshold {
                    ThresholdArg::Beta => ClusterThreshold::Beta,
                    ThresholdArg::Critical => ClusterThreshold::CriticalLength,
                };
            }
            report(&cluster_bound_experiment(&spec)?, &exp.output, summary.as_deref())
        }
        Command::Cross {
            exp,
            base,
            base_exp,
            height,
            height_exp,
            summary,
        } => {
            let mut spec = exp.build(ExperimentKind::Crossing, Some(Volume::Cube(Scale::Fixed(1))))?;
            if exp_has_no_spec(&exp) {
                let scale = |fixed: Option<usize>, e: Option<f64>, name: &str| match (fixed, e) {
                    (Some(n), _) => Ok(Scale::Fixed(n)),
                    (None, Some(x)) => Ok(Scale::Exponent(x)),
                    (None, None) => bail!("give --{name} or --{name}-exp"),
                };
                spec.cylinder = Some(Cylinder {
                    base: scale(base, base_exp, "base")?,
                    height: scale(height, height_exp, "height")?,
                });
            }
            report(&crossing_experiment(&spec)?, &exp.output, summary.as_deref())
        }
        Command::Speed {
            exp,
            ladder,
            summary,
        } => {
            let mut spec = exp.build(ExperimentKind::GrowthSpeed, None)?;
            if let Some(l) = ladder.filter(|_| exp_has_no_spec(&exp)) {
                spec.ladder = parse_list(&l)?;
            }
            report(&growth_speed_experiment(&spec)?, &exp.output, summary.as_deref())
        }
        Command::Dominate { exp, l, summary } => {
            let mut spec = exp.build(ExperimentKind::Domination, None)?;
            if let Some(l) = l.filter(|_| exp_has_no_spec(&exp)) {
                spec.dilation = Dilation::Fixed(l);
            }
            report(&domination_experiment(&spec)?, &exp.output, summary.as_deref())
        }
    }
}

fn exp_has_no_spec(exp: &ExperimentArgs) -> bool {
    exp.spec.is_none()
}

fn report(result: &ExperimentResult, output: &OutputArgs, summary: Option<&Path>) -> Result<()> {
    let text = match output.format {
        Format::Csv => result.rows_csv()?,
        Format::Json => result.to_json()?,
    };
    output.emit(&text)?;
    if let Some(path) = summary {
        std::fs::write(path, result.summary_csv()?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(f) = &result.fit {
        eprintln!(
            "fit: slope {:.4} ± {:.4}, intercept {:.4}, {} points",
            f.slope, f.slope_stderr, f.intercept, f.points
        );
    }
    Ok(())
}

fn theory_cmd(model: &ModelArgs, length_exponent: Option<f64>) -> Result<()> {
    let params = model.params(None)?;
    let t = theory(&params);
    println!("i,gamma,kappa,length");
    for i in 0..=params.dim {
        println!("{i},{},{},{}", params.gammas[i], t.kappas[i], t.lengths[i]);
    }
    let volume = length_exponent.map_or(VolumeExponent::Infinite, VolumeExponent::Finite);
    println!("predicted exponent: {}", predicted_exponent(&params, volume)?);
    Ok(())
}

/// Box for a single run: the volume flags evaluated at the run's β.
fn region_for(model: &ModelArgs, volume: &VolumeArgs) -> Result<(nucleation::model::ModelParams, BoxRegion)> {
    let params = model.params(None)?;
    let Some(v) = volume.volume()? else {
        bail!("give one of --L, --side, --sides, --proxy");
    };
    let spec = ExperimentSpec::new(ExperimentKind::Relaxation, params.clone(), vec![params.beta], v);
    let region = spec.region(&params)?;
    Ok((params, region))
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let (params, mut region) = region_for(&a.model, &a.volume)?;
    let initial = match &a.initial {
        Some(path) => {
            let c = parse_configuration(&read_input(path)?)?;
            region = c.region().clone();
            c
        }
        None => Configuration::empty(region.clone()),
    };
    let target = match a.until {
        UntilArg::Origin => Some(StopRule::OriginOccupied),
        UntilArg::Full => Some(StopRule::BoxFull),
        UntilArg::Time => None,
    };
    let stop = match (target, a.time) {
        (Some(t), Some(h)) => StopRule::first_of([t, StopRule::TimeLimit(h)]),
        (Some(t), None) => t,
        (None, Some(h)) => StopRule::TimeLimit(h),
        (None, None) => bail!("--until time needs --time"),
    };
    let process = Process::new(initial, stop)
        .boundary(parse_boundary(&a.boundary, params.dim)?)
        .variant(a.variant.into());
    let field = GraphicalField::new(a.seed, region);
    let engine: nucleation::dynamics::Engine = a.engine.into();
    let traj = engine.run(&params, &process, &field)?;
    if let Some(path) = &a.final_config {
        std::fs::write(path, write_configuration(&traj.final_config))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let text = match a.output.format {
        Format::Csv => traj.events_csv(),
        Format::Json => trajectory_json(&traj)?,
    };
    a.output.emit(&text)?;
    eprintln!(
        "stopped at {} after {} events ({:?})",
        traj.final_time,
        traj.events.len(),
        traj.stop_reason
    );
    Ok(())
}

fn trajectory_json(traj: &Trajectory) -> Result<String> {
    let region = traj.region();
    let events: Vec<_> = traj
        .events
        .iter()
        .map(|e| serde_json::json!({ "time": e.time, "site": region.coord_of(e.site) }))
        .collect();
    let value = serde_json::json!({
        "offset": region.offset(),
        "sides": region.sides(),
        "final_time": traj.final_time,
        "stop_reason": format!("{:?}", traj.stop_reason),
        "events": events,
    });
    Ok(serde_json::to_string_pretty(&value)?)
}

fn fit(input: &Path, observable: &str, output: &OutputArgs) -> Result<()> {
    let text = read_input(input)?;
    let rows = csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<Row>, _>>()
        .context("parsing rows CSV")?;
    let f = fit_summary(&summarize(&rows), observable)?;
    let text = match output.format {
        Format::Csv => format!(
            "slope,intercept,slope_stderr,points\n{},{},{},{}\n",
            f.slope, f.intercept, f.slope_stderr, f.points
        ),
        Format::Json => serde_json::to_string_pretty(&f)? + "\n",
    };
    output.emit(&text)
}

fn describe(c: &Configuration) -> String {
    format!(
        "clusters: {}, max diameter: {}",
        connected_clusters(c).len(),
        max_cluster_diameter(c)
    )
}

fn bootstrap(a: &BootstrapArgs) -> Result<()> {
    let config = parse_configuration(&read_input(&a.input)?)?;
    let need_l = || a.l.context("this operation needs --l");
    let mut text = String::new();
    let mut push = |c: &Configuration| {
        text.push_str(&write_configuration(c));
        text.push_str(&describe(c));
        text.push('\n');
    };
    match a.op {
        MorphOp::Closure => push(&bootstrap_closure(&config)),
        MorphOp::Dilate => push(&dilate(&config, need_l()?)),
        MorphOp::Erode => push(&erode(&config, need_l()?)),
        MorphOp::Pipeline => {
            let (rho, xi) = domination_pipeline(&config, need_l()?)?;
            push(&rho);
            push(&xi);
        }
        MorphOp::Spanned => {
            let (Some(o), Some(s)) = (&a.sub_offset, &a.sub_sides) else {
                bail!("spanned needs --sub-offset and --sub-sides");
            };
            let sub = BoxRegion::new(parse_list(o)?, parse_list(s)?)?;
            text = format!("{}\n", internally_spanned(&config, &sub)?);
        }
        MorphOp::Witness => {
            let k = a.k.context("witness needs --k")?;
            text = match al_witness(&config, k)? {
                Some(b) => format!("offset {:?} sides {:?}\n", b.offset(), b.sides()),
                None => "none\n".into(),
            };
        }
    }
    match &a.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(serde::Serialize)]
struct AuditRow {
    trial: usize,
    seed: u64,
    lower: &'static str,
    upper: &'static str,
    violations: usize,
}

/// Each pair runs on one shared field; the lower member should never
/// occupy a site the upper one lacks.
fn couple(a: &CoupleArgs) -> Result<()> {
    let (params, region) = region_for(&a.model, &a.volume)?;
    if region.dim() == 0 {
        bail!("coupling audit needs dimension at least 1");
    }
    let horizon = (params.beta * a.kappa).exp();
    let axis = region.dim() - 1;
    let mut rows = Vec::new();
    for trial in 0..a.trials {
        let seed = nucleation::harness::trial_seed(a.seed, trial);
        let field = GraphicalField::new(seed, region.clone());
        let run = |initial: Configuration, boundary, variant| {
            Process::new(initial, StopRule::TimeLimit(horizon))
                .boundary(boundary)
                .variant(variant)
        };
        let empty = || Configuration::empty(region.clone());
        // a sparse seed set for the growth-only pair
        let seeds = bernoulli_snapshot(
            &GraphicalField::new(derive_seed(seed, 1), region.clone()),
            &params,
            params.dim,
            horizon,
        )?;
        let processes = [
            run(empty(), BoundaryCondition::Empty, ProcessVariant::Full),
            run(empty(), BoundaryCondition::Floor(axis), ProcessVariant::Full),
            run(empty(), BoundaryCondition::Sandwich(axis), ProcessVariant::Full),
            run(seeds.clone(), BoundaryCondition::Empty, ProcessVariant::NonNucleating),
            run(seeds, BoundaryCondition::Empty, ProcessVariant::Full),
        ];
        let t = nucleation::dynamics::run_coupled(&params, &processes, &field)?;
        for (lo, hi, lower, upper) in [
            (0, 1, "empty", "floor"),
            (1, 2, "floor", "sandwich"),
            (3, 4, "non_nucleating", "full"),
        ] {
            rows.push(AuditRow {
                trial,
                seed,
                lower,
                upper,
                violations: ordering_violations(&t[lo], &t[hi])?,
            });
        }
    }
    let text = match a.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    a.output.emit(&text)?;
    let total: usize = rows.iter().map(|r| r.violations).sum();
    eprintln!("{} comparisons, {total} violations", rows.len());
    Ok(())
}
