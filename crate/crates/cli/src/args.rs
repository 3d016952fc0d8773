use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};

use nucleation::dynamics::{Engine, ProcessVariant};
use nucleation::harness::{ExperimentKind, ExperimentSpec, Scale, Volume};
use nucleation::lattice::BoundaryCondition;
use nucleation::model::ModelParams;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EngineArg {
    Graphical,
    Fast,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Graphical => Engine::Graphical,
            EngineArg::Fast => Engine::Fast,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Full,
    NonNucleating,
}

impl From<VariantArg> for ProcessVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => ProcessVariant::Full,
            VariantArg::NonNucleating => ProcessVariant::NonNucleating,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().with_context(|| format!("bad list entry `{x}`")))
        .collect()
}

/// Model parameters, from a TOML file or from flags.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// TOML file with `dim`, `gammas`, `beta` and optionally `rate_at_d`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma-separated activation energies, lowest index first.
    #[arg(long)]
    pub gammas: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl ModelArgs {
    /// Parameters at `beta` (or the file's/flag's own β when `None`).
    pub fn params(&self, beta: Option<f64>) -> Result<ModelParams> {
        let mut p = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ModelParams::from_toml(&text)?
            }
            None => {
                let Some(g) = &self.gammas else {
                    bail!("give --config or --gammas");
                };
                let gammas: Vec<f64> = parse_list(g)?;
                let dim = self.dim.unwrap_or(gammas.len().saturating_sub(1));
                let b = beta.or(self.beta).context("give --beta")?;
                ModelParams::new(dim, gammas, b)?
            }
        };
        if let Some(d) = self.dim {
            if d != p.dim {
                bail!("--dim {d} disagrees with the parameters (dimension {})", p.dim);
            }
        }
        if let Some(b) = beta.or(self.beta) {
            p = p.with_beta(b);
        }
        Ok(p)
    }
}

/// Box size flags; exactly one applies.
#[derive(Debug, Args)]
pub struct VolumeArgs {
    /// Cube side exponent: side ⌈exp(β·L)⌉.
    #[arg(long = "L", value_name = "L")]
    pub length_exponent: Option<f64>,
    /// Fixed cube side.
    #[arg(long)]
    pub side: Option<usize>,
    /// Comma-separated box sides, corner at the origin.
    #[arg(long)]
    pub sides: Option<String>,
    /// Cube side ⌈exp(β·m·κ_d)⌉, a stand-in for infinite volume.
    #[arg(long, value_name = "m")]
    pub proxy: Option<f64>,
}

impl VolumeArgs {
    /// The chosen volume, `None` when no flag was given.
    pub fn volume(&self) -> Result<Option<Volume>> {
        let picked = [
            self.length_exponent.map(|l| Volume::Cube(Scale::Exponent(l))),
            self.side.map(|s| Volume::Cube(Scale::Fixed(s))),
            self.sides.as_deref().map(|s| parse_list(s).map(Volume::Sides)).transpose()?,
            self.proxy.map(|m| Volume::Cube(Scale::KappaMultiple(m))),
        ];
        let mut given = picked.into_iter().flatten();
        match (given.next(), given.next()) {
            (v, None) => Ok(v),
            _ => bail!("--L, --side, --sides and --proxy are exclusive"),
        }
    }
}

/// `empty`, `floor[:axis]` or `sandwich[:axis]`; the axis defaults to the
/// last one.
pub fn parse_boundary(text: &str, dim: usize) -> Result<BoundaryCondition> {
    let (name, axis) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a.parse::<usize>().context("bad boundary axis")?)),
        None => (text, None),
    };
    let axis = axis.unwrap_or(dim.saturating_sub(1));
    Ok(match name {
        "empty" => BoundaryCondition::Empty,
        "floor" => BoundaryCondition::Floor(axis),
        "sandwich" => BoundaryCondition::Sandwich(axis),
        other => bail!("unknown boundary `{other}`"),
    })
}

/// Everything an experiment needs beyond its kind-specific flags.
#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Full experiment spec as TOML; other experiment flags are ignored.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated β values.
    #[arg(long)]
    pub beta_grid: Option<String>,
    #[command(flatten)]
    pub volume: VolumeArgs,
    /// Horizon exponent κ: runs stop at exp(β·κ).
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, default_value = "empty")]
    pub boundary: String,
    #[arg(long, value_enum, default_value = "full")]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "fast")]
    pub engine: EngineArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl ExperimentArgs {
    fn spec(&self, kind: ExperimentKind) -> Result<Option<ExperimentSpec>> {
        let Some(path) = &self.spec else {
            return Ok(None);
        };
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec = ExperimentSpec::from_toml(&text)?;
        if spec.kind != kind {
            bail!("spec file describes a {:?} experiment, not {kind:?}", spec.kind);
        }
        Ok(Some(spec))
    }

    /// Spec from the flags. `fallback` is used when no volume flag is given;
    /// without one a volume flag is required.
    pub fn build(&self, kind: ExperimentKind, fallback: Option<Volume>) -> Result<ExperimentSpec> {
        if let Some(spec) = self.spec(kind)? {
            return Ok(spec);
        }
        let grid: Vec<f64> = match (&self.beta_grid, self.model.beta) {
            (Some(g), _) => parse_list(g)?,
            (None, Some(b)) => vec![b],
            (None, None) => bail!("give --beta-grid or --beta"),
        };
        let params = self.model.params(grid.first().copied())?;
        let volume = match (self.volume.volume()?, fallback) {
            (Some(v), _) | (None, Some(v)) => v,
            (None, None) => bail!("give one of --L, --side, --sides, --proxy"),
        };
        let mut spec = ExperimentSpec::new(kind, params.clone(), grid, volume);
        spec.boundary = parse_boundary(&self.boundary, params.dim)?;
        spec.variant = self.variant.into();
        spec.trials = self.trials;
        spec.base_seed = self.seed;
        spec.horizon_exponent = self.kappa;
        spec.engine = self.engine.into();
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

impl OutputArgs {
    pub fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}
