use serde::{Deserialize, Serialize};

use crate::dynamics::{Engine, ProcessVariant};
use crate::error::{domain, Error, Result};
use crate::lattice::{BoundaryCondition, BoxRegion};
use crate::model::{theory, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Time until the stop target is reached from the empty box.
    Relaxation,
    /// Time of the first occupation in the box.
    NucleationLaw,
    /// Largest cluster at the horizon versus a threshold.
    ClusterBound,
    /// Crossing of a cylinder by the non-nucleating floor process.
    Crossing,
    /// Times for a single droplet to reach a ladder of diameters.
    GrowthSpeed,
    /// Snapshot, closure bracket and the process under one field.
    Domination,
}

/// An integer length derived from `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Fixed(usize),
    /// `⌈exp(β·x)⌉`.
    Exponent(f64),
    /// `⌈exp(β·m·κ_d)⌉`, a stand-in for infinite volume when `m > 1`.
    KappaMultiple(f64),
    /// `⌈β⌉`.
    Beta,
}

impl Scale {
    pub fn length(&self, params: &ModelParams) -> Result<usize> {
        let x = match *self {
            Scale::Fixed(n) => return Ok(n.max(1)),
            Scale::Exponent(e) => (params.beta * e).exp(),
            Scale::KappaMultiple(m) => (params.beta * m * theory(params).kappa_d()).exp(),
            Scale::Beta => params.beta,
        };
        if !(x.is_finite() && x < u32::MAX as f64) {
            return domain(format!("length {x} is too large"));
        }
        Ok((x.ceil() as usize).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Volume {
    /// Cube centered at the origin.
    Cube(Scale),
    /// Explicit sides, lowest corner at the origin.
    Sides(Vec<usize>),
}

/// The upright cylinder of the crossing experiment; its last axis is the
/// height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cylinder {
    pub base: Scale,
    pub height: Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Origin,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterThreshold {
    /// Exceeded by diameters above `β`.
    Beta,
    /// Exceeded by diameters above `⌈exp(β L_d)⌉`.
    #[default]
    CriticalLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dilation {
    Fixed(usize),
    /// `max(2, ⌈exp(β L_d)/β⌉)`.
    #[default]
    Critical,
}

impl Dilation {
    pub fn length(&self, params: &ModelParams) -> Result<usize> {
        match *self {
            Dilation::Fixed(l) => Ok(l),
            Dilation::Critical => {
                let x = (params.beta * theory(params).length_d()).exp() / params.beta;
                if !(x.is_finite() && x < u32::MAX as f64) {
                    return domain(format!("dilation {x} is too large"));
                }
                Ok((x.ceil() as usize).max(2))
            }
        }
    }
}

/// Full description of a seeded multi-trial experiment. `params.beta` is
/// ignored in favor of each entry of `beta_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub params: ModelParams,
    pub beta_grid: Vec<f64>,
    pub volume: Volume,
    #[serde(default)]
    pub boundary: BoundaryCondition,
    #[serde(default)]
    pub variant: ProcessVariant,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub target: Target,
    /// Horizon `exp(β·κ)`; unbounded runs when absent, zero at `-inf`.
    #[serde(default)]
    pub horizon_exponent: Option<f64>,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub threshold: ClusterThreshold,
    #[serde(default)]
    pub dilation: Dilation,
    #[serde(default)]
    pub cylinder: Option<Cylinder>,
    /// Diameters for the growth-speed experiment; powers of two up to the
    /// box size when empty.
    #[serde(default)]
    pub ladder: Vec<usize>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, params: ModelParams, beta_grid: Vec<f64>, volume: Volume) -> Self {
        Self {
            kind,
            params,
            beta_grid,
            volume,
            boundary: BoundaryCondition::Empty,
            variant: ProcessVariant::Full,
            trials: 1,
            base_seed: 0,
            target: Target::Origin,
            horizon_exponent: None,
            engine: Engine::Fast,
            threshold: ClusterThreshold::CriticalLength,
            dilation: Dilation::Critical,
            cylinder: None,
            ladder: Vec::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return domain("trials must be at least 1");
        }
        if self.beta_grid.is_empty() {
            return domain("beta grid is empty");
        }
        for &b in &self.beta_grid {
            self.params_at(b)?;
        }
        if let Some(k) = self.horizon_exponent {
            // -inf is allowed and means a zero horizon
            if k.is_nan() || k == f64::INFINITY {
                return domain("horizon exponent must be below +inf");
            }
        }
        Ok(())
    }

    /// Parameters at one grid point.
    pub fn params_at(&self, beta: f64) -> Result<ModelParams> {
        let p = self.params.with_beta(beta);
        p.checked()?;
        Ok(p)
    }

    pub fn horizon(&self, beta: f64) -> Option<f64> {
        self.horizon_exponent.map(|k| (beta * k).exp())
    }

    pub(crate) fn required_horizon(&self, beta: f64) -> Result<f64> {
        self.horizon(beta)
            .map_or_else(|| domain("this experiment needs a horizon exponent"), Ok)
    }

    /// The simulation box at one grid point.
    pub fn region(&self, params: &ModelParams) -> Result<BoxRegion> {
        let d = params.dim;
        match &self.volume {
            Volume::Cube(scale) => {
                if d == 0 {
                    return Ok(BoxRegion::singleton());
                }
                BoxRegion::centered_cube(d, scale.length(params)?)
            }
            Volume::Sides(sides) => {
                if sides.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: sides.len(),
                    });
                }
                BoxRegion::at_origin(sides.clone())
            }
        }
    }

    pub(crate) fn cylinder_region(&self, params: &ModelParams) -> Result<BoxRegion> {
        let Some(c) = self.cylinder else {
            return self.region(params);
        };
        let d = params.dim;
        if d == 0 {
            return domain("a cylinder needs at least one dimension");
        }
        let mut sides = vec![c.base.length(params)?; d - 1];
        sides.push(c.height.length(params)?);
        BoxRegion::at_origin(sides)
    }
}
