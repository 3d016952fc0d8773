//! Model parameters, the occupation rates and the exponent calculator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which branch of the rate function applies at exactly `d` occupied
/// neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateAtD {
    /// `c(d) = exp(-β Γ_0)`.
    #[default]
    GammaZero,
    /// `c(d) = 1`.
    One,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub dim: usize,
    /// Activation energies `Γ_0..=Γ_d`.
    pub gammas: Vec<f64>,
    pub beta: f64,
    #[serde(default)]
    pub rate_at_d: RateAtD,
}

/// First violated constraint of a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    WrongGammaCount { expected: usize, got: usize },
    NonFiniteGamma(usize),
    NegativeGamma,
    GammasNotNondecreasing(usize),
    BetaNotPositive,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongGammaCount { expected, got } => {
                write!(f, "expected {expected} gammas, got {got}")
            }
            Violation::NonFiniteGamma(i) => write!(f, "gamma {i} is not finite"),
            Violation::NegativeGamma => write!(f, "gamma 0 must be nonnegative"),
            Violation::GammasNotNondecreasing(i) => {
                write!(f, "gammas not nondecreasing (at index {i})")
            }
            Violation::BetaNotPositive => write!(f, "beta must be positive"),
        }
    }
}

impl ModelParams {
    pub fn new(dim: usize, gammas: Vec<f64>, beta: f64) -> Result<Self> {
        let p = Self {
            dim,
            gammas,
            beta,
            rate_at_d: RateAtD::default(),
        };
        p.validate().map_err(Error::InvalidParams)?;
        Ok(p)
    }

    /// Parses and validates a TOML parameter file with keys `dim`,
    /// `gammas`, `beta` and optionally `rate_at_d`. Unknown keys are
    /// rejected.
    pub fn from_toml(text: &str) -> Result<Self> {
        let p: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.checked()?;
        Ok(p)
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..self.clone() }
    }

    pub fn with_rate_at_d(self, rate_at_d: RateAtD) -> Self {
        Self { rate_at_d, ..self }
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        if self.gammas.len() != self.dim + 1 {
            return Err(Violation::WrongGammaCount {
                expected: self.dim + 1,
                got: self.gammas.len(),
            });
        }
        if let Some(i) = self.gammas.iter().position(|g| !g.is_finite()) {
            return Err(Violation::NonFiniteGamma(i));
        }
        if self.gammas[0] < 0.0 {
            return Err(Violation::NegativeGamma);
        }
        if let Some(i) = self.gammas.windows(2).position(|w| w[1] < w[0]) {
            return Err(Violation::GammasNotNondecreasing(i + 1));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Violation::BetaNotPositive);
        }
        Ok(())
    }

    pub(crate) fn checked(&self) -> Result<&Self> {
        self.validate().map_err(Error::InvalidParams)?;
        Ok(self)
    }

    /// Occupation rate of an empty site with `n` occupied neighbors.
    pub fn rate(&self, n: usize) -> Result<f64> {
        let d = self.dim;
        if n > 2 * d {
            return domain(format!("neighbor count {n} exceeds 2d = {}", 2 * d));
        }
        let r = if n < d {
            (-self.beta * self.gammas[d - n]).exp()
        } else if n == d {
            match self.rate_at_d {
                RateAtD::GammaZero => (-self.beta * self.gammas[0]).exp(),
                RateAtD::One => 1.0,
            }
        } else {
            1.0
        };
        Ok(r)
    }

    /// `c(0), …, c(2d)`.
    pub fn rate_table(&self) -> Vec<f64> {
        (0..=2 * self.dim).map(|n| self.rate(n).unwrap()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub kappas: Vec<f64>,
    pub lengths: Vec<f64>,
}

impl TheoryConstants {
    pub fn kappa_d(&self) -> f64 {
        *self.kappas.last().unwrap()
    }

    pub fn length_d(&self) -> f64 {
        *self.lengths.last().unwrap()
    }
}

/// Critical constants `κ_i` and critical length exponents `L_i`.
pub fn theory(params: &ModelParams) -> TheoryConstants {
    theory_from_gammas(&params.gammas)
}

pub fn theory_from_gammas(gammas: &[f64]) -> TheoryConstants {
    let mut kappas = Vec::with_capacity(gammas.len());
    let mut lengths = Vec::with_capacity(gammas.len());
    kappas.push(gammas[0]);
    lengths.push(0.0);
    for i in 1..gammas.len() {
        let k = i as f64;
        let kappa = gammas[i - 1].max((gammas[i] + k * kappas[i - 1]) / (k + 1.0));
        kappas.push(kappa);
        // rounding can leave Γ_i - κ_i a hair below zero
        lengths.push(((gammas[i] - kappa) / k).max(0.0));
    }
    TheoryConstants { kappas, lengths }
}

/// Side-length exponent of the simulation box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VolumeExponent {
    Finite(f64),
    Infinite,
}

/// Predicted relaxation exponent `max(Γ_d − dL, κ_d)` in a box of side
/// `exp(βL)`; `κ_d` in infinite volume.
pub fn predicted_exponent(params: &ModelParams, volume: VolumeExponent) -> Result<f64> {
    let kappa_d = theory(params).kappa_d();
    match volume {
        VolumeExponent::Infinite => Ok(kappa_d),
        VolumeExponent::Finite(l) if l.is_nan() || l < 0.0 => {
            domain("volume exponent must be nonnegative")
        }
        VolumeExponent::Finite(l) if l.is_infinite() => Ok(kappa_d),
        VolumeExponent::Finite(l) => {
            let gd = params.gammas[params.dim];
            Ok((gd - params.dim as f64 * l).max(kappa_d))
        }
    }
}
