//! Compton unit system (ħ = m = c = 1) and the model parameter set.
//!
//! Every other module works in Compton units: lengths in ħ/(mc), times in
//! ħ/(mc²), energies in mc². The Zitterbewegung frequency 2mc²/ħ is exactly 2.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light, m/s (exact).
pub const C_SI: f64 = 299_792_458.0;
/// Electron mass, kg (CODATA 2018).
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m (CODATA 2018).
pub const EPSILON0_SI: f64 = 8.854_187_812_8e-12;

/// Physical dimensions the workbench converts. Closed set on purpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Time,
    Energy,
    Frequency,
    Wavenumber,
    /// length² / time
    Diffusion,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Length,
        Dimension::Time,
        Dimension::Energy,
        Dimension::Frequency,
        Dimension::Wavenumber,
        Dimension::Diffusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Energy => "energy",
            Dimension::Frequency => "frequency",
            Dimension::Wavenumber => "wavenumber",
            Dimension::Diffusion => "diffusion",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::input(format!("unknown dimension tag `{s}`")))
    }
}

/// SI values of the Compton scales for a particle of given mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScales {
    /// kg
    pub mass: f64,
    /// ħ/(mc), m
    pub length: f64,
    /// ħ/(mc²), s
    pub time: f64,
    /// mc², J
    pub energy: f64,
    /// mc²/ħ, 1/s
    pub frequency: f64,
    /// mc/ħ, 1/m
    pub wavenumber: f64,
}

impl UnitScales {
    pub fn from_mass(mass_kg: f64) -> Result<Self> {
        if !(mass_kg.is_finite() && mass_kg > 0.0) {
            return Err(Error::input(format!("mass must be positive and finite, got {mass_kg}")));
        }
        let length = HBAR_SI / (mass_kg * C_SI);
        let time = length / C_SI;
        Ok(UnitScales {
            mass: mass_kg,
            length,
            time,
            energy: mass_kg * C_SI * C_SI,
            frequency: 1.0 / time,
            wavenumber: 1.0 / length,
        })
    }

    pub fn electron() -> Self {
        Self::from_mass(ELECTRON_MASS_SI).expect("electron mass is positive")
    }

    /// SI size of one Compton unit of `dim`.
    pub fn scale(&self, dim: Dimension) -> f64 {
        match dim {
            Dimension::Length => self.length,
            Dimension::Time => self.time,
            Dimension::Energy => self.energy,
            Dimension::Frequency => self.frequency,
            Dimension::Wavenumber => self.wavenumber,
            Dimension::Diffusion => self.length * self.length / self.time,
        }
    }
}

impl Default for UnitScales {
    fn default() -> Self {
        Self::electron()
    }
}

pub fn to_compton(value: f64, dim: Dimension, scales: &UnitScales) -> f64 {
    value / scales.scale(dim)
}

pub fn from_compton(value: f64, dim: Dimension, scales: &UnitScales) -> f64 {
    value * scales.scale(dim)
}

/// Radiation-reaction time e²/(6πε₀mc³) of the electron, in seconds.
pub fn electron_radiation_time_si() -> f64 {
    ELEMENTARY_CHARGE_SI * ELEMENTARY_CHARGE_SI
        / (6.0 * std::f64::consts::PI * EPSILON0_SI * ELECTRON_MASS_SI * C_SI.powi(3))
}

/// Which dissipative right-hand side the quantum Hamilton-Jacobi equation carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Conservative,
    Collisional,
    Radiative,
    PhaseDiffusion,
    DAlembertDiffusion,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Conservative,
        ModelKind::Collisional,
        ModelKind::Radiative,
        ModelKind::PhaseDiffusion,
        ModelKind::DAlembertDiffusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Conservative => "conservative",
            ModelKind::Collisional => "collisional",
            ModelKind::Radiative => "radiative",
            ModelKind::PhaseDiffusion => "phase-diffusion",
            ModelKind::DAlembertDiffusion => "dalembert-diffusion",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::input(format!("unknown model `{s}`")))
    }
}

/// Model plus its single rate constant, Compton units.
///
/// The enum layout makes "exactly the matching rate constant is set" hold
/// by construction; the constructors enforce `rate >= 0` and finiteness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Conservative,
    /// Phase decay `−γS`.
    Collisional {
        gamma: f64,
    },
    /// Radiative friction `τ ∂ₜ²S`.
    Radiative {
        tau: f64,
    },
    /// Phase diffusion `D ∇²S`.
    PhaseDiffusion {
        diffusion: f64,
    },
    /// Covariant phase diffusion `−D □S`.
    DAlembertDiffusion {
        diffusion: f64,
    },
}

fn check_rate(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::input(format!("{name} must be finite and >= 0, got {v}")))
    }
}

impl ModelParams {
    pub fn collisional(gamma: f64) -> Result<Self> {
        Ok(ModelParams::Collisional {
            gamma: check_rate("gamma", gamma)?,
        })
    }

    pub fn radiative(tau: f64) -> Result<Self> {
        Ok(ModelParams::Radiative {
            tau: check_rate("tau", tau)?,
        })
    }

    pub fn phase_diffusion(diffusion: f64) -> Result<Self> {
        Ok(ModelParams::PhaseDiffusion {
            diffusion: check_rate("diffusion", diffusion)?,
        })
    }

    pub fn dalembert_diffusion(diffusion: f64) -> Result<Self> {
        Ok(ModelParams::DAlembertDiffusion {
            diffusion: check_rate("diffusion", diffusion)?,
        })
    }

    /// Build from a kind and the three optional rate constants, rejecting
    /// any constant that does not belong to the kind.
    pub fn from_parts(kind: ModelKind, gamma: Option<f64>, tau: Option<f64>, diffusion: Option<f64>) -> Result<Self> {
        let stray = |name: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::input(format!("{name} is not a parameter of the {kind} model")))
            } else {
                Ok(())
            }
        };
        let need = |name: &str, v: Option<f64>| -> Result<f64> {
            v.ok_or_else(|| Error::input(format!("the {kind} model requires {name}")))
        };
        match kind {
            ModelKind::Conservative => {
                stray("gamma", gamma.is_some())?;
                stray("tau", tau.is_some())?;
                stray("diffusion", diffusion.is_some())?;
                Ok(ModelParams::Conservative)
            }
            ModelKind::Collisional => {
                stray("tau", tau.is_some())?;
                stray("diffusion", diffusion.is_some())?;
                Self::collisional(need("gamma", gamma)?)
            }
            ModelKind::Radiative => {
                stray("gamma", gamma.is_some())?;
                stray("diffusion", diffusion.is_some())?;
                Self::radiative(need("tau", tau)?)
            }
            ModelKind::PhaseDiffusion => {
                stray("gamma", gamma.is_some())?;
                stray("tau", tau.is_some())?;
                Self::phase_diffusion(need("diffusion", diffusion)?)
            }
            ModelKind::DAlembertDiffusion => {
                stray("gamma", gamma.is_some())?;
                stray("tau", tau.is_some())?;
                Self::dalembert_diffusion(need("diffusion", diffusion)?)
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Conservative => ModelKind::Conservative,
            ModelParams::Collisional { .. } => ModelKind::Collisional,
            ModelParams::Radiative { .. } => ModelKind::Radiative,
            ModelParams::PhaseDiffusion { .. } => ModelKind::PhaseDiffusion,
            ModelParams::DAlembertDiffusion { .. } => ModelKind::DAlembertDiffusion,
        }
    }

    /// The model's rate constant, `None` for the conservative model.
    pub fn rate(&self) -> Option<f64> {
        match *self {
            ModelParams::Conservative => None,
            ModelParams::Collisional { gamma } => Some(gamma),
            ModelParams::Radiative { tau } => Some(tau),
            ModelParams::PhaseDiffusion { diffusion } | ModelParams::DAlembertDiffusion { diffusion } => {
                Some(diffusion)
            }
        }
    }

    pub fn is_dissipative(&self) -> bool {
        !matches!(self, ModelParams::Conservative)
    }

    /// Same kind, different rate constant.
    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        match self {
            ModelParams::Conservative => Ok(ModelParams::Conservative),
            ModelParams::Collisional { .. } => Self::collisional(rate),
            ModelParams::Radiative { .. } => Self::radiative(rate),
            ModelParams::PhaseDiffusion { .. } => Self::phase_diffusion(rate),
            ModelParams::DAlembertDiffusion { .. } => Self::dalembert_diffusion(rate),
        }
    }
}
