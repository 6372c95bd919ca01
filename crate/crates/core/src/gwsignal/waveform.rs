//! Frequency-domain inspiral waveforms.
//!
//! [`ToyInspiral`] is a closed-form stationary-phase model with the conventions
//! below (geometric units, `G = c = 1` after converting masses to seconds):
//!
//! ```text
//! Mc_s  = Mc * 4.925490947641267e-6 s          (chirp mass in seconds)
//! eta   = q / (1 + q)^2                        (symmetric mass ratio)
//! M_s   = Mc_s * eta^(-3/5)                    (total mass in seconds)
//! v     = (pi * M_s * f)^(1/3)
//! A(f)  = sqrt(5/24) * pi^(-2/3) * c * Mc_s^(5/6) / d_L * f^(-7/6) * (1 + cos^2 theta_jn) / 2
//! Psi(f)= -pi/4 + 3 / (128 eta v^5) * [1 + (3715/756 + 55 eta / 9) v^2]
//! h(f)  = A(f) * exp(-i Psi(f))                for f <= f_isco
//! h(f)  = 0                                    for f >  f_isco = 1 / (6^(3/2) pi M_s)
//! ```
//!
//! with `d_L` converted from Mpc to metres (1 Mpc = 3.085677581491367e22 m) and
//! `c = 299792458 m/s`. Coalescence time and phase are fixed to zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::series::{FrequencyGrid, FrequencySeries};
use crate::error::{Error, Result};

pub const MSUN_SECONDS: f64 = 4.925490947641267e-6;
pub const MPC_METERS: f64 = 3.085677581491367e22;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default luminosity distance (Mpc) when it is not inferred.
pub const DEFAULT_DISTANCE_MPC: f64 = 400.0;
/// Default inclination (rad) when it is not inferred.
pub const DEFAULT_INCLINATION: f64 = 0.0;

/// Binary source parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// Chirp mass in solar masses.
    pub chirp_mass: f64,
    pub mass_ratio: f64,
    /// Luminosity distance in Mpc.
    #[serde(default = "default_distance")]
    pub luminosity_distance: f64,
    /// Inclination angle in radians.
    #[serde(default)]
    pub inclination: f64,
}

fn default_distance() -> f64 {
    DEFAULT_DISTANCE_MPC
}

impl SourceParams {
    pub fn new(chirp_mass: f64, mass_ratio: f64) -> Self {
        Self {
            chirp_mass,
            mass_ratio,
            luminosity_distance: DEFAULT_DISTANCE_MPC,
            inclination: DEFAULT_INCLINATION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("chirp_mass", self.chirp_mass)?;
        positive("mass_ratio", self.mass_ratio)?;
        positive("luminosity_distance", self.luminosity_distance)?;
        if !(0.0..=PI).contains(&self.inclination) {
            return Err(Error::InvalidParameter(format!(
                "inclination must lie in [0, pi], got {}",
                self.inclination
            )));
        }
        Ok(())
    }

    pub fn get(&self, kind: ParamKind) -> f64 {
        match kind {
            ParamKind::ChirpMass => self.chirp_mass,
            ParamKind::MassRatio => self.mass_ratio,
            ParamKind::LuminosityDistance => self.luminosity_distance,
            ParamKind::Inclination => self.inclination,
        }
    }

    pub fn set(&mut self, kind: ParamKind, value: f64) {
        match kind {
            ParamKind::ChirpMass => self.chirp_mass = value,
            ParamKind::MassRatio => self.mass_ratio = value,
            ParamKind::LuminosityDistance => self.luminosity_distance = value,
            ParamKind::Inclination => self.inclination = value,
        }
    }
}

/// Source parameter addressed by a lattice axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    ChirpMass,
    MassRatio,
    LuminosityDistance,
    Inclination,
}

impl ParamKind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "chirp_mass" | "mc" => Ok(ParamKind::ChirpMass),
            "mass_ratio" | "q" => Ok(ParamKind::MassRatio),
            "luminosity_distance" | "d_l" | "distance" => Ok(ParamKind::LuminosityDistance),
            "inclination" | "theta_jn" => Ok(ParamKind::Inclination),
            other => Err(Error::InvalidParameter(format!("unknown source parameter {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ParamKind::ChirpMass => "chirp_mass",
            ParamKind::MassRatio => "mass_ratio",
            ParamKind::LuminosityDistance => "luminosity_distance",
            ParamKind::Inclination => "inclination",
        }
    }
}

/// A frequency-domain signal model.
pub trait WaveformModel: Send + Sync {
    fn strain(&self, params: &SourceParams, grid: &FrequencyGrid) -> Result<FrequencySeries>;
}

/// Leading-order amplitude, 1PN phase stationary-phase inspiral, cut at ISCO.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToyInspiral;

impl ToyInspiral {
    pub fn isco_frequency(params: &SourceParams) -> f64 {
        let eta = symmetric_mass_ratio(params.mass_ratio);
        let total = params.chirp_mass * MSUN_SECONDS * eta.powf(-0.6);
        1.0 / (6f64.powf(1.5) * PI * total)
    }
}

pub fn symmetric_mass_ratio(q: f64) -> f64 {
    q / ((1.0 + q) * (1.0 + q))
}

impl WaveformModel for ToyInspiral {
    fn strain(&self, params: &SourceParams, grid: &FrequencyGrid) -> Result<FrequencySeries> {
        params.validate()?;
        let mc = params.chirp_mass * MSUN_SECONDS;
        let eta = symmetric_mass_ratio(params.mass_ratio);
        let total = mc * eta.powf(-0.6);
        let f_isco = 1.0 / (6f64.powf(1.5) * PI * total);
        let cos_i = params.inclination.cos();
        let geometry = 0.5 * (1.0 + cos_i * cos_i);
        let distance = params.luminosity_distance * MPC_METERS;
        let amp0 =
            (5.0f64 / 24.0).sqrt() * PI.powf(-2.0 / 3.0) * SPEED_OF_LIGHT * mc.powf(5.0 / 6.0) / distance * geometry;
        let pn1 = 3715.0 / 756.0 + 55.0 * eta / 9.0;

        let values = grid
            .frequencies()
            .map(|f| {
                if f > f_isco {
                    return Complex64::new(0.0, 0.0);
                }
                let v = (PI * total * f).cbrt();
                let v2 = v * v;
                let psi = -PI / 4.0 + 3.0 / (128.0 * eta * v2 * v2 * v) * (1.0 + pn1 * v2);
                let amp = amp0 * f.powf(-7.0 / 6.0);
                Complex64::from_polar(amp, -psi)
            })
            .collect();
        FrequencySeries::new(*grid, values)
    }
}

/// Convenience wrapper around [`ToyInspiral`].
pub fn toy_waveform(params: &SourceParams, grid: &FrequencyGrid) -> Result<FrequencySeries> {
    ToyInspiral.strain(params, grid)
}
