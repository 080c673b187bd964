//! JSON run configuration shared by the CLI subcommands.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{EvolveOptions, GroundState, IntensityGrid};
use crate::error::{Error, Result};
use crate::model::{AtomParams, DriveParams};
use crate::propagation::{DriveKnob, FreeParameter, MatchOptions, PulseGeometry};
use crate::scenario::PaperScenario;
use crate::susceptibility::SignalTriggerCoefficient;

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_SWEEP_AXES: usize = 3;

fn default_atom() -> AtomParams {
    PaperScenario::frozen().atom
}

fn default_drive() -> DriveParams {
    PaperScenario::frozen().drive
}

fn default_geometry() -> PulseGeometry {
    PaperScenario::frozen().geometry
}

/// Missing `atom`, `drive` or `geometry` sections fall back to the frozen
/// 87Rb scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_atom")]
    pub atom: AtomParams,
    #[serde(default = "default_drive")]
    pub drive: DriveParams,
    #[serde(default = "default_geometry")]
    pub geometry: PulseGeometry,
    #[serde(default)]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matching: Option<MatchingSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sc = PaperScenario::frozen();
        Self {
            schema_version: SCHEMA_VERSION,
            atom: sc.atom,
            drive: sc.drive,
            geometry: sc.geometry,
            options: Options::default(),
            sweep: None,
            matching: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    pub chi_st: SignalTriggerCoefficient,
    /// Total nonlinear phase (rad) whose length is reported.
    pub target_phase: f64,
    pub fit_grid: GridSpec,
    pub dynamics: DynamicsSpec,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            chi_st: SignalTriggerCoefficient::default(),
            target_phase: 5.0 * PI,
            fit_grid: GridSpec::default(),
            dynamics: DynamicsSpec::default(),
        }
    }
}

/// Log-spaced fractions of the per-axis reference intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { min: 1e-4, max: 1e-2, count: 6 }
    }
}

impl GridSpec {
    pub fn grid(&self) -> IntensityGrid {
        IntensityGrid::log_spaced(self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsSpec {
    /// End time in s; defaults to 100 / max(Gamma).
    pub t_end: Option<f64>,
    pub ground: GroundState,
    pub rtol: f64,
    pub atol: f64,
    pub dt_max: Option<f64>,
    pub stride: usize,
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        let e = EvolveOptions::default();
        Self { t_end: None, ground: GroundState::Pinned, rtol: e.rtol, atol: e.atol, dt_max: e.dt_max, stride: 10 }
    }
}

impl DynamicsSpec {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions { dt_max: self.dt_max, rtol: self.rtol, atol: self.atol, stride: self.stride, ground: self.ground }
    }

    pub fn end_time(&self, atom: &AtomParams) -> Result<f64> {
        if let Some(t) = self.t_end {
            return Ok(t);
        }
        let g = atom.gamma.iter().cloned().fold(0.0, f64::max);
        if g > 0.0 {
            Ok(100.0 / g)
        } else {
            Err(Error::InvalidParameter {
                name: "options.dynamics.t_end",
                reason: "required when every decay rate is zero".into(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    Velocities,
    Susceptibilities,
    Phases,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path such as `drive.delta5` or `atom.density_cm3`.
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: AxisScale,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let f = k as f64 / n;
                match self.scale {
                    AxisScale::Linear => self.min + (self.max - self.min) * f,
                    AxisScale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub quantity: SweepQuantity,
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingSpec {
    pub free: Vec<FreeParameter>,
    #[serde(default = "default_match_target")]
    pub target: f64,
    #[serde(default = "default_match_iterations")]
    pub max_iterations: usize,
}

fn default_match_target() -> f64 {
    MatchOptions::default().target
}

fn default_match_iterations() -> usize {
    MatchOptions::default().max_iterations
}

impl MatchingSpec {
    pub fn options(&self) -> MatchOptions {
        MatchOptions { target: self.target, max_iterations: self.max_iterations }
    }
}

/// A settable scalar of the physical parameters, addressed by a dotted path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParameterPath {
    Drive(DriveKnob),
    Gamma(usize),
    Dipole12,
    Dipole34,
    Dipole56,
    Density,
    OmegaP,
    OmegaS,
    OmegaT,
    Length,
    TauP,
    TauS,
    TauT,
}

impl ParameterPath {
    pub fn parse(path: &str) -> Result<Self> {
        let p = match path {
            "drive.rabi_p" => Self::Drive(DriveKnob::RabiP),
            "drive.rabi_c" => Self::Drive(DriveKnob::RabiC),
            "drive.rabi_s" => Self::Drive(DriveKnob::RabiS),
            "drive.rabi_b" => Self::Drive(DriveKnob::RabiB),
            "drive.rabi_t" => Self::Drive(DriveKnob::RabiT),
            "drive.delta1" => Self::Drive(DriveKnob::Delta1),
            "drive.delta2" => Self::Drive(DriveKnob::Delta2),
            "drive.delta3" => Self::Drive(DriveKnob::Delta3),
            "drive.delta4" => Self::Drive(DriveKnob::Delta4),
            "drive.delta5" => Self::Drive(DriveKnob::Delta5),
            "atom.dipole_12" => Self::Dipole12,
            "atom.dipole_34" => Self::Dipole34,
            "atom.dipole_56" => Self::Dipole56,
            "atom.density_cm3" => Self::Density,
            "atom.omega_p" => Self::OmegaP,
            "atom.omega_s" => Self::OmegaS,
            "atom.omega_t" => Self::OmegaT,
            "geometry.length_m" => Self::Length,
            "geometry.tau_p" => Self::TauP,
            "geometry.tau_s" => Self::TauS,
            "geometry.tau_t" => Self::TauT,
            other => match other.strip_prefix("atom.gamma").and_then(|n| n.parse::<usize>().ok()) {
                Some(n @ 1..=6) => Self::Gamma(n - 1),
                _ => {
                    return Err(Error::InvalidParameter {
                        name: "sweep.axes.parameter",
                        reason: format!("unknown parameter path `{path}`"),
                    })
                }
            },
        };
        Ok(p)
    }

    pub fn set(self, atom: &mut AtomParams, drive: &mut DriveParams, geom: &mut PulseGeometry, v: f64) {
        match self {
            Self::Drive(k) => k.set(drive, v),
            Self::Gamma(i) => atom.gamma[i] = v,
            Self::Dipole12 => atom.dipole_12 = v,
            Self::Dipole34 => atom.dipole_34 = v,
            Self::Dipole56 => atom.dipole_56 = v,
            Self::Density => atom.density_cm3 = v,
            Self::OmegaP => atom.omega_p = v,
            Self::OmegaS => atom.omega_s = v,
            Self::OmegaT => atom.omega_t = v,
            Self::Length => geom.length_m = v,
            Self::TauP => geom.tau_p = v,
            Self::TauS => geom.tau_s = v,
            Self::TauT => geom.tau_t = v,
        }
    }
}

impl RunConfig {
    /// Parses and validates; errors name the offending key.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter { name: "config", reason: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter {
                name: "schema_version",
                reason: format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            });
        }
        self.atom.validate()?;
        self.drive.validate()?;
        self.geometry.validate()?;
        let g = &self.options.fit_grid;
        if !(g.min > 0.0 && g.min < g.max && g.max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "options.fit_grid",
                reason: format!("need 0 < min < max, got [{}, {}]", g.min, g.max),
            });
        }
        if !(self.options.target_phase.is_finite() && self.options.target_phase != 0.0) {
            return Err(Error::InvalidParameter {
                name: "options.target_phase",
                reason: format!("must be finite and nonzero, got {}", self.options.target_phase),
            });
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > MAX_SWEEP_AXES {
            return Err(Error::InvalidParameter {
                name: "sweep.axes",
                reason: format!("need 1 to {MAX_SWEEP_AXES} axes, got {}", self.axes.len()),
            });
        }
        for a in &self.axes {
            ParameterPath::parse(&a.parameter)?;
            if a.count < 2 {
                return Err(Error::InvalidParameter {
                    name: "sweep.axes.count",
                    reason: format!("axis `{}` needs at least 2 points, got {}", a.parameter, a.count),
                });
            }
            if !(a.min.is_finite() && a.max.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "sweep.axes.min",
                    reason: format!("axis `{}` bounds must be finite", a.parameter),
                });
            }
            if a.scale == AxisScale::Log && !(a.min > 0.0 && a.max > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "sweep.axes.scale",
                    reason: format!("log axis `{}` needs positive bounds", a.parameter),
                });
            }
        }
        Ok(())
    }
}
