//! Parameter records for the six-level medium and the quantities derived
//! directly from them.
//!
//! Levels |1>, |3>, |5> are ground sublevels and |2>, |4>, |6> excited
//! sublevels. Five fields drive the ladder:
//!
//! | field    | transition | role          |
//! |----------|------------|---------------|
//! | probe P  | 1 - 2      | weak, pulsed  |
//! | coupling C | 2 - 3    | strong, cw    |
//! | signal S | 3 - 4      | weak, pulsed  |
//! | control B | 4 - 5     | strong, cw    |
//! | trigger T | 5 - 6     | weak, pulsed  |
//!
//! All rates, Rabi frequencies and detunings are angular frequencies in s^-1.
//! The atomic density is carried in cm^-3, the unit used for cold-atom
//! samples, and converted with [`AtomParams::number_density`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub epsilon0: f64,
    pub c: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    epsilon0: 8.854_187_812_8e-12,
    c: 299_792_458.0,
};

/// Dipole matrix element used when a config does not give one: the 87Rb D1
/// line, 2.54e-29 C m. Absolute velocities and lengths scale with its square.
pub const DEFAULT_DIPOLE: f64 = 2.54e-29;

/// 87Rb D1 vacuum wavelength.
pub const RB_D1_WAVELENGTH: f64 = 794.98e-9;

pub fn default_optical_frequency() -> f64 {
    2.0 * std::f64::consts::PI * CONSTANTS.c / RB_D1_WAVELENGTH
}

fn default_dipole() -> f64 {
    DEFAULT_DIPOLE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomParams {
    /// Decay (excited levels) or dephasing (ground levels) rate of |1>..|6>.
    pub gamma: [f64; 6],
    #[serde(default = "default_dipole")]
    pub dipole_12: f64,
    #[serde(default = "default_dipole")]
    pub dipole_34: f64,
    #[serde(default = "default_dipole")]
    pub dipole_56: f64,
    /// Atomic number density in cm^-3.
    pub density_cm3: f64,
    #[serde(default = "default_optical_frequency")]
    pub omega_p: f64,
    #[serde(default = "default_optical_frequency")]
    pub omega_s: f64,
    #[serde(default = "default_optical_frequency")]
    pub omega_t: f64,
}

impl AtomParams {
    /// Number density in m^-3.
    pub fn number_density(&self) -> f64 {
        self.density_cm3 * 1e6
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.gamma.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("rates must be finite and >= 0, got {g}"),
            });
        }
        let positive = [
            ("dipole_12", self.dipole_12),
            ("dipole_34", self.dipole_34),
            ("dipole_56", self.dipole_56),
            ("density_cm3", self.density_cm3),
            ("omega_p", self.omega_p),
            ("omega_s", self.omega_s),
            ("omega_t", self.omega_t),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// Prefactor N |D|^2 / (hbar eps0) shared by all susceptibilities.
    pub(crate) fn linear_prefactor(&self, dipole: f64) -> f64 {
        self.number_density() * dipole * dipole / (CONSTANTS.hbar * CONSTANTS.epsilon0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveParams {
    #[serde(with = "crate::serde_complex")]
    pub rabi_p: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub rabi_c: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub rabi_s: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub rabi_b: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub rabi_t: Complex64,
    /// One-photon detunings delta_1..delta_5.
    pub delta: [f64; 5],
}

impl DriveParams {
    /// Whether every weak-field intensity sits below both control intensities.
    pub fn is_weak_field(&self) -> bool {
        let strong = self.rabi_c.norm_sqr().min(self.rabi_b.norm_sqr());
        [self.rabi_p, self.rabi_s, self.rabi_t]
            .iter()
            .all(|w| w.norm_sqr() < strong)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.rabi_p, self.rabi_c, self.rabi_s, self.rabi_b, self.rabi_t]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
            && self.delta.iter().all(|d| d.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter {
                name: "drive",
                reason: "Rabi frequencies and detunings must be finite".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompositeDetunings {
    pub delta12: f64,
    pub delta13: f64,
    pub delta14: f64,
    pub delta15: f64,
}

pub fn composite_detunings(drive: &DriveParams) -> CompositeDetunings {
    let [d1, d2, d3, d4, d5] = drive.delta;
    let delta12 = d1 - d2;
    let delta13 = delta12 + d3;
    let delta14 = delta13 - d4;
    let delta15 = delta14 + d5;
    CompositeDetunings { delta12, delta13, delta14, delta15 }
}

/// d_n = (detuning of level n) - i Gamma_n / 2 for the five upper rungs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDenominators {
    pub d2: Complex64,
    pub d3: Complex64,
    pub d4: Complex64,
    pub d5: Complex64,
    pub d6: Complex64,
}

impl ComplexDenominators {
    pub fn as_array(&self) -> [Complex64; 5] {
        [self.d2, self.d3, self.d4, self.d5, self.d6]
    }
}

pub fn complex_denominators(drive: &DriveParams, atom: &AtomParams) -> ComplexDenominators {
    let cd = composite_detunings(drive);
    let g = &atom.gamma;
    let d = |detuning: f64, gamma: f64| Complex64::new(detuning, -0.5 * gamma);
    ComplexDenominators {
        d2: d(drive.delta[0], g[1]),
        d3: d(cd.delta12, g[2]),
        d4: d(cd.delta13, g[3]),
        d5: d(cd.delta14, g[4]),
        d6: d(cd.delta15, g[5]),
    }
}
