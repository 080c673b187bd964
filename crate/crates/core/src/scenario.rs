//! The ultracold 87Rb parameter set used throughout the examples and the
//! `paper` subcommand.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{default_optical_frequency, AtomParams, DriveParams, DEFAULT_DIPOLE};
use crate::propagation::PulseGeometry;

/// Shipped copy of [`PaperScenario::frozen`], kept byte-identical to its
/// pretty-printed serialization.
pub const PAPER_PARAMS_JSON: &str = include_str!("../data/paper_params.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperScenario {
    pub atom: AtomParams,
    pub drive: DriveParams,
    pub geometry: PulseGeometry,
}

impl PaperScenario {
    pub fn frozen() -> Self {
        let w = default_optical_frequency();
        let re = |x: f64| Complex64::new(x, 0.0);
        Self {
            atom: AtomParams {
                gamma: [0.0, 0.5e7, 0.0, 0.5e7, 0.0, 0.5e7],
                dipole_12: DEFAULT_DIPOLE,
                dipole_34: DEFAULT_DIPOLE,
                dipole_56: DEFAULT_DIPOLE,
                density_cm3: 1e12,
                omega_p: w,
                omega_s: w,
                omega_t: w,
            },
            drive: DriveParams {
                rabi_p: re(2.4e7),
                rabi_c: re(8.0e7),
                rabi_s: re(2.5e7),
                rabi_b: re(5.2e7),
                rabi_t: re(1.4e7),
                delta: [40.0e7, 40.0e7, -40.0e7, -40.0e7, 2.5e7],
            },
            geometry: PulseGeometry { length_m: 0.095e-2, tau_p: 1e-6, tau_s: 1e-6, tau_t: 1e-6 },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }
}
