//! Simulation of a six-level ladder medium under electromagnetically induced
//! transparency: steady-state susceptibilities up to fifth order, slow-light
//! group velocities, conditional cross-phase shifts, the resulting
//! three-qubit polarization phase gate and its three-way entanglement.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod gates;
pub mod model;
pub mod propagation;
pub mod report;
pub mod scenario;
mod serde_complex;
pub mod susceptibility;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{AtomParams, DriveParams};
pub use scenario::PaperScenario;

/// Scientific notation with 15 significant digits, as written to CSV files.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.14e}")
}
