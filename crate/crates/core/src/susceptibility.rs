//! Closed-form linear, third- and fifth-order susceptibilities of the probe,
//! signal and trigger fields, and their assembly into total susceptibilities.
//!
//! With `A = d2 d3 - |C|^2`, `Q = d4 d5 - |B|^2` and
//! `K_n = N |D12|^2 ... / (hbar^n eps0)` carrying the dipoles of every field
//! involved:
//!
//! ```text
//! chi1_P   =  K1 d3 / A
//! chi3_PS  = -K3 d5 / (Q A)
//! chi3_PT  = -K3 d3 d4 / (d6 Q A)
//! chi5_PST =  K5 / (d6 Q A)
//! chi3_SP  =  K3 d5 |C|^2 / (Q |A|^2)
//! chi5_SPT = -K5 [ |C|^2 / (d6 Q |A|^2) + conj(d4) d5 |C|^2 / (conj(d6) |Q|^2 |A|^2) ]
//! chi5_TPS =  K5 |B|^2 |C|^2 / (d6 |Q|^2 |A|^2)
//! ```
//!
//! The probe's linear and third-order terms carry `d3` or `d5` in their
//! numerators, so they vanish at two-photon resonance without ground-state
//! dephasing while the fifth-order terms survive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{complex_denominators, AtomParams, DriveParams, CONSTANTS};

/// Denominators smaller than this (SI magnitude) are treated as exact poles.
pub const POLE_GUARD: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilitySet {
    #[serde(with = "crate::serde_complex")]
    pub chi1_p: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub chi3_ps: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub chi3_pt: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub chi5_pst: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub chi3_sp: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub chi5_spt: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub chi5_tps: Complex64,
}

impl SusceptibilitySet {
    pub const NAMES: [&'static str; 7] =
        ["chi1_p", "chi3_ps", "chi3_pt", "chi5_pst", "chi3_sp", "chi5_spt", "chi5_tps"];

    pub fn as_array(&self) -> [Complex64; 7] {
        [
            self.chi1_p,
            self.chi3_ps,
            self.chi3_pt,
            self.chi5_pst,
            self.chi3_sp,
            self.chi5_spt,
            self.chi5_tps,
        ]
    }
}

/// Field intensities |E|^2 in V^2/m^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldIntensities {
    pub e2_p: f64,
    pub e2_s: f64,
    pub e2_t: f64,
}

impl FieldIntensities {
    pub fn from_rabi(drive: &DriveParams, atom: &AtomParams) -> Self {
        let e2 = |rabi: Complex64, dipole: f64| {
            CONSTANTS.hbar * CONSTANTS.hbar * rabi.norm_sqr() / (dipole * dipole)
        };
        Self {
            e2_p: e2(drive.rabi_p, atom.dipole_12),
            e2_s: e2(drive.rabi_s, atom.dipole_34),
            e2_t: e2(drive.rabi_t, atom.dipole_56),
        }
    }
}

fn guard(which: &'static str, z: Complex64) -> Result<Complex64> {
    if z.norm() < POLE_GUARD {
        Err(Error::EitPole { which, magnitude: z.norm() })
    } else {
        Ok(z)
    }
}

pub fn analytic_susceptibilities(drive: &DriveParams, atom: &AtomParams) -> Result<SusceptibilitySet> {
    let d = complex_denominators(drive, atom);
    let cc = drive.rabi_c.norm_sqr();
    let bb = drive.rabi_b.norm_sqr();
    let a = guard("d2*d3 - |C|^2", d.d2 * d.d3 - cc)?;
    let q = guard("d4*d5 - |B|^2", d.d4 * d.d5 - bb)?;
    let d6 = guard("d6", d.d6)?;

    let (hbar, eps0) = (CONSTANTS.hbar, CONSTANTS.epsilon0);
    let n = atom.number_density();
    let (p2, s2, t2) = (
        atom.dipole_12 * atom.dipole_12,
        atom.dipole_34 * atom.dipole_34,
        atom.dipole_56 * atom.dipole_56,
    );
    let k1 = n * p2 / (hbar * eps0);
    let k3_ps = n * p2 * s2 / (hbar.powi(3) * eps0);
    let k3_pt = n * p2 * t2 / (hbar.powi(3) * eps0);
    let k5 = n * p2 * s2 * t2 / (hbar.powi(5) * eps0);

    let a_abs2 = a.norm_sqr();
    let q_abs2 = q.norm_sqr();

    Ok(SusceptibilitySet {
        chi1_p: k1 * d.d3 / a,
        chi3_ps: -k3_ps * d.d5 / (q * a),
        chi3_pt: -k3_pt * d.d3 * d.d4 / (d6 * q * a),
        chi5_pst: k5 / (d6 * q * a),
        chi3_sp: k3_ps * d.d5 * cc / (q * a_abs2),
        chi5_spt: -k5 * (cc / (d6 * q * a_abs2) + d.d4.conj() * d.d5 * cc / (d6.conj() * q_abs2 * a_abs2)),
        chi5_tps: k5 * bb * cc / (d6 * q_abs2 * a_abs2),
    })
}

/// Total probe, signal and trigger susceptibilities at the given intensities.
pub fn total_susceptibilities(s: &SusceptibilitySet, f: &FieldIntensities) -> (Complex64, Complex64, Complex64) {
    let chi_p = s.chi1_p + s.chi3_ps * f.e2_s + s.chi3_pt * f.e2_t + s.chi5_pst * f.e2_s * f.e2_t;
    let chi_s = s.chi3_sp * f.e2_p + s.chi5_spt * f.e2_p * f.e2_t;
    let chi_t = s.chi5_tps * f.e2_p * f.e2_s;
    (chi_p, chi_s, chi_t)
}

/// Coefficient used for the signal's trigger-induced third-order phase.
///
/// The total signal susceptibility has no term linear in the trigger
/// intensity alone, yet the phase bookkeeping names one. Both readings are
/// available; `Vanishing` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalTriggerCoefficient {
    /// chi3_ST = 0, consistent with the total signal susceptibility.
    #[default]
    Vanishing,
    /// chi3_ST takes the form of chi3_SP with the trigger dipole in place of
    /// the probe dipole.
    MirrorSignalProbe,
}

impl SignalTriggerCoefficient {
    pub fn chi3_st(&self, set: &SusceptibilitySet, atom: &AtomParams) -> Complex64 {
        match self {
            Self::Vanishing => Complex64::new(0.0, 0.0),
            Self::MirrorSignalProbe => {
                let ratio = (atom.dipole_56 / atom.dipole_12).powi(2);
                set.chi3_sp * ratio
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuppressionReport {
    pub d3_abs: f64,
    pub d5_abs: f64,
    /// |chi1_P|
    pub linear: f64,
    /// |chi3_PS| |E_S|^2 + |chi3_PT| |E_T|^2
    pub third: f64,
    /// |chi5_PST| |E_S|^2 |E_T|^2
    pub fifth: f64,
    pub fifth_order_dominant: bool,
}

/// Relative weight of the probe's linear, third- and fifth-order response at
/// the drive's own intensities.
pub fn suppression_report(drive: &DriveParams, atom: &AtomParams) -> Result<SuppressionReport> {
    let d = complex_denominators(drive, atom);
    let s = analytic_susceptibilities(drive, atom)?;
    let f = FieldIntensities::from_rabi(drive, atom);
    let linear = s.chi1_p.norm();
    let third = s.chi3_ps.norm() * f.e2_s + s.chi3_pt.norm() * f.e2_t;
    let fifth = s.chi5_pst.norm() * f.e2_s * f.e2_t;
    Ok(SuppressionReport {
        d3_abs: d.d3.norm(),
        d5_abs: d.d5.norm(),
        linear,
        third,
        fifth,
        fifth_order_dominant: fifth > linear + third,
    })
}
