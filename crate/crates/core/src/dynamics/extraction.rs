//! Order-by-order susceptibilities recovered from the steady state of the
//! amplitude equations, independent of the closed forms in
//! [`crate::susceptibility`].
//!
//! Each total susceptibility is read off a steady-state coherence:
//!
//! - probe:   `chi_P = -N |D12|^2/(hbar eps0) * a2 / P`
//! - signal:  `chi_S = -N |D34|^2/(hbar eps0) * a4 conj(a3) / S`
//! - trigger: `chi_T = -N |D56|^2/(hbar eps0) * a6 conj(a5) / T`
//!
//! and then fitted with a tensor polynomial in the two weak-field intensities
//! it depends on. Intensities are handled as |Rabi|^2 and converted to |E|^2
//! only when the coefficients are returned.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::steady_state;
use crate::error::{Error, Result};
use crate::model::{complex_denominators, AtomParams, DriveParams, CONSTANTS};
use crate::susceptibility::SusceptibilitySet;

/// Polynomial degree per intensity axis.
const DEGREE: usize = 3;
/// Largest acceptable relative RMS fit residual.
const RESIDUAL_LIMIT: f64 = 1e-6;
/// Intensity used for a field that must be present but should not contribute.
const SPECTATOR_FRACTION: f64 = 1e-14;

/// Intensity scalings for the fit, as fractions of a per-axis reference
/// intensity set by the nearest dressed-state pole.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityGrid {
    pub fractions: Vec<f64>,
}

impl IntensityGrid {
    pub fn log_spaced(min: f64, max: f64, count: usize) -> Self {
        let fractions = if count < 2 {
            vec![min; count]
        } else {
            let (lo, hi) = (min.ln(), max.ln());
            (0..count)
                .map(|k| (lo + (hi - lo) * k as f64 / (count - 1) as f64).exp())
                .collect()
        };
        Self { fractions }
    }
}

impl Default for IntensityGrid {
    fn default() -> Self {
        Self::log_spaced(1e-4, 1e-2, 6)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericSusceptibilities {
    pub set: SusceptibilitySet,
    /// Worst relative RMS residual over the three fits.
    pub residual: f64,
}

#[derive(Clone, Copy)]
enum Field {
    Probe,
    Signal,
    Trigger,
}

fn with_intensity(z: Complex64, intensity: f64) -> Complex64 {
    let phase = if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
    phase * intensity.sqrt()
}

/// Reference intensities (|Rabi|^2) for the probe, signal and trigger axes.
fn reference_intensities(drive: &DriveParams, atom: &AtomParams) -> [f64; 3] {
    let d = complex_denominators(drive, atom);
    let cc = drive.rabi_c.norm_sqr();
    let bb = drive.rabi_b.norm_sqr();
    let fallback = cc.max(bb).max(d.d6.norm_sqr()).max(1.0);

    // trigger: 1/(d4 (d5 - t/d6) - B) has its pole at t = d6 (d5 - B/d4)
    let r_t = if d.d4.norm() > 0.0 {
        (d.d6 * (d.d5 - bb / d.d4)).norm()
    } else {
        fallback
    };
    let r_t = if r_t > 0.0 && r_t.is_finite() { r_t } else { fallback };

    // signal: the probe denominator vanishes at s = D4eff (d3 - C/d2), with
    // D4eff evaluated at the largest trigger intensity of the grid
    let t_max = 1e-2 * r_t;
    let d5_eff = d.d5 - t_max / d.d6;
    let d4_eff = d.d4 - bb / d5_eff;
    let r_s = if d.d2.norm() > 0.0 { (d4_eff * (d.d3 - cc / d.d2)).norm() } else { fallback };
    let r_s = if r_s > 0.0 && r_s.is_finite() { r_s } else { fallback };

    // the probe enters the coherences only through |a1 P|^2, linearly
    let r_p = cc.max(1.0);
    [r_p, r_s, r_t]
}

fn coherence(drive: &DriveParams, atom: &AtomParams, field: Field) -> Result<Complex64> {
    let a = steady_state(drive, atom)?.0;
    let value = match field {
        Field::Probe => -atom.linear_prefactor(atom.dipole_12) * a[1] / drive.rabi_p,
        Field::Signal => -atom.linear_prefactor(atom.dipole_34) * a[3] * a[2].conj() / drive.rabi_s,
        Field::Trigger => -atom.linear_prefactor(atom.dipole_56) * a[5] * a[4].conj() / drive.rabi_t,
    };
    Ok(value)
}

struct Fit {
    /// coeffs[i][j] multiplies x^i y^j, in |Rabi|^2 units.
    coeffs: [[Complex64; DEGREE + 1]; DEGREE + 1],
    residual: f64,
}

/// Least-squares tensor polynomial fit of `f(x, y)` on `xs` x `ys`.
fn fit_surface<F>(xs: &[f64], ys: &[f64], mut f: F) -> Result<Fit>
where
    F: FnMut(f64, f64) -> Result<Complex64>,
{
    let n = DEGREE + 1;
    let x_scale = xs.iter().cloned().fold(0.0, f64::max);
    let y_scale = ys.iter().cloned().fold(0.0, f64::max);
    let norm = |v: f64, scale: f64| if scale > 0.0 { v / scale } else { 0.0 };
    let rows = xs.len() * ys.len();
    let mut design = DMatrix::<f64>::zeros(rows, n * n);
    let mut values = DVector::<Complex64>::zeros(rows);
    for (ix, &x) in xs.iter().enumerate() {
        for (iy, &y) in ys.iter().enumerate() {
            let r = ix * ys.len() + iy;
            let (u, v) = (norm(x, x_scale), norm(y, y_scale));
            for i in 0..n {
                for j in 0..n {
                    design[(r, i * n + j)] = u.powi(i as i32) * v.powi(j as i32);
                }
            }
            values[r] = f(x, y)?;
        }
    }

    let svd = design.clone().svd(true, true);
    let re = svd.solve(&values.map(|z| z.re), 1e-13).map_err(|_| Error::SingularSystem)?;
    let im = svd.solve(&values.map(|z| z.im), 1e-13).map_err(|_| Error::SingularSystem)?;
    let coef = DVector::from_iterator(n * n, re.iter().zip(im.iter()).map(|(r, i)| Complex64::new(*r, *i)));

    let design_c = design.map(|v| Complex64::new(v, 0.0));
    let resid = &design_c * &coef - &values;
    let value_norm = values.norm();
    let residual = if value_norm > 0.0 { resid.norm() / value_norm } else { 0.0 };

    let mut coeffs = [[Complex64::new(0.0, 0.0); DEGREE + 1]; DEGREE + 1];
    for i in 0..n {
        for j in 0..n {
            let sx = if x_scale > 0.0 { x_scale.powi(i as i32) } else { 1.0 };
            let sy = if y_scale > 0.0 { y_scale.powi(j as i32) } else { 1.0 };
            let c = coef[i * n + j] / (sx * sy);
            coeffs[i][j] = if c.re.is_finite() && c.im.is_finite() { c } else { Complex64::new(0.0, 0.0) };
        }
    }
    Ok(Fit { coeffs, residual })
}

/// Susceptibility coefficients extracted from steady states over an
/// intensity grid.
pub fn numeric_susceptibilities(
    drive: &DriveParams,
    atom: &AtomParams,
    grid: &IntensityGrid,
) -> Result<NumericSusceptibilities> {
    if grid.fractions.len() < 4 {
        return Err(Error::GridTooSmall { needed: 4, got: grid.fractions.len() });
    }
    if grid.fractions.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "intensity_grid",
            reason: "fractions must be finite and >= 0".into(),
        });
    }
    let [r_p, r_s, r_t] = reference_intensities(drive, atom);
    let axis = |r: f64| grid.fractions.iter().map(|f| f * r).collect::<Vec<_>>();
    let (ps, ss, ts) = (axis(r_p), axis(r_s), axis(r_t));
    let spectator = |r: f64| SPECTATOR_FRACTION * r;

    let probe_level = if drive.rabi_p.norm() > 0.0 { drive.rabi_p.norm_sqr() } else { spectator(r_p) };
    let probe = fit_surface(&ss, &ts, |s, t| {
        let mut d = *drive;
        d.rabi_p = with_intensity(drive.rabi_p, probe_level);
        d.rabi_s = with_intensity(drive.rabi_s, s);
        d.rabi_t = with_intensity(drive.rabi_t, t);
        coherence(&d, atom, Field::Probe)
    })?;
    let signal = fit_surface(&ps, &ts, |p, t| {
        let mut d = *drive;
        d.rabi_p = with_intensity(drive.rabi_p, p);
        d.rabi_s = with_intensity(drive.rabi_s, spectator(r_s));
        d.rabi_t = with_intensity(drive.rabi_t, t);
        coherence(&d, atom, Field::Signal)
    })?;
    let trigger = fit_surface(&ps, &ss, |p, s| {
        let mut d = *drive;
        d.rabi_p = with_intensity(drive.rabi_p, p);
        d.rabi_s = with_intensity(drive.rabi_s, s);
        d.rabi_t = with_intensity(drive.rabi_t, spectator(r_t));
        coherence(&d, atom, Field::Trigger)
    })?;

    let residual = probe.residual.max(signal.residual).max(trigger.residual);
    if residual > RESIDUAL_LIMIT {
        return Err(Error::IllConditionedFit { residual, limit: RESIDUAL_LIMIT });
    }

    // |E_k|^2 = hbar^2 |Rabi_k|^2 / |D_k|^2
    let hb2 = CONSTANTS.hbar * CONSTANTS.hbar;
    let per_e2 = |dipole: f64| dipole * dipole / hb2;
    let (e_p, e_s, e_t) = (per_e2(atom.dipole_12), per_e2(atom.dipole_34), per_e2(atom.dipole_56));

    let set = SusceptibilitySet {
        chi1_p: probe.coeffs[0][0],
        chi3_ps: probe.coeffs[1][0] * e_s,
        chi3_pt: probe.coeffs[0][1] * e_t,
        chi5_pst: probe.coeffs[1][1] * e_s * e_t,
        chi3_sp: signal.coeffs[1][0] * e_p,
        chi5_spt: signal.coeffs[1][1] * e_p * e_t,
        chi5_tps: trigger.coeffs[1][1] * e_p * e_s,
    };
    Ok(NumericSusceptibilities { set, residual })
}
