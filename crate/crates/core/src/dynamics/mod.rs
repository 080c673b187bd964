//! Amplitude equations of the six-level ladder: time integration and the
//! undepleted-ground-state steady state.
//!
//! With `a_n` the probability amplitude of level `|n>` and `d_n` the complex
//! denominators of [`crate::model::complex_denominators`], the equations read
//!
//! ```text
//! a1' = -G1/2 a1            - i P* a2
//! a2' = -i d2 a2 - i P a1   - i C  a3
//! a3' = -i d3 a3 - i C* a2  - i S* a4
//! a4' = -i d4 a4 - i S a3   - i B  a5
//! a5' = -i d5 a5 - i B* a4  - i T* a6
//! a6' = -i d6 a6 - i T a5
//! ```

mod extraction;
pub mod integrator;

pub use extraction::{numeric_susceptibilities, IntensityGrid, NumericSusceptibilities};

use nalgebra::{Matrix5, Vector5};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{complex_denominators, composite_detunings, AtomParams, DriveParams};
use integrator::StepControl;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeState(#[serde(with = "amps_serde")] pub [Complex64; 6]);

mod amps_serde {
    use num_complex::Complex64;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(a: &[Complex64; 6], s: S) -> Result<S::Ok, S::Error> {
        crate::serde_complex::vec::serialize(a, s)
    }
}

impl AmplitudeState {
    pub fn ground() -> Self {
        let mut a = [Complex64::new(0.0, 0.0); 6];
        a[0] = Complex64::new(1.0, 0.0);
        Self(a)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Euclidean distance between two amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Time derivative of the six amplitudes.
pub fn rhs(s: &AmplitudeState, drive: &DriveParams, atom: &AtomParams) -> AmplitudeState {
    let a = &s.0;
    let cd = composite_detunings(drive);
    let g = &atom.gamma;
    let (p, c, sg, b, t) = (drive.rabi_p, drive.rabi_c, drive.rabi_s, drive.rabi_b, drive.rabi_t);
    let decay = |gamma: f64, detuning: f64| Complex64::new(0.5 * gamma, detuning);
    AmplitudeState([
        -0.5 * g[0] * a[0] - I * p.conj() * a[1],
        -decay(g[1], drive.delta[0]) * a[1] - I * p * a[0] - I * c * a[2],
        -decay(g[2], cd.delta12) * a[2] - I * c.conj() * a[1] - I * sg.conj() * a[3],
        -decay(g[3], cd.delta13) * a[3] - I * sg * a[2] - I * b * a[4],
        -decay(g[4], cd.delta14) * a[4] - I * b.conj() * a[3] - I * t.conj() * a[5],
        -decay(g[5], cd.delta15) * a[5] - I * t * a[4],
    ])
}

/// Treatment of the ground-state amplitude during integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundState {
    /// Integrate the a1 equation as written, including its decay and depletion.
    #[default]
    Free,
    /// Hold a1 fixed (undepleted ground state), as in the steady-state solution.
    Pinned,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub dt_max: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub stride: usize,
    pub ground: GroundState,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt_max: None, rtol: 1e-10, atol: 1e-13, stride: 1, ground: GroundState::Free }
    }
}

/// `0.01 / max(|C|, |B|, Gamma_max, |delta|_max)`, the cap used when no
/// explicit step bound is given.
pub fn default_dt_max(drive: &DriveParams, atom: &AtomParams) -> f64 {
    let cd = composite_detunings(drive);
    let fastest = [
        drive.rabi_c.norm(),
        drive.rabi_b.norm(),
        drive.rabi_p.norm(),
        drive.rabi_s.norm(),
        drive.rabi_t.norm(),
        drive.delta[0].abs(),
        cd.delta12.abs(),
        cd.delta13.abs(),
        cd.delta14.abs(),
        cd.delta15.abs(),
    ]
    .into_iter()
    .chain(atom.gamma.iter().copied())
    .fold(0.0, f64::max);
    if fastest > 0.0 {
        0.01 / fastest
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<AmplitudeState>,
}

impl Trajectory {
    pub fn final_state(&self) -> &AmplitudeState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    /// CSV with columns `t, re_a1, im_a1, ..., re_a6, im_a6`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        for n in 1..=6 {
            header.push(format!("re_a{n}"));
            header.push(format!("im_a{n}"));
        }
        wtr.write_record(&header)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = vec![crate::fmt_sci(*t)];
            for z in &s.0 {
                row.push(crate::fmt_sci(z.re));
                row.push(crate::fmt_sci(z.im));
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn evolve(
    s0: &AmplitudeState,
    drive: &DriveParams,
    atom: &AtomParams,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter { name: "t_end", reason: format!("must be > 0, got {t_end}") });
    }
    let dt_max = opts.dt_max.unwrap_or_else(|| default_dt_max(drive, atom)).min(t_end);
    if !(dt_max > 0.0) {
        return Err(Error::InvalidParameter { name: "dt_max", reason: format!("must be > 0, got {dt_max}") });
    }
    let ctrl = StepControl { rtol: opts.rtol, atol: opts.atol, dt_max, stride: opts.stride };
    let pinned = opts.ground == GroundState::Pinned;
    let (times, states) = integrator::integrate(
        |_, y| {
            let mut dy = rhs(&AmplitudeState(*y), drive, atom).0;
            if pinned {
                dy[0] = Complex64::new(0.0, 0.0);
            }
            dy
        },
        0.0,
        s0.0,
        t_end,
        &ctrl,
    )?;
    Ok(Trajectory { times, states: states.into_iter().map(AmplitudeState).collect() })
}

/// Steady state with the ground amplitude pinned to one.
///
/// Setting a2'..a6' to zero with a1 = 1 gives a tridiagonal 5x5 system in the
/// complex denominators. Gamma_1 plays no role here.
pub fn steady_state(drive: &DriveParams, atom: &AtomParams) -> Result<AmplitudeState> {
    if !drive.is_weak_field() {
        log::warn!("steady state requested outside the weak-field regime");
    }
    let d = complex_denominators(drive, atom);
    let zero = Complex64::new(0.0, 0.0);
    let (c, s, b, t) = (drive.rabi_c, drive.rabi_s, drive.rabi_b, drive.rabi_t);
    #[rustfmt::skip]
    let m = Matrix5::new(
        d.d2,     c,        zero,     zero,     zero,
        c.conj(), d.d3,     s.conj(), zero,     zero,
        zero,     s,        d.d4,     b,        zero,
        zero,     zero,     b.conj(), d.d5,     t.conj(),
        zero,     zero,     zero,     t,        d.d6,
    );
    let rhs = Vector5::new(-drive.rabi_p, zero, zero, zero, zero);
    let x = m.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(AmplitudeState([Complex64::new(1.0, 0.0), x[0], x[1], x[2], x[3], x[4]]))
}
