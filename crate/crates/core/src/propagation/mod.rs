//! Slow-light group velocities, pulse-overlap factors and the conditional
//! phase shifts picked up by the probe, signal and trigger pulses.

mod matching;

pub use matching::{match_velocities, DriveKnob, FreeParameter, MatchOptions, MatchResult};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{composite_detunings, AtomParams, DriveParams, CONSTANTS};
use crate::susceptibility::{analytic_susceptibilities, SignalTriggerCoefficient, SusceptibilitySet};

/// A group velocity, or the marker for a vanishing denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Velocity {
    Finite(f64),
    Unbounded,
}

impl Velocity {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Velocity::Finite(v) => Some(*v),
            Velocity::Unbounded => None,
        }
    }

    fn from_ratio(num: f64, den: f64) -> Self {
        let v = num / den;
        if den == 0.0 || !v.is_finite() {
            Velocity::Unbounded
        } else {
            Velocity::Finite(v)
        }
    }
}

impl Serialize for Velocity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Velocity::Finite(v) => s.serialize_f64(*v),
            Velocity::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupVelocities {
    pub vg_p: Velocity,
    pub vg_s: Velocity,
    pub vg_t: Velocity,
}

impl GroupVelocities {
    pub fn finite(&self) -> Result<[f64; 3]> {
        let get = |v: Velocity, field| v.finite().ok_or(Error::UnboundedVelocity { field });
        Ok([get(self.vg_p, "probe")?, get(self.vg_s, "signal")?, get(self.vg_t, "trigger")?])
    }

    /// `max_ij |vg_i - vg_j| / vg_i`; infinite when any velocity is unbounded
    /// or non-positive.
    pub fn mismatch(&self) -> f64 {
        match self.finite() {
            Ok(v) if v.iter().all(|x| *x > 0.0) => {
                let max = v.iter().cloned().fold(f64::MIN, f64::max);
                let min = v.iter().cloned().fold(f64::MAX, f64::min);
                (max - min) / min
            }
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaFactors {
    pub beta1: f64,
    /// s^2
    pub beta2: f64,
    /// s^2
    pub beta: f64,
}

/// Common excited-state width used by the velocity formulas: the mean of
/// Gamma_2, Gamma_4 and Gamma_6.
fn common_width(atom: &AtomParams) -> f64 {
    (atom.gamma[1] + atom.gamma[3] + atom.gamma[5]) / 3.0
}

/// Conditions the closed-form velocities rely on that the parameters break.
pub fn velocity_assumption_warnings(drive: &DriveParams, atom: &AtomParams) -> Vec<String> {
    let mut out = Vec::new();
    let [g2, g4, g6] = [atom.gamma[1], atom.gamma[3], atom.gamma[5]];
    if g2 != g4 || g4 != g6 {
        out.push(format!(
            "excited-state widths differ ({g2:e}, {g4:e}, {g6:e}); using their mean {:e}",
            common_width(atom)
        ));
    }
    let cd = composite_detunings(drive);
    if cd.delta12 != 0.0 || cd.delta14 != 0.0 {
        out.push(format!(
            "velocities assume delta12 = delta14 = 0 (got {:e}, {:e})",
            cd.delta12, cd.delta14
        ));
    }
    out
}

pub fn beta_factors(drive: &DriveParams, atom: &AtomParams) -> BetaFactors {
    let g = common_width(atom);
    let q = g * g / 4.0;
    let [d1, _, d3, _, d5] = drive.delta;
    let cc = drive.rabi_c.norm_sqr();
    let bb = drive.rabi_b.norm_sqr();
    let w = d5 * d5 + q;
    let beta1 = (d3 * d5 + q) / w;
    let beta2 = ((d3 * d5 + q) * w / bb + (d1 * d5 + q) * w / cc - (d5 * d5 - q)) / (w * w);
    let beta = (d5 * d5 - q) / (w * w);
    BetaFactors { beta1, beta2, beta }
}

pub fn group_velocities(drive: &DriveParams, atom: &AtomParams) -> GroupVelocities {
    for w in velocity_assumption_warnings(drive, atom) {
        log::warn!("{w}");
    }
    let b = beta_factors(drive, atom);
    let (hbar, eps0, c) = (CONSTANTS.hbar, CONSTANTS.epsilon0, CONSTANTS.c);
    let n = atom.number_density();
    let cc = drive.rabi_c.norm_sqr();
    let bb = drive.rabi_b.norm_sqr();
    let (p, s, t) = (drive.rabi_p.norm_sqr(), drive.rabi_s.norm_sqr(), drive.rabi_t.norm_sqr());
    let num = 2.0 * hbar * eps0 * c * cc * bb;
    let scale = |dipole: f64, omega: f64| n * dipole * dipole * omega;

    GroupVelocities {
        vg_p: Velocity::from_ratio(
            num,
            scale(atom.dipole_12, atom.omega_p) * (bb + s + t * b.beta1 - s * t * b.beta2),
        ),
        vg_s: Velocity::from_ratio(num, scale(atom.dipole_34, atom.omega_s) * p * (1.0 + t * b.beta)),
        vg_t: Velocity::from_ratio(num, scale(atom.dipole_56, atom.omega_t) * p * s * b.beta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseGeometry {
    pub length_m: f64,
    pub tau_p: f64,
    pub tau_s: f64,
    pub tau_t: f64,
}

impl PulseGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau_p", self.tau_p), ("tau_s", self.tau_s), ("tau_t", self.tau_t)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("must be > 0, got {v}") });
            }
        }
        if !(self.length_m >= 0.0) || !self.length_m.is_finite() {
            return Err(Error::InvalidParameter {
                name: "length_m",
                reason: format!("must be >= 0, got {}", self.length_m),
            });
        }
        Ok(())
    }

    pub fn with_length(&self, length_m: f64) -> Self {
        Self { length_m, ..*self }
    }
}

/// Walk-off parameters; `xy` belongs to the shift of field x induced by y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiFactors {
    pub ps: f64,
    pub pt: f64,
    pub sp: f64,
    pub st: f64,
    pub pst: f64,
    pub spt: f64,
    pub tps: f64,
}

pub fn xi_factors(g: &GroupVelocities, p: &PulseGeometry) -> Result<XiFactors> {
    let [vp, vs, vt] = g.finite()?;
    let l = p.length_m;
    let pair = |vi: f64, vj: f64, tau_j: f64| (2f64.sqrt() * l * (1.0 - vi / vj) / (tau_j * vi)).abs();
    let triple = |vi: f64, vj: f64, tau_j: f64, vk: f64, tau_k: f64| {
        let a = (1.0 - vi / vj) / (tau_j * vi);
        let b = (1.0 - vi / vk) / (tau_k * vi);
        2f64.sqrt() * l * (a * a + b * b).sqrt()
    };
    Ok(XiFactors {
        ps: pair(vp, vs, p.tau_s),
        pt: pair(vp, vt, p.tau_t),
        sp: pair(vs, vp, p.tau_p),
        st: pair(vs, vt, p.tau_t),
        pst: triple(vp, vs, p.tau_s, vt, p.tau_t),
        spt: triple(vs, vp, p.tau_p, vt, p.tau_t),
        tps: triple(vt, vp, p.tau_p, vs, p.tau_s),
    })
}

/// `erf(xi) / xi`, continued to `2/sqrt(pi)` at zero.
pub fn erf_overlap(xi: f64) -> f64 {
    let xi = xi.abs();
    if xi < 1e-4 {
        let x2 = xi * xi;
        2.0 / PI.sqrt() * (1.0 - x2 / 3.0 + x2 * x2 / 10.0 - x2 * x2 * x2 / 42.0)
    } else {
        statrs::function::erf::erf(xi) / xi
    }
}

/// Phase picked up by one field in one polarization row, split by origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseParts {
    pub vacuum: f64,
    pub linear: f64,
    pub third: f64,
    pub fifth: f64,
}

impl PhaseParts {
    pub fn total(&self) -> f64 {
        self.vacuum + self.linear + self.third + self.fifth
    }

    pub fn nonlinear(&self) -> f64 {
        self.third + self.fifth
    }
}

/// One polarization combination: bit 1 is sigma+, bit 0 is sigma-.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    /// Basis index `4 P + 2 S + T`.
    pub index: usize,
    pub probe: PhaseParts,
    pub signal: PhaseParts,
    pub trigger: PhaseParts,
}

impl PhaseRow {
    pub fn total(&self) -> f64 {
        self.probe.total() + self.signal.total() + self.trigger.total()
    }

    pub fn nonlinear(&self) -> f64 {
        self.probe.nonlinear() + self.signal.nonlinear() + self.trigger.nonlinear()
    }
}

/// The individual cross-phase shifts; `xy` is the shift of field x caused by
/// the field(s) y.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CrossPhases {
    pub ps: f64,
    pub pt: f64,
    pub pst: f64,
    pub sp: f64,
    pub st: f64,
    pub spt: f64,
    pub tps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub length_m: f64,
    pub rows: Vec<PhaseRow>,
    pub shifts: CrossPhases,
}

impl PhaseTable {
    /// Rows sorted by basis index, or an error unless exactly 0..8 are present.
    pub fn ordered_rows(&self) -> Result<[PhaseRow; 8]> {
        let mut slots: [Option<PhaseRow>; 8] = [None; 8];
        for row in &self.rows {
            let slot = slots
                .get_mut(row.index)
                .ok_or_else(|| Error::IncompleteTable(format!("row index {} out of range", row.index)))?;
            if slot.replace(*row).is_some() {
                return Err(Error::IncompleteTable(format!("duplicate row {}", row.index)));
            }
        }
        let mut out = [PhaseRow { index: 0, probe: PhaseParts::default(), signal: PhaseParts::default(), trigger: PhaseParts::default() }; 8];
        for (k, slot) in slots.iter().enumerate() {
            out[k] = slot.ok_or_else(|| Error::IncompleteTable(format!("missing row {k}")))?;
        }
        Ok(out)
    }

    /// Nonlinear phase accumulated by all three fields when every pulse is
    /// sigma+.
    pub fn total_nonlinear_phase(&self) -> Result<f64> {
        Ok(self.ordered_rows()?[7].nonlinear())
    }

    /// Genuine three-body phase: the alternating sum of row phases over the
    /// cube, equal to the phase of |111> left after removing all one- and
    /// two-body phases.
    pub fn conditional_phase(&self) -> Result<f64> {
        let rows = self.ordered_rows()?;
        Ok(rows
            .iter()
            .map(|r| {
                let ones = r.index.count_ones();
                if ones % 2 == 1 { r.total() } else { -r.total() }
            })
            .sum())
    }
}

/// Quantities that set the phase shifts, before the length is chosen.
struct PhaseInputs {
    chi: SusceptibilitySet,
    chi3_st: Complex64,
    velocities: GroupVelocities,
}

fn phase_inputs(drive: &DriveParams, atom: &AtomParams, policy: SignalTriggerCoefficient) -> Result<PhaseInputs> {
    let chi = analytic_susceptibilities(drive, atom)?;
    let chi3_st = policy.chi3_st(&chi, atom);
    Ok(PhaseInputs { chi, chi3_st, velocities: group_velocities(drive, atom) })
}

fn assemble(drive: &DriveParams, atom: &AtomParams, geom: &PulseGeometry, inp: &PhaseInputs) -> Result<PhaseTable> {
    let l = geom.length_m;
    let xi = xi_factors(&inp.velocities, geom)?;
    let c = CONSTANTS.c;
    let (kp, ks, kt) = (atom.omega_p / c, atom.omega_s / c, atom.omega_t / c);
    let hb2 = CONSTANTS.hbar * CONSTANTS.hbar;
    // |E|^2 per field, written as hbar^2 |Rabi|^2 / |D|^2
    let e2p = hb2 * drive.rabi_p.norm_sqr() / atom.dipole_12.powi(2);
    let e2s = hb2 * drive.rabi_s.norm_sqr() / atom.dipole_34.powi(2);
    let e2t = hb2 * drive.rabi_t.norm_sqr() / atom.dipole_56.powi(2);
    let overlap = PI.powf(1.5) / 4.0;
    let shift = |k: f64, intensity: f64, chi: Complex64, xi: f64| k * l * overlap * intensity * chi.re * erf_overlap(xi);

    let chi = &inp.chi;
    let shifts = CrossPhases {
        ps: shift(kp, e2s, chi.chi3_ps, xi.ps),
        pt: shift(kp, e2t, chi.chi3_pt, xi.pt),
        pst: shift(kp, e2s * e2t, chi.chi5_pst, xi.pst),
        sp: shift(ks, e2p, chi.chi3_sp, xi.sp),
        st: shift(ks, e2t, inp.chi3_st, xi.st),
        spt: shift(ks, e2p * e2t, chi.chi5_spt, xi.spt),
        tps: shift(kt, e2p * e2s, chi.chi5_tps, xi.tps),
    };

    let vacuum = |k: f64| PhaseParts { vacuum: k * l, ..Default::default() };
    let linear_p = 2.0 * PI * kp * l * chi.chi1_p.re;
    let rows = (0..8)
        .map(|index| {
            let (p_on, s_on, t_on) = (index & 4 != 0, index & 2 != 0, index & 1 != 0);
            let mut probe = vacuum(kp);
            let mut signal = vacuum(ks);
            let mut trigger = vacuum(kt);
            if p_on {
                probe.linear = linear_p;
                if s_on {
                    probe.third = shifts.ps;
                    signal.third = shifts.sp;
                    if t_on {
                        probe.third += shifts.pt;
                        probe.fifth = shifts.pst;
                        signal.third += shifts.st;
                        signal.fifth = shifts.spt;
                        trigger.fifth = shifts.tps;
                    }
                }
            }
            PhaseRow { index, probe, signal, trigger }
        })
        .collect();
    Ok(PhaseTable { length_m: l, rows, shifts })
}

pub fn phase_table(
    drive: &DriveParams,
    atom: &AtomParams,
    geom: &PulseGeometry,
    policy: SignalTriggerCoefficient,
) -> Result<PhaseTable> {
    geom.validate()?;
    let inputs = phase_inputs(drive, atom, policy)?;
    assemble(drive, atom, geom, &inputs)
}

/// Medium length at which the total nonlinear phase reaches `target`
/// (radians, compared in magnitude).
pub fn length_for_phase(
    drive: &DriveParams,
    atom: &AtomParams,
    geom: &PulseGeometry,
    policy: SignalTriggerCoefficient,
    target: f64,
) -> Result<f64> {
    geom.validate()?;
    let inputs = phase_inputs(drive, atom, policy)?;
    let phase_at = |l: f64| -> Result<f64> {
        assemble(drive, atom, &geom.with_length(l), &inputs)?.total_nonlinear_phase().map(f64::abs)
    };
    let target = target.abs();
    let mut lo = 0.0;
    let mut hi = 1e-6;
    let mut reached = phase_at(hi)?;
    while reached < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::PhaseUnreachable { target, reached });
        }
        reached = phase_at(hi)?;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phase_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::PaperScenario;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lambda_limit_velocity() {
        let mut sc = PaperScenario::frozen();
        sc.drive.rabi_s = c(0.0);
        sc.drive.rabi_t = c(0.0);
        let v = group_velocities(&sc.drive, &sc.atom).vg_p.finite().unwrap();
        let a = &sc.atom;
        let expected = 2.0 * CONSTANTS.hbar * CONSTANTS.epsilon0 * CONSTANTS.c * sc.drive.rabi_c.norm_sqr()
            / (a.number_density() * a.dipole_12.powi(2) * a.omega_p);
        assert!((v - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn paper_velocities_are_slow_and_ordered() {
        let sc = PaperScenario::frozen();
        let [vp, vs, vt] = group_velocities(&sc.drive, &sc.atom).finite().unwrap();
        assert!(vp < vs && vs < vt);
        for (v, quoted) in [(vp, 5.5e3), (vs, 6.0e3), (vt, 8.1e3)] {
            assert!(v / quoted < 3.0 && quoted / v < 3.0, "{v}");
        }
        // trigger: 2 hbar eps0 c |C|^2 |B|^2 / (N D^2 w |P|^2 |S|^2 beta), evaluated by hand
        assert!((vt - 11_338.0).abs() < 1.0, "{vt}");
        assert!(vp > 1e3 && vs < 1e4);
    }

    #[test]
    fn velocities_scale_inversely_with_density() {
        let sc = PaperScenario::frozen();
        let mut dense = sc.atom;
        dense.density_cm3 *= 2.0;
        let a = group_velocities(&sc.drive, &sc.atom).finite().unwrap();
        let b = group_velocities(&sc.drive, &dense).finite().unwrap();
        for (x, y) in a.iter().zip(b) {
            assert!((x / y - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_probe_makes_signal_and_trigger_unbounded() {
        let mut sc = PaperScenario::frozen();
        sc.drive.rabi_p = c(0.0);
        let g = group_velocities(&sc.drive, &sc.atom);
        assert_eq!(g.vg_s, Velocity::Unbounded);
        assert_eq!(g.vg_t, Velocity::Unbounded);
        assert!(g.mismatch().is_infinite());
        assert!(matches!(xi_factors(&g, &sc.geometry), Err(Error::UnboundedVelocity { field: "signal" })));
    }

    #[test]
    fn beta_limits() {
        let mut sc = PaperScenario::frozen();
        sc.atom.gamma = [0.0; 6];
        let b = beta_factors(&sc.drive, &sc.atom);
        assert!((b.beta - 1.0 / 2.5e7f64.powi(2)).abs() < 1e-15 * b.beta);

        let mut far = PaperScenario::frozen();
        far.drive.delta[4] = 1e15;
        let b = beta_factors(&far.drive, &far.atom);
        assert!(b.beta1.abs() < 1e-6);
        assert!(b.beta.abs() < 1e-29);
    }

    #[test]
    fn beta1_at_paper_parameters() {
        // (-40e7 * 2.5e7 + 0.25e7^2) / (2.5e7^2 + 0.25e7^2) by hand
        let sc = PaperScenario::frozen();
        let b = beta_factors(&sc.drive, &sc.atom);
        assert!((b.beta1 - (-9.99375e15 / 6.3125e14)).abs() < 1e-12);
        assert!((b.beta1 + 15.8317).abs() < 1e-4);
    }

    #[test]
    fn warnings_for_broken_assumptions() {
        let sc = PaperScenario::frozen();
        assert!(velocity_assumption_warnings(&sc.drive, &sc.atom).is_empty());
        let mut off = sc;
        off.atom.gamma[3] = 1e6;
        off.drive.delta[1] = 0.0;
        assert_eq!(velocity_assumption_warnings(&off.drive, &off.atom).len(), 2);
    }

    #[test]
    fn equal_velocities_give_zero_xi() {
        let g = GroupVelocities { vg_p: Velocity::Finite(5e3), vg_s: Velocity::Finite(5e3), vg_t: Velocity::Finite(5e3) };
        let geom = PulseGeometry { length_m: 1e-3, tau_p: 1e-6, tau_s: 1e-6, tau_t: 1e-6 };
        let xi = xi_factors(&g, &geom).unwrap();
        assert_eq!([xi.ps, xi.pt, xi.sp, xi.st, xi.pst, xi.spt, xi.tps], [0.0; 7]);

        let g = GroupVelocities { vg_t: Velocity::Finite(8e3), ..g };
        let xi = xi_factors(&g, &geom).unwrap();
        assert_eq!(xi.ps, 0.0);
        assert!(xi.pt > 0.0);
    }

    #[test]
    fn paper_walk_off_is_small() {
        let g = GroupVelocities {
            vg_p: Velocity::Finite(5.5e3),
            vg_s: Velocity::Finite(6.0e3),
            vg_t: Velocity::Finite(8.1e3),
        };
        let geom = PulseGeometry { length_m: 0.095e-2, tau_p: 1e-6, tau_s: 1e-6, tau_t: 1e-6 };
        let xi = xi_factors(&g, &geom).unwrap();
        let max = 2.0 / PI.sqrt();
        for x in [xi.ps, xi.pt, xi.sp, xi.st, xi.pst, xi.spt, xi.tps] {
            assert!(x < 0.2, "{xi:?}");
            assert!(erf_overlap(x) > 0.98 * max);
        }
    }

    #[test]
    fn erf_overlap_values() {
        assert_eq!(erf_overlap(0.0), 2.0 / PI.sqrt());
        assert!((erf_overlap(1.0) - 0.8427007929).abs() < 1e-10);
        assert!((erf_overlap(1e-8) - 2.0 / PI.sqrt()).abs() < 1e-15);
        assert!(erf_overlap(1e6) > 0.0 && erf_overlap(1e6) < 1e-5);
    }

    #[test]
    fn erf_overlap_is_continuous_across_series_switch() {
        let below = erf_overlap(1e-4 * (1.0 - 1e-12));
        let above = erf_overlap(1e-4 * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-14);
    }

    #[test]
    fn zero_length_means_zero_phase() {
        let sc = PaperScenario::frozen();
        let t = phase_table(&sc.drive, &sc.atom, &sc.geometry.with_length(0.0), SignalTriggerCoefficient::Vanishing)
            .unwrap();
        assert!(t.rows.iter().all(|r| r.total() == 0.0));
    }

    #[test]
    fn sigma_minus_probe_rows_are_vacuum_only() {
        let sc = PaperScenario::frozen();
        let t = phase_table(&sc.drive, &sc.atom, &sc.geometry, SignalTriggerCoefficient::Vanishing).unwrap();
        for row in t.ordered_rows().unwrap().iter().take(4) {
            for (part, omega) in [(row.probe, sc.atom.omega_p), (row.signal, sc.atom.omega_s), (row.trigger, sc.atom.omega_t)] {
                assert_eq!(part.total(), part.vacuum);
                assert_eq!(part.vacuum, omega / CONSTANTS.c * sc.geometry.length_m);
            }
        }
    }

    #[test]
    fn trigger_row_adds_exactly_the_trigger_shifts() {
        let mut sc = PaperScenario::frozen();
        // move off the suppression point so every shift is nonzero
        sc.drive.delta[1] = 39.9e7;
        sc.atom.gamma[2] = 1e4;
        sc.atom.gamma[4] = 1e4;
        let t = phase_table(&sc.drive, &sc.atom, &sc.geometry, SignalTriggerCoefficient::MirrorSignalProbe).unwrap();
        let rows = t.ordered_rows().unwrap();
        let s = t.shifts;
        let added = s.pt + s.pst + s.st + s.spt + s.tps;
        let diff = rows[7].total() - rows[6].total();
        assert!((diff - added).abs() < 1e-12 * rows[7].total().abs());
        assert!([s.ps, s.pt, s.pst, s.sp, s.st, s.spt, s.tps].iter().all(|x| *x != 0.0));
    }

    #[test]
    fn phases_scale_with_length_when_velocities_match() {
        let sc = PaperScenario::frozen();
        let mut inputs = phase_inputs(&sc.drive, &sc.atom, SignalTriggerCoefficient::Vanishing).unwrap();
        let v = Velocity::Finite(6e3);
        inputs.velocities = GroupVelocities { vg_p: v, vg_s: v, vg_t: v };
        let one = assemble(&sc.drive, &sc.atom, &sc.geometry, &inputs).unwrap();
        let two = assemble(&sc.drive, &sc.atom, &sc.geometry.with_length(2.0 * sc.geometry.length_m), &inputs).unwrap();
        for (a, b) in one.rows.iter().zip(&two.rows) {
            assert!((2.0 * a.total() - b.total()).abs() <= 1e-12 * b.total().abs());
            assert!((2.0 * a.nonlinear() - b.nonlinear()).abs() <= 1e-12 * b.nonlinear().abs());
        }
    }

    #[test]
    fn conditional_phase_isolates_three_body_term() {
        let sc = PaperScenario::frozen();
        let t = phase_table(&sc.drive, &sc.atom, &sc.geometry, SignalTriggerCoefficient::Vanishing).unwrap();
        let s = t.shifts;
        let three_body = s.pt + s.pst + s.st + s.spt + s.tps;
        assert!((t.conditional_phase().unwrap() - three_body).abs() < 1e-9 * three_body.abs());
    }

    #[test]
    fn length_for_five_pi() {
        let sc = PaperScenario::frozen();
        let target = 5.0 * PI;
        let l = length_for_phase(&sc.drive, &sc.atom, &sc.geometry, SignalTriggerCoefficient::Vanishing, target).unwrap();
        let t = phase_table(&sc.drive, &sc.atom, &sc.geometry.with_length(l), SignalTriggerCoefficient::Vanishing).unwrap();
        assert!((t.total_nonlinear_phase().unwrap() - target).abs() < 1e-9);
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let sc = PaperScenario::frozen();
        let mut t = phase_table(&sc.drive, &sc.atom, &sc.geometry, SignalTriggerCoefficient::Vanishing).unwrap();
        t.rows.pop();
        assert!(matches!(t.ordered_rows(), Err(Error::IncompleteTable(_))));
        let mut t2 = phase_table(&sc.drive, &sc.atom, &sc.geometry, SignalTriggerCoefficient::Vanishing).unwrap();
        t2.rows[3].index = 2;
        assert!(matches!(t2.ordered_rows(), Err(Error::IncompleteTable(_))));
    }
}
