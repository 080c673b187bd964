//! Nelder-Mead search for drive parameters that equalize the three group
//! velocities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::group_velocities;
use crate::error::{Error, Result};
use crate::model::{AtomParams, DriveParams};

/// A scalar drive parameter. Rabi knobs set the magnitude and keep the phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveKnob {
    RabiP,
    RabiC,
    RabiS,
    RabiB,
    RabiT,
    Delta1,
    Delta2,
    Delta3,
    Delta4,
    Delta5,
}

impl DriveKnob {
    pub fn get(self, d: &DriveParams) -> f64 {
        match self {
            DriveKnob::RabiP => d.rabi_p.norm(),
            DriveKnob::RabiC => d.rabi_c.norm(),
            DriveKnob::RabiS => d.rabi_s.norm(),
            DriveKnob::RabiB => d.rabi_b.norm(),
            DriveKnob::RabiT => d.rabi_t.norm(),
            DriveKnob::Delta1 => d.delta[0],
            DriveKnob::Delta2 => d.delta[1],
            DriveKnob::Delta3 => d.delta[2],
            DriveKnob::Delta4 => d.delta[3],
            DriveKnob::Delta5 => d.delta[4],
        }
    }

    pub fn set(self, d: &mut DriveParams, v: f64) {
        let scaled = |z: Complex64| {
            let arg = if z == Complex64::new(0.0, 0.0) { 0.0 } else { z.arg() };
            Complex64::from_polar(v, arg)
        };
        match self {
            DriveKnob::RabiP => d.rabi_p = scaled(d.rabi_p),
            DriveKnob::RabiC => d.rabi_c = scaled(d.rabi_c),
            DriveKnob::RabiS => d.rabi_s = scaled(d.rabi_s),
            DriveKnob::RabiB => d.rabi_b = scaled(d.rabi_b),
            DriveKnob::RabiT => d.rabi_t = scaled(d.rabi_t),
            DriveKnob::Delta1 => d.delta[0] = v,
            DriveKnob::Delta2 => d.delta[1] = v,
            DriveKnob::Delta3 => d.delta[2] = v,
            DriveKnob::Delta4 => d.delta[3] = v,
            DriveKnob::Delta5 => d.delta[4] = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParameter {
    pub knob: DriveKnob,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOptions {
    /// Relative mismatch at which the search stops.
    pub target: f64,
    pub max_iterations: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self { target: 0.05, max_iterations: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchResult {
    pub drive: DriveParams,
    pub mismatch: f64,
    pub iterations: usize,
    /// False when the budget ran out before reaching the target.
    pub reached_target: bool,
}

pub fn match_velocities(
    start: &DriveParams,
    atom: &AtomParams,
    free: &[FreeParameter],
    opts: &MatchOptions,
) -> Result<MatchResult> {
    if free.len() < 2 {
        return Err(Error::TooFewFreeParameters(free.len()));
    }
    for f in free {
        if !(f.lower < f.upper) || !f.lower.is_finite() || !f.upper.is_finite() {
            return Err(Error::InvalidParameter {
                name: "bounds",
                reason: format!("{:?}: need finite lower < upper, got [{}, {}]", f.knob, f.lower, f.upper),
            });
        }
    }

    let initial = group_velocities(start, atom).mismatch();
    if initial <= opts.target {
        return Ok(MatchResult { drive: *start, mismatch: initial, iterations: 0, reached_target: true });
    }

    let n = free.len();
    let to_unit = |d: &DriveParams| -> Vec<f64> {
        free.iter()
            .map(|f| ((f.knob.get(d) - f.lower) / (f.upper - f.lower)).clamp(0.0, 1.0))
            .collect()
    };
    let from_unit = |x: &[f64]| -> DriveParams {
        let mut d = *start;
        for (f, xi) in free.iter().zip(x) {
            f.knob.set(&mut d, f.lower + xi.clamp(0.0, 1.0) * (f.upper - f.lower));
        }
        d
    };
    let cost = |x: &[f64]| -> f64 {
        let m = group_velocities(&from_unit(x), atom).mismatch();
        if m.is_nan() { f64::INFINITY } else { m }
    };

    let x0 = to_unit(start);
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for i in 0..n {
        let mut v = x0.clone();
        v[i] = if v[i] + 0.1 <= 1.0 { v[i] + 0.1 } else { v[i] - 0.1 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| cost(x)).collect();

    let mut iterations = 0;
    while iterations < opts.max_iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if values[0] <= opts.target {
            break;
        }
        let spread = simplex
            .iter()
            .skip(1)
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread < 1e-12 {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| (c + t * (c - w)).clamp(0.0, 1.0)).collect()
        };
        let xr = along(1.0);
        let fr = cost(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = cost(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let xc = if fr < values[n] { along(0.5) } else { along(-0.5) };
            let fc = cost(&xc);
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for k in 1..=n {
                    simplex[k] = simplex[k].iter().zip(&best).map(|(v, b)| b + 0.5 * (v - b)).collect();
                    values[k] = cost(&simplex[k]);
                }
            }
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    let mismatch = values[best];
    if mismatch >= initial {
        return Ok(MatchResult { drive: *start, mismatch: initial, iterations, reached_target: false });
    }
    Ok(MatchResult {
        drive: from_unit(&simplex[best]),
        mismatch,
        iterations,
        reached_target: mismatch <= opts.target,
    })
}
