//! Adaptive Dormand-Prince 5(4) integrator for complex-valued linear ODEs,
//! with PI step-size control.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Butcher tableau (Dormand & Prince 1980).
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub dt_max: f64,
    /// Record every `stride`-th accepted step (first and last are always kept).
    pub stride: usize,
}

type State<const N: usize> = [Complex64; N];

fn axpy<const N: usize>(y: &State<N>, terms: &[(f64, &State<N>)], h: f64) -> State<N> {
    let mut out = *y;
    for (w, k) in terms {
        let wh = w * h;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * wh;
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t_end`, returning the sampled
/// times and states.
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: State<N>,
    t_end: f64,
    ctrl: &StepControl,
) -> Result<(Vec<f64>, Vec<State<N>>)>
where
    F: FnMut(f64, &State<N>) -> State<N>,
{
    let mut times = vec![t0];
    let mut states = vec![y0];
    if t_end <= t0 {
        return Ok((times, states));
    }
    let stride = ctrl.stride.max(1);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = ctrl.dt_max.min(t_end - t0);
    let mut err_prev: f64 = 1e-4;
    let mut accepted = 0usize;

    while t < t_end {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            t + h,
            &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        );
        let y_new = axpy(&y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
        let k7 = f(t + h, &y_new);

        let mut sum = 0.0;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = ctrl.atol + ctrl.rtol * y[i].norm().max(y_new[i].norm());
            sum += (e.re / sc).powi(2) + (e.im / sc).powi(2);
        }
        let err = (sum / (2 * N) as f64).sqrt();

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            accepted += 1;
            if last || accepted.is_multiple_of(stride) {
                times.push(t);
                states.push(y);
            }
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            err_prev = err.max(1e-4);
            h = (h * factor).min(ctrl.dt_max);
        } else if err.is_finite() {
            h *= (SAFETY * err.powf(-ALPHA)).clamp(MIN_FACTOR, 1.0);
        } else {
            h *= MIN_FACTOR;
        }

        if h <= 16.0 * f64::EPSILON * t.abs().max(t_end.abs()) {
            return Err(Error::StepUnderflow { time: t, step: h });
        }
    }
    Ok((times, states))
}
