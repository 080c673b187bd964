//! C ABI for the six-level simulation library.
//!
//! Every fallible call returns a [`SixlevelStatus`]; on failure the message is
//! available from [`sixlevel_last_error`] on the same thread. Handles are
//! opaque and must be released with [`sixlevel_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use sixlevel::config::RunConfig;
use sixlevel::entanglement::residual_entanglement;
use sixlevel::gates::ThreeQubitState;
use sixlevel::propagation::{group_velocities, length_for_phase, phase_table, Velocity};
use sixlevel::report::{gate_entanglement, scenario_report};
use sixlevel::susceptibility::analytic_susceptibilities;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SixlevelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numerical = 3,
    Panic = 4,
}

/// Opaque model handle: a validated run configuration.
pub struct SixlevelModel {
    cfg: RunConfig,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SixlevelComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for SixlevelComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Susceptibility coefficients in SI units.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SixlevelSusceptibilities {
    pub chi1_p: SixlevelComplex,
    pub chi3_ps: SixlevelComplex,
    pub chi3_pt: SixlevelComplex,
    pub chi5_pst: SixlevelComplex,
    pub chi3_sp: SixlevelComplex,
    pub chi5_spt: SixlevelComplex,
    pub chi5_tps: SixlevelComplex,
}

/// Total phases of the eight basis rows at one medium length.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SixlevelPhases {
    pub length_m: f64,
    /// Row order |000> .. |111>, probe bit most significant.
    pub row_total: [f64; 8],
    pub total_nonlinear: f64,
    pub conditional: f64,
    /// Residual entanglement of the gate output for |+++>.
    pub zeta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SixlevelStatus, msg: impl Into<String>) -> SixlevelStatus {
    set_error(msg.into());
    status
}

fn from_core(e: sixlevel::Error) -> SixlevelStatus {
    let status = if e.is_input_error() { SixlevelStatus::InvalidInput } else { SixlevelStatus::Numerical };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> SixlevelStatus) -> SixlevelStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SixlevelStatus::Panic, "internal panic"),
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sixlevel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a model from a JSON run configuration. A null `config_json` gives
/// the reference scenario.
///
/// # Safety
/// `config_json` is null or a nul-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_model_new(config_json: *const c_char, out: *mut *mut SixlevelModel) -> SixlevelStatus {
    guard(|| {
        if out.is_null() {
            return fail(SixlevelStatus::NullPointer, "out is null");
        }
        let cfg = if config_json.is_null() {
            RunConfig::default()
        } else {
            let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
                Ok(t) => t,
                Err(e) => return fail(SixlevelStatus::InvalidInput, format!("config is not UTF-8: {e}")),
            };
            match RunConfig::from_json(text) {
                Ok(c) => c,
                Err(e) => return from_core(e),
            }
        };
        unsafe { *out = Box::into_raw(Box::new(SixlevelModel { cfg })) };
        SixlevelStatus::Ok
    })
}

/// # Safety
/// `model` is null or was returned by [`sixlevel_model_new`] and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_model_free(model: *mut SixlevelModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

unsafe fn model_ref<'a>(model: *const SixlevelModel) -> Option<&'a SixlevelModel> {
    unsafe { model.as_ref() }
}

/// # Safety
/// `model` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_susceptibilities(
    model: *const SixlevelModel,
    out: *mut SixlevelSusceptibilities,
) -> SixlevelStatus {
    guard(|| {
        let (Some(m), false) = (unsafe { model_ref(model) }, out.is_null()) else {
            return fail(SixlevelStatus::NullPointer, "model or out is null");
        };
        match analytic_susceptibilities(&m.cfg.drive, &m.cfg.atom) {
            Ok(s) => {
                unsafe {
                    *out = SixlevelSusceptibilities {
                        chi1_p: s.chi1_p.into(),
                        chi3_ps: s.chi3_ps.into(),
                        chi3_pt: s.chi3_pt.into(),
                        chi5_pst: s.chi5_pst.into(),
                        chi3_sp: s.chi3_sp.into(),
                        chi5_spt: s.chi5_spt.into(),
                        chi5_tps: s.chi5_tps.into(),
                    }
                };
                SixlevelStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Group velocities (probe, signal, trigger) in m/s; an unbounded velocity is
/// reported as +infinity.
///
/// # Safety
/// `model` is a live handle and `out` points to three doubles.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_group_velocities(model: *const SixlevelModel, out: *mut f64) -> SixlevelStatus {
    guard(|| {
        let (Some(m), false) = (unsafe { model_ref(model) }, out.is_null()) else {
            return fail(SixlevelStatus::NullPointer, "model or out is null");
        };
        let v = group_velocities(&m.cfg.drive, &m.cfg.atom);
        let vals = [v.vg_p, v.vg_s, v.vg_t].map(|x| match x {
            Velocity::Finite(x) => x,
            Velocity::Unbounded => f64::INFINITY,
        });
        unsafe { ptr::copy_nonoverlapping(vals.as_ptr(), out, 3) };
        SixlevelStatus::Ok
    })
}

/// Phase table at `length_m`; a negative length selects the configured one.
///
/// # Safety
/// `model` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_phases(
    model: *const SixlevelModel,
    length_m: f64,
    out: *mut SixlevelPhases,
) -> SixlevelStatus {
    guard(|| {
        let (Some(m), false) = (unsafe { model_ref(model) }, out.is_null()) else {
            return fail(SixlevelStatus::NullPointer, "model or out is null");
        };
        let c = &m.cfg;
        let geom = if length_m < 0.0 { c.geometry } else { c.geometry.with_length(length_m) };
        let result = phase_table(&c.drive, &c.atom, &geom, c.options.chi_st).and_then(|t| {
            let rows = t.ordered_rows()?;
            Ok(SixlevelPhases {
                length_m: t.length_m,
                row_total: std::array::from_fn(|i| rows[i].total()),
                total_nonlinear: t.total_nonlinear_phase()?,
                conditional: t.conditional_phase()?,
                zeta: gate_entanglement(&t)?,
            })
        });
        match result {
            Ok(p) => {
                unsafe { *out = p };
                SixlevelStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Medium length at which the total nonlinear phase reaches `target_rad`.
///
/// # Safety
/// `model` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_length_for_phase(
    model: *const SixlevelModel,
    target_rad: f64,
    out: *mut f64,
) -> SixlevelStatus {
    guard(|| {
        let (Some(m), false) = (unsafe { model_ref(model) }, out.is_null()) else {
            return fail(SixlevelStatus::NullPointer, "model or out is null");
        };
        let c = &m.cfg;
        match length_for_phase(&c.drive, &c.atom, &c.geometry, c.options.chi_st, target_rad) {
            Ok(l) => {
                unsafe { *out = l };
                SixlevelStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Residual three-way entanglement of a normalized three-qubit state given as
/// eight interleaved (re, im) pairs.
///
/// # Safety
/// `amplitudes` points to sixteen doubles and `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_residual_entanglement(amplitudes: *const f64, out: *mut f64) -> SixlevelStatus {
    guard(|| {
        if amplitudes.is_null() || out.is_null() {
            return fail(SixlevelStatus::NullPointer, "amplitudes or out is null");
        }
        let raw = unsafe { std::slice::from_raw_parts(amplitudes, 16) };
        let amp: [Complex64; 8] = std::array::from_fn(|i| Complex64::new(raw[2 * i], raw[2 * i + 1]));
        match ThreeQubitState::new(amp).and_then(|s| residual_entanglement(&s)) {
            Ok(r) => {
                unsafe { *out = r.zeta };
                SixlevelStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Full reference-scenario report for this model as JSON. Release the string
/// with [`sixlevel_string_free`].
///
/// # Safety
/// `model` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_report_json(model: *const SixlevelModel, out: *mut *mut c_char) -> SixlevelStatus {
    guard(|| {
        let (Some(m), false) = (unsafe { model_ref(model) }, out.is_null()) else {
            return fail(SixlevelStatus::NullPointer, "model or out is null");
        };
        let c = &m.cfg;
        let sc = sixlevel::PaperScenario { atom: c.atom, drive: c.drive, geometry: c.geometry };
        match scenario_report(&sc, c.options.chi_st, c.options.target_phase) {
            Ok(r) => {
                let text = serde_json::to_string(&r).expect("report serializes");
                unsafe { *out = CString::new(text).expect("json has no nul").into_raw() };
                SixlevelStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sixlevel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
