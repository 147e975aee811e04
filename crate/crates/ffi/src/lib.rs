//! C ABI over `confluent_susy`. Configurations and transformation results are
//! opaque handles; every call returns a [`SusyStatus`], and the message of the
//! most recent failure on the calling thread is available from
//! [`susy_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use confluent_susy::cli::{self, Failure, RunConfig};

/// Status codes; 1 to 4 coincide with the exit codes of the `susy` binary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SusyStatus {
    Ok = 0,
    Other = 1,
    Config = 2,
    Regularity = 3,
    Invariant = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    BufferTooSmall = 7,
    Unavailable = 8,
    Panic = 9,
}

/// Sampled curves of a transformation, all on the grid returned as `SUSY_CURVE_X`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SusyCurve {
    X = 0,
    U0 = 1,
    U1 = 2,
    Wronskian = 3,
    Q0 = 4,
    Q1 = 5,
}

/// Opaque validated run configuration.
pub struct SusyConfig {
    cfg: RunConfig,
}

/// Opaque result of a transformation.
pub struct SusyTransform {
    lambda: f64,
    regular: bool,
    x: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    wronskian: Vec<f64>,
    q0: Option<Vec<f64>>,
    q1: Option<Vec<f64>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SusyStatus, msg: impl Into<String>) -> SusyStatus {
    set_error(msg.into());
    status
}

fn from_failure(f: Failure) -> SusyStatus {
    let status = match f.code {
        cli::EXIT_CONFIG => SusyStatus::Config,
        cli::EXIT_REGULARITY => SusyStatus::Regularity,
        cli::EXIT_INVARIANT => SusyStatus::Invariant,
        _ => SusyStatus::Other,
    };
    fail(status, f.message)
}

fn from_error(e: confluent_susy::Error) -> SusyStatus {
    from_failure(Failure::from(e))
}

/// Runs `body`, converting a panic into `SusyStatus::Panic`.
fn guard(body: impl FnOnce() -> SusyStatus) -> SusyStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SusyStatus::Panic, msg)
        }
    }
}

/// Copies `src` into `buf` of capacity `cap` and stores the length in `len`
/// when non-null. A null `buf` only queries the length.
unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, len: *mut usize) -> SusyStatus {
    if !len.is_null() {
        *len = src.len();
    }
    if buf.is_null() {
        return SusyStatus::Ok;
    }
    if cap < src.len() {
        return fail(
            SusyStatus::BufferTooSmall,
            format!("need {} values, buffer holds {cap}", src.len()),
        );
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    SusyStatus::Ok
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn susy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Writes a handle to the default configuration into `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn susy_config_default(out: *mut *mut SusyConfig) -> SusyStatus {
    if out.is_null() {
        return fail(SusyStatus::NullPointer, "out is null");
    }
    *out = Box::into_raw(Box::new(SusyConfig {
        cfg: RunConfig::default(),
    }));
    SusyStatus::Ok
}

/// Parses a JSON configuration (the `--config` file format of `susy`).
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn susy_config_from_json(
    json: *const c_char,
    out: *mut *mut SusyConfig,
) -> SusyStatus {
    if json.is_null() || out.is_null() {
        return fail(SusyStatus::NullPointer, "json or out is null");
    }
    *out = ptr::null_mut();
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return fail(SusyStatus::InvalidUtf8, "config is not UTF-8");
    };
    guard(|| match RunConfig::from_json(text) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(SusyConfig { cfg }));
            SusyStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Serializes the configuration, defaults filled in, as JSON. Free the string
/// with [`susy_string_free`].
///
/// # Safety
/// `cfg` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn susy_config_to_json(
    cfg: *const SusyConfig,
    out: *mut *mut c_char,
) -> SusyStatus {
    if cfg.is_null() || out.is_null() {
        return fail(SusyStatus::NullPointer, "cfg or out is null");
    }
    let text = cli::to_json(&(*cfg).cfg);
    *out = CString::new(text).expect("JSON has no NUL").into_raw();
    SusyStatus::Ok
}

/// # Safety
/// `cfg` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn susy_config_free(cfg: *mut SusyConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Bound-state energies `ε_n` of the untransformed system in the configured
/// window, ascending. The count goes to `len`; a null `buf` only queries it,
/// and a short one fails with `SUSY_STATUS_BUFFER_TOO_SMALL`.
///
/// # Safety
/// `cfg` must be null or a live handle; `buf` null or valid for `cap` writes;
/// `len` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn susy_spectrum(
    cfg: *const SusyConfig,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> SusyStatus {
    if cfg.is_null() {
        return fail(SusyStatus::NullPointer, "cfg is null");
    }
    let cfg = &(*cfg).cfg;
    guard(|| {
        let eps = cli::system(cfg)
            .and_then(|sys| cli::spectrum_report(cfg, &sys))
            .map(|r| r.epsilons());
        match eps {
            Ok(eps) => copy_out(&eps, buf, cap, len),
            Err(e) => from_error(e),
        }
    })
}

/// Runs the configured transformation. A singular transformation fails with
/// `SUSY_STATUS_REGULARITY` unless the configuration allows it.
///
/// # Safety
/// `cfg` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn susy_transform(
    cfg: *const SusyConfig,
    out: *mut *mut SusyTransform,
) -> SusyStatus {
    if cfg.is_null() || out.is_null() {
        return fail(SusyStatus::NullPointer, "cfg or out is null");
    }
    *out = ptr::null_mut();
    let cfg = &(*cfg).cfg;
    guard(|| {
        let o = match cli::system(cfg).and_then(|sys| cli::transform(cfg, sys)) {
            Ok(o) => o,
            Err(e) => return from_error(e),
        };
        let reg = &o.regularity;
        if !reg.regular && !cfg.transform.allow_singular {
            return fail(
                SusyStatus::Regularity,
                format!(
                    "singular transformation: Wronskian zeros {:?}, q̂ nodes {:?}",
                    reg.interior_wronskian_zeros, reg.q_hat_nodes
                ),
            );
        }
        let t = SusyTransform {
            lambda: o.lambda,
            regular: reg.regular,
            x: o.sys.grid().points().to_vec(),
            u0: o.tr.u0.values().to_vec(),
            u1: o.tr.u1.values().to_vec(),
            wronskian: o.tr.wron.w.values().to_vec(),
            q0: o.sys.q0().ok().map(|q| q.values().to_vec()),
            q1: o.q1.as_ref().map(|q| q.values().to_vec()),
        };
        *out = Box::into_raw(Box::new(t));
        SusyStatus::Ok
    })
}

/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn susy_transform_lambda(t: *const SusyTransform) -> f64 {
    if t.is_null() {
        return f64::NAN;
    }
    (*t).lambda
}

/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn susy_transform_is_regular(t: *const SusyTransform) -> bool {
    !t.is_null() && (*t).regular
}

/// Copies one curve out of a transformation, with the buffer protocol of
/// [`susy_spectrum`]. `SUSY_CURVE_Q1` is unavailable for singular
/// transformations.
///
/// # Safety
/// `t` must be null or a live handle; `buf` null or valid for `cap` writes;
/// `len` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn susy_transform_curve(
    t: *const SusyTransform,
    curve: SusyCurve,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> SusyStatus {
    if t.is_null() {
        return fail(SusyStatus::NullPointer, "transform is null");
    }
    let t = &*t;
    let src = match curve {
        SusyCurve::X => Some(&t.x),
        SusyCurve::U0 => Some(&t.u0),
        SusyCurve::U1 => Some(&t.u1),
        SusyCurve::Wronskian => Some(&t.wronskian),
        SusyCurve::Q0 => t.q0.as_ref(),
        SusyCurve::Q1 => t.q1.as_ref(),
    };
    match src {
        Some(v) => copy_out(v, buf, cap, len),
        None => fail(
            SusyStatus::Unavailable,
            format!("{curve:?} is not available for this transformation"),
        ),
    }
}

/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn susy_transform_free(t: *mut SusyTransform) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Runs the invariant checks. The JSON report goes to `report` (free it with
/// [`susy_string_free`]) whenever the checks ran, including when they fail
/// with `SUSY_STATUS_REGULARITY` or `SUSY_STATUS_INVARIANT`.
///
/// # Safety
/// `cfg` must be null or a live handle; `report` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn susy_verify(
    cfg: *const SusyConfig,
    report: *mut *mut c_char,
) -> SusyStatus {
    if cfg.is_null() || report.is_null() {
        return fail(SusyStatus::NullPointer, "cfg or report is null");
    }
    *report = ptr::null_mut();
    let cfg = &(*cfg).cfg;
    guard(|| match cli::verify(cfg) {
        Ok(r) => {
            *report = CString::new(cli::to_json(&r))
                .expect("JSON has no NUL")
                .into_raw();
            if r.passed {
                SusyStatus::Ok
            } else if !r.regular {
                fail(SusyStatus::Regularity, "transformation is singular")
            } else {
                let failed: Vec<&str> = r
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name)
                    .collect();
                fail(
                    SusyStatus::Invariant,
                    format!("failed checks: {}", failed.join(", ")),
                )
            }
        }
        Err(e) => from_error(e),
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn susy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
