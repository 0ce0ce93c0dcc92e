//! C ABI over the `kkverify` engine.
//!
//! Every object crosses the boundary as an opaque handle owned by the caller
//! and released with its matching `*_free`. Every fallible call returns a
//! [`KkStatus`]; on anything but `KK_STATUS_OK` the thread's last error message is
//! available from [`kk_last_error_message`]. Strings returned through
//! out-parameters are NUL-terminated UTF-8 and must be released with
//! [`kk_string_free`]. No panic unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use kkverify::cli::{run_pipeline, Options, Report, Scenario};
use kkverify::exprlang::{self, Bindings, Expr};
use kkverify::holonomy::{self, ActionConstants};
use kkverify::symmetry;

/// Result of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Eval = 4,
    Scenario = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Parsed expression.
pub struct KkExpr(Expr);

/// Validated scenario.
pub struct KkScenario(Scenario);

/// Verification report.
pub struct KkReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(KkStatus, String);

impl Failure {
    fn new(status: KkStatus, msg: impl std::fmt::Display) -> Self {
        Failure(status, msg.to_string())
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            KkStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            KkStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(KkStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(KkStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(KkStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(KkStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn kk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and simplifies `text`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_expr_parse(text: *const c_char, out: *mut *mut KkExpr) -> KkStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let e = exprlang::parse(text).map_err(|e| Failure::new(KkStatus::Parse, e))?;
        let handle = Box::into_raw(Box::new(KkExpr(exprlang::simplify(&e))));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Releases an expression. Null is ignored.
///
/// # Safety
/// `e` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kk_expr_free(e: *mut KkExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Canonical printed form.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_expr_to_string(e: *const KkExpr, out: *mut *mut c_char) -> KkStatus {
    guard(|| {
        let e = ref_arg(e, "expr")?;
        write_out(out, c_string(e.0.to_string()), "out")
    })
}

/// Simplified ∂e/∂symbol as a new handle.
///
/// # Safety
/// `e` must be a live handle, `symbol` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_expr_differentiate(
    e: *const KkExpr,
    symbol: *const c_char,
    out: *mut *mut KkExpr,
) -> KkStatus {
    guard(|| {
        let e = ref_arg(e, "expr")?;
        let symbol = str_arg(symbol, "symbol")?;
        let d = exprlang::simplify(&exprlang::differentiate(&e.0, symbol));
        let handle = Box::into_raw(Box::new(KkExpr(d)));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Simplified copy as a new handle.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_expr_simplify(e: *const KkExpr, out: *mut *mut KkExpr) -> KkStatus {
    guard(|| {
        let e = ref_arg(e, "expr")?;
        let handle = Box::into_raw(Box::new(KkExpr(exprlang::simplify(&e.0))));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Evaluates at the point `names[i] = values[i]` for `i < len`.
///
/// # Safety
/// `names` and `values` must each hold `len` entries (either may be null
/// when `len` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_expr_evaluate(
    e: *const KkExpr,
    names: *const *const c_char,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> KkStatus {
    guard(|| {
        let e = ref_arg(e, "expr")?;
        let mut point = Bindings::new();
        if len > 0 {
            if names.is_null() || values.is_null() {
                return Err(Failure::new(KkStatus::NullPointer, "names or values is null"));
            }
            for i in 0..len {
                point.insert(str_arg(*names.add(i), "name")?, *values.add(i));
            }
        }
        let v = exprlang::evaluate(&e.0, &point).map_err(|e| Failure::new(KkStatus::Eval, e))?;
        write_out(out, v, "out")
    })
}

fn scenario_out(s: Scenario, out: *mut *mut KkScenario) -> Result<(), Failure> {
    let handle = Box::into_raw(Box::new(KkScenario(s)));
    unsafe { write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle))) }
}

/// Loads and validates a scenario file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_scenario_load_path(path: *const c_char, out: *mut *mut KkScenario) -> KkStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let s = Scenario::load(Path::new(path)).map_err(|e| Failure::new(KkStatus::Scenario, e))?;
        scenario_out(s, out)
    })
}

/// Validates a scenario given as JSON text.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_scenario_load_str(json: *const c_char, out: *mut *mut KkScenario) -> KkStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        let s = Scenario::from_json(json).map_err(|e| Failure::new(KkStatus::Scenario, e))?;
        scenario_out(s, out)
    })
}

/// Replaces the sampling seed.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kk_scenario_set_seed(s: *mut KkScenario, seed: u64) -> KkStatus {
    guard(|| {
        let s = s
            .as_mut()
            .ok_or_else(|| Failure::new(KkStatus::NullPointer, "scenario is null"))?;
        s.0.seed = seed;
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kk_scenario_free(s: *mut KkScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs every check. `tolerance_scale` must be finite and positive.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_report_run(
    s: *const KkScenario,
    tolerance_scale: f64,
    out: *mut *mut KkReport,
) -> KkStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
            return Err(Failure::new(
                KkStatus::InvalidArgument,
                format!("tolerance scale must be finite and positive, got {tolerance_scale}"),
            ));
        }
        let report = run_pipeline(&s.0, &Options { tolerance_scale });
        let handle = Box::into_raw(Box::new(KkReport(report)));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Report as JSON, byte-identical to the CLI's `--format json`.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_report_to_json(r: *const KkReport, out: *mut *mut c_char) -> KkStatus {
    guard(|| {
        let r = ref_arg(r, "report")?;
        write_out(out, c_string(r.0.to_json()), "out")
    })
}

/// Report as grouped text.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_report_to_text(r: *const KkReport, out: *mut *mut c_char) -> KkStatus {
    guard(|| {
        let r = ref_arg(r, "report")?;
        write_out(out, c_string(r.0.to_text()), "out")
    })
}

/// 0 when nothing failed, 1 otherwise; -1 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kk_report_exit_code(r: *const KkReport) -> i32 {
    r.as_ref().map_or(-1, |r| r.0.exit_code())
}

/// Pass, fail and skip counts. Any out-pointer may be null.
///
/// # Safety
/// `r` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_report_counts(
    r: *const KkReport,
    pass: *mut usize,
    fail: *mut usize,
    skip: *mut usize,
) -> KkStatus {
    guard(|| {
        let s = ref_arg(r, "report")?.0.summary();
        for (p, v) in [(pass, s.pass), (fail, s.fail), (skip, s.skip)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `r` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kk_report_free(r: *mut KkReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of independent parameters of the rotations in `n` dimensions.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_parameter_count(n: i64, out: *mut i64) -> KkStatus {
    guard(|| {
        let v = symmetry::parameter_count(n).map_err(|e| Failure::new(KkStatus::InvalidArgument, e))?;
        write_out(out, v, "out")
    })
}

fn constants(hbar: f64, k: f64, phase_tol: f64) -> Result<ActionConstants, Failure> {
    let k = (k != 0.0).then_some(k);
    ActionConstants::new(hbar, k, phase_tol).map_err(|e| Failure::new(KkStatus::InvalidArgument, e))
}

/// Smallest nonzero quantized action 2πk. Pass `k = 0` for k = ħ/4π.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_min_action(hbar: f64, k: f64, out: *mut f64) -> KkStatus {
    guard(|| {
        let c = constants(hbar, k, ActionConstants::default().phase_tol())?;
        write_out(out, holonomy::min_action(&c), "out")
    })
}

/// Classifies `action` as 2πnk within `phase_tol`. Pass `k = 0` for
/// k = ħ/4π. `*quantized` is set either way; `*n` only when quantized.
///
/// # Safety
/// `n` and `quantized` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_quantization_check(
    action: f64,
    hbar: f64,
    k: f64,
    phase_tol: f64,
    n: *mut i64,
    quantized: *mut bool,
) -> KkStatus {
    guard(|| {
        let c = constants(hbar, k, phase_tol)?;
        if n.is_null() {
            return Err(Failure::new(KkStatus::NullPointer, "n is null"));
        }
        let q = holonomy::quantization_check(action, &c);
        write_out(quantized, q.is_some(), "quantized")?;
        if let Some(m) = q {
            n.write(m);
        }
        Ok(())
    })
}
