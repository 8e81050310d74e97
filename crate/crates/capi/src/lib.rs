//! C ABI for the arakelov crate: opaque handles, integer status codes, and
//! JSON/CSV string outputs so any language with a C FFI can drive the
//! computations. The matching declarations live in `include/arakelov.h`.
//!
//! Conventions:
//! - every fallible call returns an `arakelov_status` (0 on success) and
//!   writes its result through out-pointers;
//! - strings returned through `char **` are NUL-terminated, UTF-8, owned by
//!   the caller, and must be released with `arakelov_string_free`;
//! - on failure, `arakelov_last_error_message` returns a thread-local
//!   description valid until the next failing call on the same thread.

use arakelov::fiber::{self, ComponentId, FiberParams, SpecialFiber};
use arakelov::heights::{self, ErrMode, Ledger};
use arakelov::modsym;
use arakelov::theta::{self, PeriodMatrix};
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::path::Path;

pub const ARAKELOV_STATUS_OK: c_int = 0;
pub const ARAKELOV_STATUS_INVALID_ARGUMENT: c_int = 1;
pub const ARAKELOV_STATUS_INTERNAL: c_int = 2;
pub const ARAKELOV_STATUS_NULL_POINTER: c_int = 3;
pub const ARAKELOV_STATUS_UTF8: c_int = 4;
pub const ARAKELOV_STATUS_IO: c_int = 5;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn fail(code: c_int, msg: &str) -> c_int {
    set_error(msg);
    code
}

/// Opaque special-fiber handle.
pub struct ArakelovFiber(SpecialFiber);

/// Opaque constant-ledger handle.
pub struct ArakelovLedger(Ledger);

unsafe fn write_out<T>(out: *mut T, value: T) -> c_int {
    if out.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null output pointer");
    }
    unsafe { out.write(value) };
    ARAKELOV_STATUS_OK
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> c_int {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => return fail(ARAKELOV_STATUS_INTERNAL, "interior NUL in output"),
    };
    unsafe { write_out(out, c.into_raw()) }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn arakelov_fiber_new(
    p: u64,
    e: u32,
    f: u32,
    out: *mut *mut ArakelovFiber,
) -> c_int {
    if e == 0 || f == 0 {
        return fail(
            ARAKELOV_STATUS_INVALID_ARGUMENT,
            "ramification index and residual degree must be positive",
        );
    }
    let params = match FiberParams::new(p, e, f) {
        Ok(v) => v,
        Err(err) => return fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &err.to_string()),
    };
    match fiber::build_special_fiber(params) {
        Ok(fib) => unsafe { write_out(out, Box::into_raw(Box::new(ArakelovFiber(fib)))) },
        Err(err) => fail(ARAKELOV_STATUS_INTERNAL, &err.to_string()),
    }
}

/// # Safety
/// `fiber` must come from `arakelov_fiber_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn arakelov_fiber_free(fiber: *mut ArakelovFiber) {
    if !fiber.is_null() {
        drop(unsafe { Box::from_raw(fiber) });
    }
}

/// # Safety
/// `fiber` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn arakelov_fiber_genus(fiber: *const ArakelovFiber) -> u64 {
    if fiber.is_null() {
        return u64::MAX;
    }
    unsafe { &*fiber }.0.genus
}

/// # Safety
/// `fiber` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn arakelov_fiber_branch_count(fiber: *const ArakelovFiber) -> u64 {
    if fiber.is_null() {
        return u64::MAX;
    }
    unsafe { &*fiber }.0.s as u64
}

fn fiber_summary_json(f: &SpecialFiber) -> String {
    let branches: Vec<serde_json::Value> = f
        .branches
        .iter()
        .map(|b| {
            serde_json::json!({
                "index": b.index,
                "width": b.width,
                "interior_length": b.interior_len,
            })
        })
        .collect();
    serde_json::json!({
        "p": f.params.p,
        "e": f.params.e,
        "f": f.params.f,
        "branches": branches,
        "s": f.s,
        "genus": f.genus,
        "components": f.component_count(),
    })
    .to_string()
}

/// # Safety
/// `fiber` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_fiber_json(
    fiber: *const ArakelovFiber,
    out: *mut *mut c_char,
) -> c_int {
    if fiber.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null fiber handle");
    }
    let f = &unsafe { &*fiber }.0;
    unsafe { write_string(out, fiber_summary_json(f)) }
}

/// # Safety
/// `fiber` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_intersection_matrix_json(
    fiber: *const ArakelovFiber,
    out: *mut *mut c_char,
) -> c_int {
    if fiber.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null fiber handle");
    }
    let f = &unsafe { &*fiber }.0;
    let v = fiber::intersection_matrix(f).json_value(f);
    unsafe { write_string(out, v.to_string()) }
}

fn target_from_c(kind: c_int, branch: u64, position: u64) -> Result<ComponentId, String> {
    match kind {
        0 => Ok(ComponentId::Infinity),
        1 => Ok(ComponentId::Zero),
        2 => Ok(ComponentId::Interior {
            branch: branch as usize,
            m: position as usize,
        }),
        other => Err(format!("unknown target kind {other} (0=inf, 1=zero, 2=interior)")),
    }
}

/// # Safety
/// `fiber` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_vertical_divisor_json(
    fiber: *const ArakelovFiber,
    target_kind: c_int,
    branch: u64,
    position: u64,
    out: *mut *mut c_char,
) -> c_int {
    if fiber.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null fiber handle");
    }
    let f = &unsafe { &*fiber }.0;
    let target = match target_from_c(target_kind, branch, position) {
        Ok(t) => t,
        Err(msg) => return fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &msg),
    };
    match fiber::solve_vertical_divisor(f, target) {
        Ok(div) => {
            let mut v = div.json_value(f);
            v["target"] = target.json_value();
            unsafe { write_string(out, v.to_string()) }
        }
        Err(err) => fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &err.to_string()),
    }
}

/// # Safety
/// `fiber` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_dualizing_divisor_json(
    fiber: *const ArakelovFiber,
    out: *mut *mut c_char,
) -> c_int {
    if fiber.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null fiber handle");
    }
    let f = &unsafe { &*fiber }.0;
    unsafe { write_string(out, fiber::phi_omega(f).json_value(f).to_string()) }
}

/// # Safety
/// `fiber` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_cuspidal_divisor_json(
    fiber: *const ArakelovFiber,
    out: *mut *mut c_char,
) -> c_int {
    if fiber.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null fiber handle");
    }
    let f = &unsafe { &*fiber }.0;
    unsafe { write_string(out, fiber::cuspidal_divisor_class(f).json_value(f).to_string()) }
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_ledger_default(out: *mut *mut ArakelovLedger) -> c_int {
    unsafe { write_out(out, Box::into_raw(Box::new(ArakelovLedger(Ledger::default())))) }
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_ledger_from_file(
    path: *const c_char,
    out: *mut *mut ArakelovLedger,
) -> c_int {
    if path.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null path");
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => s,
        Err(_) => return fail(ARAKELOV_STATUS_UTF8, "path is not valid UTF-8"),
    };
    match Ledger::from_path(Path::new(path)) {
        Ok(l) => unsafe { write_out(out, Box::into_raw(Box::new(ArakelovLedger(l)))) },
        Err(err) => fail(ARAKELOV_STATUS_IO, &err.to_string()),
    }
}

/// # Safety
/// `ledger` must come from a ledger constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn arakelov_ledger_free(ledger: *mut ArakelovLedger) {
    if !ledger.is_null() {
        drop(unsafe { Box::from_raw(ledger) });
    }
}

fn err_mode_from_c(mode: c_int) -> Result<ErrMode, String> {
    match mode {
        0 => Ok(ErrMode::P3),
        1 => Ok(ErrMode::Autissier),
        other => Err(format!("unknown error mode {other} (0=p3, 1=autissier)")),
    }
}

/// # Safety
/// `ledger` may be null (defaults are used); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_height_bound_json(
    p: u64,
    err_mode: c_int,
    ledger: *const ArakelovLedger,
    out: *mut *mut c_char,
) -> c_int {
    let mode = match err_mode_from_c(err_mode) {
        Ok(m) => m,
        Err(msg) => return fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &msg),
    };
    let default_ledger;
    let ledger = if ledger.is_null() {
        default_ledger = Ledger::default();
        &default_ledger
    } else {
        &unsafe { &*ledger }.0
    };
    match heights::assemble_b(p, ledger, mode) {
        Ok(trace) => {
            let v = serde_json::to_value(&trace).expect("serializable");
            unsafe { write_string(out, v.to_string()) }
        }
        Err(err) => fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &err.to_string()),
    }
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_winding_report_json(p: u64, out: *mut *mut c_char) -> c_int {
    if p <= 17 {
        return fail(
            ARAKELOV_STATUS_INVALID_ARGUMENT,
            "winding reports are computed for primes > 17",
        );
    }
    match modsym::winding_report(p) {
        Ok(report) => {
            let v = serde_json::to_value(&report).expect("serializable");
            unsafe { write_string(out, v.to_string()) }
        }
        Err(modsym::ModsymError::Internal(msg)) => fail(ARAKELOV_STATUS_INTERNAL, &msg),
        Err(err) => fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &err.to_string()),
    }
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn arakelov_brumer_scan_csv(
    from: u64,
    to: u64,
    jobs: u32,
    out: *mut *mut c_char,
) -> c_int {
    if from <= 17 || from > to {
        return fail(
            ARAKELOV_STATUS_INVALID_ARGUMENT,
            "scan range must satisfy 17 < from <= to",
        );
    }
    match modsym::brumer_scan_parallel(from, to, jobs.max(1) as usize) {
        Ok(reports) => unsafe { write_string(out, modsym::reports_to_csv(&reports)) },
        Err(modsym::ModsymError::Internal(msg)) => fail(ARAKELOV_STATUS_INTERNAL, &msg),
        Err(err) => fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &err.to_string()),
    }
}

/// # Safety
/// `tau_re`/`tau_im` must point to genus² doubles (row-major), `z_re`/`z_im`
/// to genus doubles; the five output pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn arakelov_theta_eval(
    genus: u32,
    tau_re: *const f64,
    tau_im: *const f64,
    z_re: *const f64,
    z_im: *const f64,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_norm: *mut f64,
    out_radius: *mut u32,
    out_error: *mut f64,
) -> c_int {
    let g = genus as usize;
    if g != 1 && g != 2 {
        return fail(ARAKELOV_STATUS_INVALID_ARGUMENT, "genus must be 1 or 2");
    }
    if tau_re.is_null() || tau_im.is_null() || z_re.is_null() || z_im.is_null() {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null input array");
    }
    if out_re.is_null()
        || out_im.is_null()
        || out_norm.is_null()
        || out_radius.is_null()
        || out_error.is_null()
    {
        return fail(ARAKELOV_STATUS_NULL_POINTER, "null output pointer");
    }
    let tau: Vec<Complex64> = (0..g * g)
        .map(|i| unsafe { Complex64::new(*tau_re.add(i), *tau_im.add(i)) })
        .collect();
    let z: Vec<Complex64> = (0..g)
        .map(|i| unsafe { Complex64::new(*z_re.add(i), *z_im.add(i)) })
        .collect();
    let pm = match PeriodMatrix::new(g, &tau) {
        Ok(pm) => pm,
        Err(err) => return fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &err.to_string()),
    };
    match theta::theta_eval(&pm, &z, tol) {
        Ok(v) => {
            unsafe {
                *out_re = v.value.re;
                *out_im = v.value.im;
                *out_norm = v.norm_an;
                *out_radius = v.truncation_radius;
                *out_error = v.error_estimate;
            }
            ARAKELOV_STATUS_OK
        }
        Err(err) => fail(ARAKELOV_STATUS_INVALID_ARGUMENT, &err.to_string()),
    }
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn arakelov_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Thread-local message for the most recent failure on this thread; the
/// pointer stays valid until the next failing call here.
#[no_mangle]
pub extern "C" fn arakelov_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}
