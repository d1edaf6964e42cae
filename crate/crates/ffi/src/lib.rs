//! C ABI for the loopform pairing library.
//!
//! Handles are opaque heap pointers created from the same JSON documents the
//! CLI reads and writes, so a foreign caller and the command line can share
//! inputs byte for byte. Every call returns an [`LfStatus`]; on anything but
//! `LF_STATUS_OK` a message is stored in thread-local storage and can be read
//! back with [`lf_last_error`] until the next failing call on that thread.

use loopform::coeffs::{extract_window, ExtractGrid, KernelCoefficients};
use loopform::green::SurfaceKernel;
use loopform::mls::MatrixLaurentSeries;
use loopform::pairing::{moment_integral, omega_quadrature, omega_series, QuadratureGrid};
use loopform::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Outcome of a library call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LfStatus {
    /// The call succeeded.
    Ok = 0,
    /// A computation produced a non-finite value.
    Numeric = 1,
    /// Arguments or input documents were rejected.
    Invalid = 2,
    /// A required pointer argument was null.
    NullArgument = 3,
    /// A string argument was not valid UTF-8.
    BadEncoding = 4,
    /// The library caught an internal panic.
    Panic = 5,
}

/// Opaque surface kernel handle.
pub struct LfKernel {
    inner: SurfaceKernel,
}

/// Opaque matrix Laurent series handle.
pub struct LfSeries {
    inner: MatrixLaurentSeries,
}

/// Opaque kernel coefficient table handle.
pub struct LfTable {
    inner: KernelCoefficients,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = clean);
}

fn fail(e: &Error) -> LfStatus {
    set_error(e.to_string());
    if e.exit_code() == 1 {
        LfStatus::Numeric
    } else {
        LfStatus::Invalid
    }
}

fn guarded(f: impl FnOnce() -> LfStatus) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".into());
            LfStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, LfStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(LfStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        LfStatus::BadEncoding
    })
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, LfStatus> {
    if ptr.is_null() {
        set_error(format!("null {what} handle"));
        return Err(LfStatus::NullArgument);
    }
    Ok(&*ptr)
}

unsafe fn store<T>(slot: *mut T, value: T) -> Result<(), LfStatus> {
    if slot.is_null() {
        set_error("null output pointer".into());
        return Err(LfStatus::NullArgument);
    }
    slot.write(value);
    Ok(())
}

unsafe fn parse_json<T: serde::de::DeserializeOwned>(
    json: *const c_char,
    what: &str,
) -> Result<T, LfStatus> {
    let text = read_str(json)?;
    serde_json::from_str(text).map_err(|e| {
        set_error(format!("cannot parse {what}: {e}"));
        LfStatus::Invalid
    })
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn lf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread, empty
/// if there has been none. The pointer stays valid until the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn lf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Build a kernel from its JSON descriptor, e.g. `{"kind":"sphere"}` or
/// `{"kind":"torus","tau":[0.0,1.0]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer; on
/// success `*out` owns the handle and must be released with
/// [`lf_kernel_free`].
#[no_mangle]
pub unsafe extern "C" fn lf_kernel_from_json(
    json: *const c_char,
    out: *mut *mut LfKernel,
) -> LfStatus {
    guarded(|| {
        let inner: SurfaceKernel = match parse_json(json, "kernel descriptor") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match store(out, Box::into_raw(Box::new(LfKernel { inner }))) {
            Ok(()) => LfStatus::Ok,
            Err(s) => s,
        }
    })
}

/// Release a kernel handle. Null is ignored.
///
/// # Safety
/// `kernel` must be null or a pointer previously returned by this library
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_kernel_free(kernel: *mut LfKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Build a matrix Laurent series from its JSON document, e.g.
/// `{"rank":1,"lead":-1,"coeffs":[[[[1.0,0.0]]]]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer; on
/// success `*out` owns the handle and must be released with
/// [`lf_series_free`].
#[no_mangle]
pub unsafe extern "C" fn lf_series_from_json(
    json: *const c_char,
    out: *mut *mut LfSeries,
) -> LfStatus {
    guarded(|| {
        let inner: MatrixLaurentSeries = match parse_json(json, "series") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match store(out, Box::into_raw(Box::new(LfSeries { inner }))) {
            Ok(()) => LfStatus::Ok,
            Err(s) => s,
        }
    })
}

/// Release a series handle. Null is ignored.
///
/// # Safety
/// `series` must be null or a pointer previously returned by this library
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_series_free(series: *mut LfSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Build a coefficient table from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer; on
/// success `*out` owns the handle and must be released with
/// [`lf_table_free`].
#[no_mangle]
pub unsafe extern "C" fn lf_table_from_json(
    json: *const c_char,
    out: *mut *mut LfTable,
) -> LfStatus {
    guarded(|| {
        let inner: KernelCoefficients = match parse_json(json, "coefficient table") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match store(out, Box::into_raw(Box::new(LfTable { inner }))) {
            Ok(()) => LfStatus::Ok,
            Err(s) => s,
        }
    })
}

/// Release a table handle. Null is ignored.
///
/// # Safety
/// `table` must be null or a pointer previously returned by this library
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_table_free(table: *mut LfTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Serialize a table back to JSON. The returned string must be released
/// with [`lf_string_free`].
///
/// # Safety
/// `table` must be a live table handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_table_to_json(
    table: *const LfTable,
    out: *mut *mut c_char,
) -> LfStatus {
    guarded(|| {
        let table = match deref(table, "table") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let text = match serde_json::to_string(&table.inner) {
            Ok(t) => t,
            Err(e) => {
                set_error(format!("cannot serialize table: {e}"));
                return LfStatus::Invalid;
            }
        };
        let c = match CString::new(text) {
            Ok(c) => c,
            Err(_) => {
                set_error("serialized table contained a NUL byte".into());
                return LfStatus::Invalid;
            }
        };
        match store(out, c.into_raw()) {
            Ok(()) => LfStatus::Ok,
            Err(s) => s,
        }
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string pointer previously returned by this library
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Extract the coefficient window `[nmin, nmax] x [mmin, mmax]` from a
/// kernel by sampling both variables on circles of the given radius.
///
/// # Safety
/// `kernel` must be a live kernel handle and `out` a valid pointer; on
/// success `*out` owns the new table.
#[no_mangle]
pub unsafe extern "C" fn lf_extract(
    kernel: *const LfKernel,
    nmin: i32,
    nmax: i32,
    mmin: i32,
    mmax: i32,
    radius: f64,
    samples: usize,
    out: *mut *mut LfTable,
) -> LfStatus {
    guarded(|| {
        let kernel = match deref(kernel, "kernel") {
            Ok(k) => k,
            Err(s) => return s,
        };
        let grid = ExtractGrid {
            radius_z: radius,
            radius_t: radius,
            samples,
        };
        match extract_window(&kernel.inner, nmin, nmax, mmin, mmax, &grid) {
            Ok(inner) => match store(out, Box::into_raw(Box::new(LfTable { inner }))) {
                Ok(()) => LfStatus::Ok,
                Err(s) => s,
            },
            Err(e) => fail(&e),
        }
    })
}

/// Read one coefficient; indices outside the stored window read as zero.
///
/// # Safety
/// `table` must be a live table handle; `out_re` and `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_table_get(
    table: *const LfTable,
    n: i32,
    m: i32,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LfStatus {
    guarded(|| {
        let table = match deref(table, "table") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let v = table.inner.get(n, m);
        match store(out_re, v.re).and_then(|()| store(out_im, v.im)) {
            Ok(()) => LfStatus::Ok,
            Err(s) => s,
        }
    })
}

/// Pair two cocycles through a coefficient table (the series route).
///
/// # Safety
/// All handles must be live; `out_re` and `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_pair_series(
    f1: *const LfSeries,
    f2: *const LfSeries,
    table: *const LfTable,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LfStatus {
    guarded(|| {
        let (f1, f2, table) = match (
            deref(f1, "series"),
            deref(f2, "series"),
            deref(table, "table"),
        ) {
            (Ok(a), Ok(b), Ok(t)) => (a, b, t),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        };
        match omega_series(&f1.inner, &f2.inner, &table.inner) {
            Ok(r) => match store(out_re, r.complex.re).and_then(|()| store(out_im, r.complex.im)) {
                Ok(()) => LfStatus::Ok,
                Err(s) => s,
            },
            Err(e) => fail(&e),
        }
    })
}

/// Pair two cocycles by double contour quadrature against the kernel.
///
/// # Safety
/// All handles must be live; `out_re` and `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_pair_quadrature(
    f1: *const LfSeries,
    f2: *const LfSeries,
    kernel: *const LfKernel,
    nodes: usize,
    radius: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LfStatus {
    guarded(|| {
        let (f1, f2, kernel) = match (
            deref(f1, "series"),
            deref(f2, "series"),
            deref(kernel, "kernel"),
        ) {
            (Ok(a), Ok(b), Ok(k)) => (a, b, k),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        };
        let grid = QuadratureGrid { nodes, radius };
        match omega_quadrature(&f1.inner, &f2.inner, &kernel.inner, &grid) {
            Ok(r) => match store(out_re, r.complex.re).and_then(|()| store(out_im, r.complex.im)) {
                Ok(()) => LfStatus::Ok,
                Err(s) => s,
            },
            Err(e) => fail(&e),
        }
    })
}

/// Double contour moment of the monomial pair `(z^n t^m, z^r t^l)`.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lf_moment(
    n: i32,
    m: i32,
    r: i32,
    l: i32,
    nodes: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LfStatus {
    guarded(|| match moment_integral(n, m, r, l, nodes) {
        Ok(v) => match store(out_re, v.re).and_then(|()| store(out_im, v.im)) {
            Ok(()) => LfStatus::Ok,
            Err(s) => s,
        },
        Err(e) => fail(&e),
    })
}
