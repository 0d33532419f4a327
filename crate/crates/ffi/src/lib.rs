//! C ABI over `cliffpde`.
//!
//! Every entry point returns a [`CpStatus`]; on failure a message is kept in
//! thread-local storage and can be read with [`cp_last_error`]. Strings handed
//! out by the library must be released with [`cp_string_free`], multivector
//! handles with [`cp_multivector_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cliffpde::kernels::{calibrate_c, monogenic_kernel, zonal_harmonic};
use cliffpde::spaces;
use cliffpde::verify::{run_suite, Suite};
use cliffpde::{Error, Multivector};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Math = 5,
    Uncalibrated = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpKernelKind {
    Zonal = 0,
    Monogenic = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CpDims {
    pub dim_hk: usize,
    pub rank_mk: usize,
    pub rank_mk_minus_1: usize,
}

/// Opaque multivector with exact rational coefficients.
pub struct CpMultivector {
    inner: Multivector,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Fail(CpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => CpStatus::Parse,
            Error::Uncalibrated { .. } | Error::Calibration(_) => CpStatus::Uncalibrated,
            Error::Config(_) | Error::DimensionTooLarge(..) | Error::IndexOutOfRange { .. } => {
                CpStatus::InvalidArgument
            }
            _ => CpStatus::Math,
        };
        Fail(status, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside cliffpde");
            CpStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CpStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CpStatus::InvalidUtf8, "string argument is not UTF-8".into()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(CpStatus::NullPointer, "null handle".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(CpStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Fail> {
    let c = CString::new(text).map_err(|_| Fail(CpStatus::Math, "interior NUL in output".into()))?;
    write_out(out, c.into_raw())
}

unsafe fn write_handle(out: *mut *mut CpMultivector, inner: Multivector) -> Result<(), Fail> {
    write_out(out, Box::into_raw(Box::new(CpMultivector { inner })))
}

fn check_m(m: usize) -> Result<(), Fail> {
    if m < 3 {
        return Err(Fail(CpStatus::InvalidArgument, format!("dimension m={m} must be at least 3")));
    }
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse text such as `"1/2*e{} + -3*e{1,2}"` in the Clifford algebra of dimension `m`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_multivector_parse(text: *const c_char, m: usize, out: *mut *mut CpMultivector) -> CpStatus {
    guard(|| {
        let text = read_str(text)?;
        let mv = Multivector::parse(text, m)?;
        write_handle(out, mv)
    })
}

/// # Safety
/// `mv` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cp_multivector_free(mv: *mut CpMultivector) {
    if !mv.is_null() {
        drop(Box::from_raw(mv));
    }
}

/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_multivector_product(
    a: *const CpMultivector,
    b: *const CpMultivector,
    out: *mut *mut CpMultivector,
) -> CpStatus {
    guard(|| {
        let p = deref(a)?.inner.geometric_product(&deref(b)?.inner)?;
        write_handle(out, p)
    })
}

/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_multivector_reversion(a: *const CpMultivector, out: *mut *mut CpMultivector) -> CpStatus {
    guard(|| write_handle(out, deref(a)?.inner.reversion()))
}

/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_multivector_to_string(a: *const CpMultivector, out: *mut *mut c_char) -> CpStatus {
    guard(|| write_string(out, deref(a)?.inner.to_string()))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_dims(m: usize, k: usize, out: *mut CpDims) -> CpStatus {
    guard(|| {
        check_m(m)?;
        let d = spaces::dims(m, k)?;
        write_out(
            out,
            CpDims {
                dim_hk: d.dim_hk,
                rank_mk: d.rank_mk,
                rank_mk_minus_1: d.rank_mkm1,
            },
        )
    })
}

/// Run a named identity suite (`green-scalar`, `green-clifford`, `self-adjoint`,
/// `stokes`, `connection`, `maxwell`) and return its JSON report.
/// `*passed` is set to 1 when every case passes.
///
/// # Safety
/// `suite` must be a NUL-terminated string; `out_json` and `passed` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cp_verify_json(
    suite: *const c_char,
    m: usize,
    k: usize,
    seed: u64,
    cases: usize,
    out_json: *mut *mut c_char,
    passed: *mut i32,
) -> CpStatus {
    guard(|| {
        let name = read_str(suite)?;
        let suite = Suite::parse(name)
            .ok_or_else(|| Fail(CpStatus::InvalidArgument, format!("unknown suite {name:?}")))?;
        check_m(m)?;
        let cases = if cases == 0 { suite.default_cases() } else { cases };
        let report = run_suite(suite, m, k, seed, cases)?;
        write_out(passed, i32::from(report.pass()))?;
        write_string(out_json, report.to_json().to_string())
    })
}

/// Exact reproducing kernel of degree `k` as JSON.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_kernel_json(kind: CpKernelKind, m: usize, k: usize, out_json: *mut *mut c_char) -> CpStatus {
    guard(|| {
        check_m(m)?;
        let kernel = match kind {
            CpKernelKind::Zonal => zonal_harmonic(m, k)?,
            CpKernelKind::Monogenic => monogenic_kernel(m, k)?,
        };
        let text = serde_json::to_string(&kernel.to_json()).map_err(|e| Fail(CpStatus::Math, e.to_string()))?;
        write_string(out_json, text)
    })
}

/// Numerically calibrate the fundamental-solution constant for `(m, k)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_calibrate(m: usize, k: usize, out: *mut f64) -> CpStatus {
    guard(|| {
        check_m(m)?;
        write_out(out, calibrate_c(m, k)?.c)
    })
}
