//! C ABI for the qdicut simulator.
//!
//! Conventions: handles are opaque pointers created and freed by this
//! library; every fallible call returns a [`QdStatus`] and writes results
//! through out-pointers; the last error message per thread is available
//! via [`qdicut_last_error`]. Strings returned by the library are freed
//! with [`qdicut_string_free`]. The generated header lives in
//! `include/qdicut.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qdicut::classes::{oblivious_value_exact, snapshot, BiasClassConfig};
use qdicut::estimator::{full_estimate, EstimateOptions, EstimatorParams, Sampling};
use qdicut::exact::{parse_decimal, to_f64};
use qdicut::graph::{gen_random, max_dicut_bruteforce, parse_stream, EdgeStream};
use qdicut::QdError;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdStatus {
    QdOk = 0,
    QdNullPointer = 1,
    QdInvalidUtf8 = 2,
    QdParseError = 3,
    QdInvalidParam = 4,
    QdTooLarge = 5,
    QdIoError = 6,
    QdInternal = 7,
}

/// Opaque edge stream handle.
pub struct QdStream {
    inner: EdgeStream,
}

/// Opaque bias-class configuration handle.
pub struct QdClasses {
    inner: BiasClassConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let safe = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = safe);
}

fn status_of(err: &QdError) -> QdStatus {
    match err {
        QdError::Parse { .. } => QdStatus::QdParseError,
        QdError::Config(_) | QdError::Param(_) => QdStatus::QdInvalidParam,
        QdError::TooLarge(_) => QdStatus::QdTooLarge,
        QdError::Io(_) => QdStatus::QdIoError,
    }
}

fn fail(err: &QdError) -> QdStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guard<F: FnOnce() -> QdStatus>(f: F) -> QdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            QdStatus::QdInternal
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, QdStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(QdStatus::QdNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        QdStatus::QdInvalidUtf8
    })
}

/// Message for the most recent error on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn qdicut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static library version string.
#[no_mangle]
pub extern "C" fn qdicut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses the line-oriented stream format ("n m" header, then edges).
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdicut_stream_parse(
    text: *const c_char,
    out: *mut *mut QdStream,
) -> QdStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return QdStatus::QdNullPointer;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_stream(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QdStream { inner }));
                QdStatus::QdOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Seeded directed G(n, p) stream.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdicut_stream_generate(
    n: u32,
    p: f64,
    seed: u64,
    out: *mut *mut QdStream,
) -> QdStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return QdStatus::QdNullPointer;
        }
        match gen_random(n, p, seed) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QdStream { inner }));
                QdStatus::QdOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `stream` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn qdicut_stream_free(stream: *mut QdStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// Vertex count of a stream handle (0 for null).
///
/// # Safety
/// `stream` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn qdicut_stream_vertices(stream: *const QdStream) -> u32 {
    stream.as_ref().map_or(0, |s| s.inner.n())
}

/// Edge count of a stream handle (0 for null).
///
/// # Safety
/// `stream` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn qdicut_stream_edges(stream: *const QdStream) -> u64 {
    stream.as_ref().map_or(0, |s| s.inner.m() as u64)
}

/// Brute-force maximum directed cut (capped at 24 vertices).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdicut_max_dicut(stream: *const QdStream, out: *mut u64) -> QdStatus {
    guard(|| {
        let (Some(stream), false) = (stream.as_ref(), out.is_null()) else {
            set_error("null pointer");
            return QdStatus::QdNullPointer;
        };
        match max_dicut_bruteforce(&stream.inner) {
            Ok(v) => {
                *out = v;
                QdStatus::QdOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Parses a bias-class configuration from TOML text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qdicut_classes_parse(
    text: *const c_char,
    out: *mut *mut QdClasses,
) -> QdStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return QdStatus::QdNullPointer;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match BiasClassConfig::from_toml_str(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QdClasses { inner }));
                QdStatus::QdOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `classes` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn qdicut_classes_free(classes: *mut QdClasses) {
    if !classes.is_null() {
        drop(Box::from_raw(classes));
    }
}

/// Exact oblivious value `r^T S (1 - r)` of the stream's snapshot.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qdicut_oblivious_value(
    stream: *const QdStream,
    classes: *const QdClasses,
    out: *mut f64,
) -> QdStatus {
    guard(|| {
        let (Some(stream), Some(classes), false) = (stream.as_ref(), classes.as_ref(), out.is_null())
        else {
            set_error("null pointer");
            return QdStatus::QdNullPointer;
        };
        let snap = snapshot(&stream.inner, &classes.inner);
        match oblivious_value_exact(&snap, &classes.inner) {
            Ok(v) => {
                *out = to_f64(&v);
                QdStatus::QdOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Estimation knobs for [`qdicut_estimate_json`]. `eps` is an exact
/// decimal string such as "0.25".
#[repr(C)]
pub struct QdEstimatorParams {
    pub eps: *const c_char,
    pub kappa: u32,
    pub capacity_const: u64,
    pub copies_per_pair: u64,
    pub med_reps: u32,
    pub correction: f64,
    pub seed: u64,
    /// 0 = literal per-copy simulation, 1 = per-copy outcome sampling,
    /// 2 = aggregate count sampling.
    pub sampling: u32,
    /// Nonzero: include the brute-force optimum (small instances only).
    pub with_opt: u8,
}

/// Runs the full estimation pipeline; on success writes a heap-allocated
/// JSON report string to `out` (free with [`qdicut_string_free`]).
///
/// # Safety
/// Pointers must be valid; `params.eps` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qdicut_estimate_json(
    stream: *const QdStream,
    classes: *const QdClasses,
    params: *const QdEstimatorParams,
    out: *mut *mut c_char,
) -> QdStatus {
    guard(|| {
        let (Some(stream), Some(classes), Some(params), false) =
            (stream.as_ref(), classes.as_ref(), params.as_ref(), out.is_null())
        else {
            set_error("null pointer");
            return QdStatus::QdNullPointer;
        };
        let eps = match read_str(params.eps) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let eps = match parse_decimal(eps) {
            Ok(e) => e,
            Err(e) => return fail(&e),
        };
        let est = EstimatorParams {
            eps,
            kappa: params.kappa,
            capacity_const: params.capacity_const,
            copies_per_pair: params.copies_per_pair,
            med_reps: params.med_reps,
            correction: params.correction,
            seed: params.seed,
        };
        let sampling = match params.sampling {
            0 => Sampling::Literal,
            1 => Sampling::Schedule,
            2 => Sampling::Counts,
            _ => {
                set_error("sampling must be 0, 1 or 2");
                return QdStatus::QdInvalidParam;
            }
        };
        let opts = EstimateOptions { sampling, with_opt: params.with_opt != 0, with_exact: false };
        match full_estimate(&stream.inner, &classes.inner, &est, opts) {
            Ok(report) => {
                let json = serde_json::to_string(&report).expect("serializable report");
                *out = CString::new(json).expect("no NUL in JSON").into_raw();
                QdStatus::QdOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qdicut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn parse_query_and_free_roundtrip() {
        unsafe {
            let mut stream: *mut QdStream = ptr::null_mut();
            let text = c("3 2\n0 1\n1 2\n");
            assert_eq!(qdicut_stream_parse(text.as_ptr(), &mut stream), QdStatus::QdOk);
            assert_eq!(qdicut_stream_vertices(stream), 3);
            assert_eq!(qdicut_stream_edges(stream), 2);
            let mut opt = 0u64;
            assert_eq!(qdicut_max_dicut(stream, &mut opt), QdStatus::QdOk);
            assert_eq!(opt, 1);
            qdicut_stream_free(stream);
        }
    }

    #[test]
    fn errors_set_codes_and_messages() {
        unsafe {
            let mut stream: *mut QdStream = ptr::null_mut();
            let bad = c("2 1\n0 0\n");
            assert_eq!(qdicut_stream_parse(bad.as_ptr(), &mut stream), QdStatus::QdParseError);
            let msg = CStr::from_ptr(qdicut_last_error()).to_str().unwrap();
            assert!(msg.contains("self-loop"), "{msg}");
            assert_eq!(qdicut_stream_parse(ptr::null(), &mut stream), QdStatus::QdNullPointer);
            assert_eq!(qdicut_max_dicut(ptr::null(), &mut 0), QdStatus::QdNullPointer);
        }
    }

    #[test]
    fn oblivious_value_and_estimate_json() {
        unsafe {
            let mut stream: *mut QdStream = ptr::null_mut();
            assert_eq!(qdicut_stream_generate(6, 0.5, 3, &mut stream), QdStatus::QdOk);
            let mut classes: *mut QdClasses = ptr::null_mut();
            let toml = c("ell = 2\nt = [\"-1\", \"0\"]\nr = [\"0.2\", \"0.9\"]\nalpha = 0.0\n");
            assert_eq!(qdicut_classes_parse(toml.as_ptr(), &mut classes), QdStatus::QdOk);

            let mut value = -1.0;
            assert_eq!(qdicut_oblivious_value(stream, classes, &mut value), QdStatus::QdOk);
            assert!(value >= 0.0);

            let eps = c("0.5");
            let params = QdEstimatorParams {
                eps: eps.as_ptr(),
                kappa: 2,
                capacity_const: 32,
                copies_per_pair: 5_000,
                med_reps: 3,
                correction: 0.0,
                seed: 11,
                sampling: 2,
                with_opt: 1,
            };
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(qdicut_estimate_json(stream, classes, &params, &mut json), QdStatus::QdOk);
            let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
            qdicut_string_free(json);
            let report: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert!(report["estimate"].is_number());
            assert!(report["opt"].is_number());

            // determinism across calls
            let mut json2: *mut c_char = ptr::null_mut();
            assert_eq!(qdicut_estimate_json(stream, classes, &params, &mut json2), QdStatus::QdOk);
            let text2 = CStr::from_ptr(json2).to_str().unwrap().to_owned();
            qdicut_string_free(json2);
            assert_eq!(text, text2);

            qdicut_classes_free(classes);
            qdicut_stream_free(stream);
        }
    }

    #[test]
    fn header_is_committed_and_mentions_every_symbol() {
        let header = include_str!("../include/qdicut.h");
        for sym in [
            "qdicut_last_error",
            "qdicut_version",
            "qdicut_stream_parse",
            "qdicut_stream_generate",
            "qdicut_stream_free",
            "qdicut_stream_vertices",
            "qdicut_stream_edges",
            "qdicut_max_dicut",
            "qdicut_classes_parse",
            "qdicut_classes_free",
            "qdicut_oblivious_value",
            "qdicut_estimate_json",
            "qdicut_string_free",
        ] {
            assert!(header.contains(sym), "header missing {sym}");
        }
    }
}
