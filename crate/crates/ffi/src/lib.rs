//! C interface to the dualshift engine.
//!
//! Programs cross the boundary as opaque `DsProgram` handles. Every call
//! returns a `DsStatus`; on anything but `DS_STATUS_OK` the message is
//! available from `ds_last_error` until the next call on the same thread.
//! Strings handed out by the library must be released with `ds_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dualshift::duality::{roundtrip_check, transform_program, TransformDirection, TransformError};
use dualshift::interp::evaluate;
use dualshift::lang::{parse, parse_expr, pretty, typecheck, Diagnostic, Program};
use dualshift::lens::{classify, coverage_matrix, detect_hierarchy, explain};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    TypeError = 4,
    Refused = 5,
    EvalError = 6,
    Breach = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsDirection {
    ToVisitor = 0,
    ToComposite = 1,
}

/// Opaque handle to a parsed, type-checked program.
pub struct DsProgram {
    program: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Fallible<T> = Result<T, (DsStatus, String)>;

fn guard(f: impl FnOnce() -> Fallible<()>) -> DsStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DsStatus::Panic
        }
    }
}

fn lines(ds: &[Diagnostic]) -> String {
    ds.iter().map(Diagnostic::to_string).collect::<Vec<_>>().join("\n")
}

unsafe fn text<'a>(s: *const c_char) -> Fallible<&'a str> {
    if s.is_null() {
        return Err((DsStatus::NullArgument, "null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (DsStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a>(p: *const DsProgram) -> Fallible<&'a Program> {
    p.as_ref().map(|h| &h.program).ok_or((DsStatus::NullArgument, "null program".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Fallible<()> {
    if out.is_null() {
        return Err((DsStatus::NullArgument, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn transform_failure(e: TransformError) -> (DsStatus, String) {
    match e {
        TransformError::Breach(_) => (DsStatus::Breach, e.to_string()),
        _ => (DsStatus::Refused, e.to_string()),
    }
}

/// Parses and type-checks `source`. On success `*out` owns a new handle.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_program_parse(source: *const c_char, out: *mut *mut DsProgram) -> DsStatus {
    guard(|| {
        let src = text(source)?;
        let program = parse(src).map_err(|ds| (DsStatus::ParseError, lines(&ds)))?;
        let errors: Vec<Diagnostic> = typecheck(&program).into_iter().filter(Diagnostic::is_error).collect();
        if !errors.is_empty() {
            return Err((DsStatus::TypeError, lines(&errors)));
        }
        put(out, Box::into_raw(Box::new(DsProgram { program })))
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_program_free(p: *mut DsProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the canonical text of `p` to `*out`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_program_pretty(p: *const DsProgram, out: *mut *mut c_char) -> DsStatus {
    guard(|| put(out, owned(pretty(handle(p)?))))
}

/// Transforms `p` in the given direction into a new handle; `p` is untouched.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_transform(p: *const DsProgram, direction: DsDirection, out: *mut *mut DsProgram) -> DsStatus {
    guard(|| {
        let d = match direction {
            DsDirection::ToVisitor => TransformDirection::ToVisitor,
            DsDirection::ToComposite => TransformDirection::ToComposite,
        };
        let program = transform_program(handle(p)?, d).map_err(transform_failure)?;
        put(out, Box::into_raw(Box::new(DsProgram { program })))
    })
}

/// Transforms to the other form and back. A textual difference is reported
/// as `DS_STATUS_BREACH` with the diff as the error message.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_roundtrip(p: *const DsProgram) -> DsStatus {
    guard(|| {
        let report = roundtrip_check(handle(p)?).map_err(transform_failure)?;
        match report.identical {
            true => Ok(()),
            false => Err((DsStatus::Breach, report.to_string())),
        }
    })
}

/// Writes the structure class explanation of `p` to `*out`, e.g.
/// `DataOriented` or `Mixed: offending column check (...)`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_detect(p: *const DsProgram, out: *mut *mut c_char) -> DsStatus {
    guard(|| {
        let program = handle(p)?;
        let h = detect_hierarchy(program).map_err(|ds| (DsStatus::Refused, lines(&ds)))?;
        let m = coverage_matrix(program, &h);
        put(out, owned(explain(&classify(&m), &m)))
    })
}

/// Evaluates the expression `entry` against `p` and writes the printed value.
///
/// # Safety
/// `p` must be a live handle, `entry` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_evaluate(p: *const DsProgram, entry: *const c_char, out: *mut *mut c_char) -> DsStatus {
    guard(|| {
        let program = handle(p)?;
        let e = parse_expr(text(entry)?).map_err(|d| (DsStatus::ParseError, d.to_string()))?;
        let v = evaluate(program, &e).map_err(|err| (DsStatus::EvalError, err.to_string()))?;
        put(out, owned(v.to_string()))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
