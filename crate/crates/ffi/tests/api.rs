use std::ffi::{c_char, CStr, CString};
use std::ptr;

use dualshift_ffi::*;

const PDATA: &str = include_str!("../../core/fixtures/pdata.mj");
const PFUN: &str = include_str!("../../core/fixtures/pfun.mj");

fn parse(src: &str) -> *mut DsProgram {
    let c = CString::new(src).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ds_program_parse(c.as_ptr(), &mut p) }, DsStatus::Ok);
    p
}

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { ds_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ds_last_error()) }.to_str().unwrap().to_owned()
}

#[test]
fn transform_matches_fixture() {
    let p = parse(PDATA);
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { ds_transform(p, DsDirection::ToVisitor, &mut q) }, DsStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ds_program_pretty(q, &mut s) }, DsStatus::Ok);
    assert_eq!(take(s), PFUN);
    unsafe {
        ds_program_free(q);
        ds_program_free(p);
    }
}

#[test]
fn detect_roundtrip_and_evaluate() {
    let p = parse(PFUN);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ds_detect(p, &mut s) }, DsStatus::Ok);
    assert_eq!(take(s), "FunctionOriented");
    assert_eq!(unsafe { ds_roundtrip(p) }, DsStatus::Ok);
    let entry = CString::new("new Add(new Num(1), new Num(2)).show()").unwrap();
    assert_eq!(unsafe { ds_evaluate(p, entry.as_ptr(), &mut s) }, DsStatus::Ok);
    assert_eq!(take(s), "\"(1+2)\"");
    unsafe { ds_program_free(p) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let bad = CString::new("class {").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ds_program_parse(bad.as_ptr(), &mut p) }, DsStatus::ParseError);
    assert!(p.is_null());
    assert!(!last_error().is_empty());

    let ill = CString::new("class A { int f() { return true; } }").unwrap();
    assert_eq!(unsafe { ds_program_parse(ill.as_ptr(), &mut p) }, DsStatus::TypeError);

    let p = parse(PDATA);
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { ds_transform(p, DsDirection::ToComposite, &mut q) }, DsStatus::Refused);
    assert!(q.is_null());
    assert!(last_error().contains("not function-oriented"), "{}", last_error());

    let entry = CString::new("new Num(1).missing()").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ds_evaluate(p, entry.as_ptr(), &mut s) }, DsStatus::EvalError);

    assert_eq!(unsafe { ds_detect(ptr::null(), &mut s) }, DsStatus::NullArgument);
    assert_eq!(unsafe { ds_program_pretty(p, ptr::null_mut()) }, DsStatus::NullArgument);
    assert_eq!(unsafe { ds_detect(p, &mut s) }, DsStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe {
        ds_string_free(s);
        ds_program_free(p);
        ds_program_free(ptr::null_mut());
        ds_string_free(ptr::null_mut());
    }
}
