use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use cantor_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    cantor_string_free(s);
    out
}

#[test]
fn preimage_through_handles() {
    unsafe {
        let mut map = ptr::null_mut();
        assert_eq!(cantor_map_from_json(c("fold").as_ptr(), &mut map), CantorStatus::Ok);
        let mut set = ptr::null_mut();
        assert_eq!(cantor_clopen_from_json(c(r#"{"antichain":["0"]}"#).as_ptr(), &mut set), CantorStatus::Ok);
        let mut pre = ptr::null_mut();
        assert_eq!(cantor_map_preimage(map, set, &mut pre), CantorStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(cantor_clopen_to_json(pre, &mut s), CantorStatus::Ok);
        assert_eq!(take(s), r#"{"antichain":["00","11"]}"#);

        let mut comp = ptr::null_mut();
        assert_eq!(cantor_clopen_boolop(CantorBoolOp::Complement, pre, ptr::null(), &mut comp), CantorStatus::Ok);
        let mut mu = ptr::null_mut();
        assert_eq!(
            cantor_measure_from_json(c(r#"{"kind":"bernoulli","p":"1/3"}"#).as_ptr(), &mut mu),
            CantorStatus::Ok
        );
        assert_eq!(cantor_measure_of(mu, comp, &mut s), CantorStatus::Ok);
        assert_eq!(take(s), "4/9");

        assert_eq!(cantor_check_preserves(map, mu, mu, 1, &mut s), CantorStatus::Negative);
        assert_eq!(take(s), r#"{"result":"violated","witness":"0","lhs":"5/9","rhs":"1/3"}"#);

        for h in [set, pre, comp] {
            cantor_clopen_free(h);
        }
        cantor_map_free(map);
        cantor_measure_free(mu);
    }
}

#[test]
fn certificates_verify() {
    unsafe {
        let mut map = ptr::null_mut();
        cantor_map_from_json(c("fold").as_ptr(), &mut map);
        let mut mu = ptr::null_mut();
        cantor_measure_from_json(c(r#"{"kind":"bernoulli","p":"1/2"}"#).as_ptr(), &mut mu);
        let mut s = ptr::null_mut();
        assert_eq!(cantor_approx_measure_homeo(map, mu, mu, 3, 0, &mut s), CantorStatus::Ok);
        let cert = take(s);
        assert_eq!(cantor_verify_certificate(c(&cert).as_ptr(), &mut s), CantorStatus::Ok);
        assert_eq!(take(s), "[]");
        let tampered = cert.replacen("\"depth\":3", "\"depth\":4", 1);
        assert_eq!(cantor_verify_certificate(c(&tampered).as_ptr(), &mut s), CantorStatus::Negative);
        assert_ne!(take(s), "[]");

        let mut third = ptr::null_mut();
        cantor_measure_from_json(c(r#"{"kind":"bernoulli","p":"1/3"}"#).as_ptr(), &mut third);
        assert_eq!(cantor_approx_measure_homeo(map, third, third, 1, 0, &mut s), CantorStatus::Negative);
        assert!(CStr::from_ptr(cantor_last_error()).to_str().unwrap().contains("5/9"));
        cantor_map_free(map);
        cantor_measure_free(mu);
        cantor_measure_free(third);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(cantor_clopen_from_json(c("{oops").as_ptr(), &mut set), CantorStatus::Parse);
        assert!(set.is_null() && !cantor_last_error().is_null());
        assert_eq!(cantor_clopen_from_json(ptr::null(), &mut set), CantorStatus::NullArgument);
        let mut s = ptr::null_mut();
        assert_eq!(cantor_clopen_to_json(ptr::null(), &mut s), CantorStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(cantor_clopen_from_json(bad.as_ptr() as *const c_char, &mut set), CantorStatus::InvalidUtf8);
        cantor_string_free(ptr::null_mut());
        cantor_clopen_free(ptr::null_mut());
    }
}

#[test]
fn command_lines() {
    let args: Vec<CString> = ["cantor", "canon", "--words", r#"["00","01"]"#].iter().map(|a| c(a)).collect();
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut code: c_int = -1;
    let (mut out, mut err) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(cantor_run(argv.len() as c_int, argv.as_ptr(), &mut code, &mut out, &mut err), CantorStatus::Ok);
        assert_eq!((code, take(out), take(err)), (0, "{\"antichain\":[\"0\"]}\n".to_string(), String::new()));
    }
}
