use std::ffi::{CStr, CString};
use std::ptr;

use confluent_susy_ffi::*;
use serde_json::Value;

fn config(json: &str) -> *mut SusyConfig {
    let text = CString::new(json).unwrap();
    let mut cfg = ptr::null_mut();
    let status = unsafe { susy_config_from_json(text.as_ptr(), &mut cfg) };
    assert_eq!(status, SusyStatus::Ok, "{}", last_error());
    cfg
}

fn last_error() -> String {
    let p = susy_last_error();
    if p.is_null() {
        return String::new();
    }
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn curve(t: *const SusyTransform, which: SusyCurve) -> Result<Vec<f64>, SusyStatus> {
    let mut len = 0;
    let status = unsafe { susy_transform_curve(t, which, ptr::null_mut(), 0, &mut len) };
    if status != SusyStatus::Ok {
        return Err(status);
    }
    let mut v = vec![0.0; len];
    let status = unsafe { susy_transform_curve(t, which, v.as_mut_ptr(), v.len(), &mut len) };
    assert_eq!(status, SusyStatus::Ok);
    Ok(v)
}

#[test]
fn default_spectrum_through_the_buffer_protocol() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { susy_config_default(&mut cfg) }, SusyStatus::Ok);
    let mut len = 0;
    assert_eq!(
        unsafe { susy_spectrum(cfg, ptr::null_mut(), 0, &mut len) },
        SusyStatus::Ok
    );
    assert_eq!(len, 4);

    let mut short = [0.0; 2];
    assert_eq!(
        unsafe { susy_spectrum(cfg, short.as_mut_ptr(), 2, &mut len) },
        SusyStatus::BufferTooSmall
    );
    assert!(last_error().contains("need 4"));

    let mut eps = vec![0.0; len];
    assert_eq!(
        unsafe { susy_spectrum(cfg, eps.as_mut_ptr(), len, ptr::null_mut()) },
        SusyStatus::Ok
    );
    for (n, e) in eps.iter().enumerate() {
        assert!((e - (1.0 - 1.0 / ((n + 2) * (n + 2)) as f64)).abs() < 1e-6);
    }
    unsafe { susy_config_free(cfg) };
}

#[test]
fn config_errors_map_to_status_codes() {
    let mut cfg = ptr::null_mut();
    for bad in [
        r#"{"system": {"name": "coulomb", "ell": 1}, "bogus": 1}"#,
        "not json",
        r#"{"levels": 0}"#,
    ] {
        let text = CString::new(bad).unwrap();
        assert_eq!(
            unsafe { susy_config_from_json(text.as_ptr(), &mut cfg) },
            SusyStatus::Config
        );
        assert!(cfg.is_null());
        assert!(!last_error().is_empty());
    }
    assert_eq!(
        unsafe { susy_config_from_json(ptr::null(), &mut cfg) },
        SusyStatus::NullPointer
    );
    let latin1 = CString::new(vec![b'{', 0xe9, b'}']).unwrap();
    assert_eq!(
        unsafe { susy_config_from_json(latin1.as_ptr(), &mut cfg) },
        SusyStatus::InvalidUtf8
    );
    assert_eq!(
        unsafe { susy_transform(ptr::null(), ptr::null_mut()) },
        SusyStatus::NullPointer
    );
    unsafe {
        susy_config_free(ptr::null_mut());
        susy_transform_free(ptr::null_mut());
        susy_string_free(ptr::null_mut());
    }
}

#[test]
fn config_round_trips_through_json() {
    let cfg = config(r#"{"system": {"name": "trig"}, "m": 2.0}"#);
    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { susy_config_to_json(cfg, &mut text) },
        SusyStatus::Ok
    );
    let json = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["system"]["name"], "trig");
    assert_eq!(v["m"], 2.0);
    let again = config(&json);
    unsafe {
        susy_string_free(text);
        susy_config_free(cfg);
        susy_config_free(again);
    }
}

#[test]
fn coulomb_transform_curves() {
    let cfg = config(r#"{"system": {"name": "coulomb", "ell": 1}}"#);
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { susy_transform(cfg, &mut t) },
        SusyStatus::Ok,
        "{}",
        last_error()
    );
    assert!(unsafe { susy_transform_is_regular(t) });
    assert!((unsafe { susy_transform_lambda(t) } - 0.75).abs() < 1e-12);
    let x = curve(t, SusyCurve::X).unwrap();
    for which in [
        SusyCurve::U0,
        SusyCurve::U1,
        SusyCurve::Wronskian,
        SusyCurve::Q0,
        SusyCurve::Q1,
    ] {
        let y = curve(t, which).unwrap();
        assert_eq!(y.len(), x.len());
        assert!(y.iter().all(|v| v.is_finite()));
    }
    // U0 = 2/x² − 2/x + 1 for ℓ = 1
    let u0 = curve(t, SusyCurve::U0).unwrap();
    let i = x.len() / 3;
    assert!((u0[i] - (2.0 / (x[i] * x[i]) - 2.0 / x[i] + 1.0)).abs() < 1e-12);
    unsafe {
        susy_transform_free(t);
        susy_config_free(cfg);
    }
}

#[test]
fn singular_transformation_needs_permission() {
    let cfg = config(r#"{"transform": {"w0": 12.0}}"#);
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { susy_transform(cfg, &mut t) },
        SusyStatus::Regularity
    );
    assert!(t.is_null());
    assert!(last_error().contains("singular"));

    let allowed = config(r#"{"transform": {"w0": 12.0, "allow_singular": true}}"#);
    assert_eq!(unsafe { susy_transform(allowed, &mut t) }, SusyStatus::Ok);
    assert!(!unsafe { susy_transform_is_regular(t) });
    assert_eq!(curve(t, SusyCurve::Q1), Err(SusyStatus::Unavailable));
    assert!(curve(t, SusyCurve::U1).is_ok());
    unsafe {
        susy_transform_free(t);
        susy_config_free(cfg);
        susy_config_free(allowed);
    }
}

#[test]
fn verify_returns_a_report_on_success_and_failure() {
    let check = |json: &str, want: SusyStatus| -> Value {
        let cfg = config(json);
        let mut report = ptr::null_mut();
        assert_eq!(
            unsafe { susy_verify(cfg, &mut report) },
            want,
            "{}",
            last_error()
        );
        assert!(!report.is_null());
        let v = serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
        unsafe {
            susy_string_free(report);
            susy_config_free(cfg);
        }
        v
    };
    let ok = check(r#"{"system": {"name": "trig"}}"#, SusyStatus::Ok);
    assert_eq!(ok["passed"], true);
    let singular = check(r#"{"transform": {"w0": 12.0}}"#, SusyStatus::Regularity);
    assert_eq!(singular["regular"], false);
}
