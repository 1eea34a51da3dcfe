//! Exercise the C surface end to end from Rust.

use spongedim_ffi::*;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

const SPEC: &str = r#"{
    "dimension": 2,
    "maps": [
        { "ratios": ["9/20", "1/5"], "translation": ["0", "0"] },
        { "ratios": ["9/20", "1/5"], "translation": ["0", "1/2"] },
        { "ratios": ["9/20", "1/5"], "translation": ["11/20", "0"] }
    ],
    "weights": ["1/3", "1/3", "1/3"]
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    spongedim_string_free(p);
    s
}

#[test]
fn parse_query_and_free_handle() {
    unsafe {
        let spec = c(SPEC);
        let mut handle: *mut SpongedimSystem = ptr::null_mut();
        assert_eq!(spongedim_system_parse(spec.as_ptr(), &mut handle), SPONGEDIM_OK);
        assert_eq!(spongedim_system_dimension(handle), 2);
        assert_eq!(spongedim_system_map_count(handle), 3);
        assert_eq!(spongedim_system_dominates(handle, 1, 2), 1);
        assert_eq!(spongedim_system_dominates(handle, 2, 1), 0);
        assert_eq!(spongedim_system_dominates(handle, 0, 1), -1);

        let scale = c("1/4");
        let cycle = [1u32];
        let l = spongedim_stopping_time(handle, ptr::null(), 0, cycle.as_ptr(), 1, scale.as_ptr(), 1);
        // (9/20)^2 = 81/400 <= 1/4 < 9/20
        assert_eq!(l, 2);
        spongedim_system_free(handle);
    }
}

#[test]
fn invalid_spec_reports_error() {
    unsafe {
        let spec = c(r#"{"dimension": 1, "maps": [{ "ratios": ["1/2"], "translation": ["3/4"] }]}"#);
        let mut handle: *mut SpongedimSystem = ptr::null_mut();
        assert_eq!(spongedim_system_parse(spec.as_ptr(), &mut handle), SPONGEDIM_INVALID);
        let msg = CStr::from_ptr(spongedim_last_error()).to_str().unwrap();
        assert!(msg.contains("escapes"), "{msg}");
    }
}

#[test]
fn run_commands_through_the_abi() {
    unsafe {
        let spec = c(SPEC);
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(spongedim_run_validate(spec.as_ptr(), &mut out), SPONGEDIM_OK);
        let report = take_string(out);
        assert!(report.contains("\"very_strong\": true"));

        let mut out: *mut c_char = ptr::null_mut();
        let measure = c("given");
        let oracle = c("off");
        assert_eq!(
            spongedim_run_dims(spec.as_ptr(), measure.as_ptr(), 7, oracle.as_ptr(), 0, &mut out),
            SPONGEDIM_OK
        );
        let report = take_string(out);
        assert!(report.contains("\"assouad_lo\""));

        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(spongedim_render_svg(spec.as_ptr(), 1, &mut out), SPONGEDIM_OK);
        let svg = take_string(out);
        assert!(svg.starts_with("<svg"));
    }
}

#[test]
fn gap_is_not_applicable_in_three_dimensions() {
    unsafe {
        let spec = c(r#"{
            "dimension": 3,
            "maps": [
                { "ratios": ["1/2", "1/3", "1/4"], "translation": ["0", "0", "0"] },
                { "ratios": ["1/4", "1/3", "1/2"], "translation": ["1/2", "1/2", "1/2"] }
            ]
        }"#);
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(spongedim_run_gap(spec.as_ptr(), 1, &mut out), SPONGEDIM_NOT_APPLICABLE);
        let report = take_string(out);
        assert!(report.contains("planar"));
    }
}
