//! Exercises the C surface directly through the exported extern "C"
//! functions, the way a foreign binding would.

use arakelov_capi::*;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

unsafe fn take_string(ptr: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { arakelov_string_free(ptr) };
    s
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(arakelov_last_error_message())
            .to_str()
            .unwrap()
            .to_string()
    }
}

#[test]
fn fiber_lifecycle_and_divisors() {
    unsafe {
        let mut fiber = ptr::null_mut();
        assert_eq!(arakelov_fiber_new(23, 1, 1, &mut fiber), ARAKELOV_STATUS_OK);
        assert_eq!(arakelov_fiber_genus(fiber), 2);
        assert_eq!(arakelov_fiber_branch_count(fiber), 3);

        let mut json = ptr::null_mut();
        assert_eq!(arakelov_fiber_json(fiber, &mut json), ARAKELOV_STATUS_OK);
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(parsed["genus"], 2);
        assert_eq!(parsed["branches"].as_array().unwrap().len(), 3);

        let mut div = ptr::null_mut();
        assert_eq!(
            arakelov_vertical_divisor_json(fiber, 1, 0, 0, &mut div),
            ARAKELOV_STATUS_OK
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(div)).unwrap();
        let coeffs = parsed["coefficients"].as_array().unwrap();
        assert_eq!(coeffs[0]["value"], "0/1");
        assert_eq!(coeffs.last().unwrap()["value"], "-6/11");

        let mut cusp = ptr::null_mut();
        assert_eq!(
            arakelov_cuspidal_divisor_json(fiber, &mut cusp),
            ARAKELOV_STATUS_OK
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(cusp)).unwrap();
        assert_eq!(parsed["coefficients"][0]["value"], "3/11");

        let mut mat = ptr::null_mut();
        assert_eq!(
            arakelov_intersection_matrix_json(fiber, &mut mat),
            ARAKELOV_STATUS_OK
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(mat)).unwrap();
        assert_eq!(parsed["size"], 5);

        arakelov_fiber_free(fiber);
    }
}

#[test]
fn invalid_inputs_set_error_message() {
    unsafe {
        let mut fiber = ptr::null_mut();
        assert_eq!(
            arakelov_fiber_new(21, 1, 1, &mut fiber),
            ARAKELOV_STATUS_INVALID_ARGUMENT
        );
        assert!(last_error().contains("not prime"));
        assert_eq!(
            arakelov_fiber_new(23, 1, 1, ptr::null_mut()),
            ARAKELOV_STATUS_NULL_POINTER
        );
        let mut json = ptr::null_mut();
        assert_eq!(
            arakelov_fiber_json(ptr::null(), &mut json),
            ARAKELOV_STATUS_NULL_POINTER
        );
    }
}

#[test]
fn height_bound_and_ledger() {
    unsafe {
        let mut ledger = ptr::null_mut();
        assert_eq!(arakelov_ledger_default(&mut ledger), ARAKELOV_STATUS_OK);

        let mut json = ptr::null_mut();
        assert_eq!(
            arakelov_height_bound_json(101, 0, ledger, &mut json),
            ARAKELOV_STATUS_OK
        );
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(parsed["p"], 101);
        assert_eq!(parsed["genus"], 8);
        assert!(parsed["j_bound"].as_str().unwrap().contains('/'));

        // null ledger selects defaults; identical result
        let mut json2 = ptr::null_mut();
        assert_eq!(
            arakelov_height_bound_json(101, 0, ptr::null(), &mut json2),
            ARAKELOV_STATUS_OK
        );
        let parsed2: serde_json::Value = serde_json::from_str(&take_string(json2)).unwrap();
        assert_eq!(parsed, parsed2);

        // gonality precondition propagates as invalid argument
        let mut bad = ptr::null_mut();
        assert_eq!(
            arakelov_height_bound_json(61, 0, ledger, &mut bad),
            ARAKELOV_STATUS_INVALID_ARGUMENT
        );
        arakelov_ledger_free(ledger);
    }
}

#[test]
fn ledger_file_parsing() {
    unsafe {
        let dir = std::env::temp_dir().join("arakelov_capi_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ledger.txt");
        std::fs::write(&path, "#provenance: placeholder\nc_mu = 2/1\n").unwrap();
        let cpath = CString::new(path.to_str().unwrap()).unwrap();
        let mut ledger = ptr::null_mut();
        assert_eq!(
            arakelov_ledger_from_file(cpath.as_ptr(), &mut ledger),
            ARAKELOV_STATUS_OK
        );
        arakelov_ledger_free(ledger);

        let missing = CString::new(dir.join("absent.txt").to_str().unwrap()).unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(
            arakelov_ledger_from_file(missing.as_ptr(), &mut none),
            ARAKELOV_STATUS_IO
        );
    }
}

#[test]
fn winding_and_scan() {
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(arakelov_winding_report_json(37, &mut json), ARAKELOV_STATUS_OK);
        let parsed: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(parsed["dim_winding"], 1);
        assert_eq!(parsed["ratio"], "1/2");

        let mut csv = ptr::null_mut();
        assert_eq!(
            arakelov_brumer_scan_csv(19, 31, 2, &mut csv),
            ARAKELOV_STATUS_OK
        );
        let text = take_string(csv);
        assert!(text.starts_with("p,g,dim_plus,dim_minus,dim_Je,ratio,brumer_weak\n"));
        assert_eq!(text.lines().count(), 5); // header + 19, 23, 29, 31

        assert_eq!(
            arakelov_winding_report_json(15, &mut ptr::null_mut()),
            ARAKELOV_STATUS_INVALID_ARGUMENT
        );
    }
}

#[test]
fn theta_through_c_arrays() {
    unsafe {
        let tau_re = [0.0f64];
        let tau_im = [1.0f64];
        let z_re = [0.0f64];
        let z_im = [0.0f64];
        let (mut re, mut im, mut norm, mut err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let mut radius = 0u32;
        assert_eq!(
            arakelov_theta_eval(
                1,
                tau_re.as_ptr(),
                tau_im.as_ptr(),
                z_re.as_ptr(),
                z_im.as_ptr(),
                1e-14,
                &mut re,
                &mut im,
                &mut norm,
                &mut radius,
                &mut err,
            ),
            ARAKELOV_STATUS_OK
        );
        assert!((re - 1.086434811213308).abs() < 1e-9);
        assert!(im.abs() < 1e-12);
        assert!((norm - re).abs() < 1e-12);
        assert!(err < 1e-14);

        // lower half-space is rejected
        let bad_im = [-1.0f64];
        assert_eq!(
            arakelov_theta_eval(
                1,
                tau_re.as_ptr(),
                bad_im.as_ptr(),
                z_re.as_ptr(),
                z_im.as_ptr(),
                1e-14,
                &mut re,
                &mut im,
                &mut norm,
                &mut radius,
                &mut err,
            ),
            ARAKELOV_STATUS_INVALID_ARGUMENT
        );
    }
}
