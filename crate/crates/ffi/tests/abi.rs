//! Exercises the C ABI exactly as a foreign caller would: JSON in, opaque
//! handles, status codes out.

use loopform_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

const TWO_PI_CUBED: f64 = 62.012_553_360_599_63;

fn cstring(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(lf_last_error())
            .to_string_lossy()
            .into_owned()
    }
}

unsafe fn kernel(json: &str) -> *mut LfKernel {
    let mut out = ptr::null_mut();
    let status = lf_kernel_from_json(cstring(json).as_ptr(), &mut out);
    assert_eq!(status, LfStatus::Ok, "{}", last_error());
    out
}

unsafe fn series(json: &str) -> *mut LfSeries {
    let mut out = ptr::null_mut();
    let status = lf_series_from_json(cstring(json).as_ptr(), &mut out);
    assert_eq!(status, LfStatus::Ok, "{}", last_error());
    out
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(lf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn torus_extraction_and_both_pairings() {
    unsafe {
        let k = kernel(r#"{"kind":"torus","tau":[0.0,1.0]}"#);
        let f = series(r#"{"rank":1,"lead":-1,"coeffs":[[[[1.0,0.0]]]]}"#);

        let mut table = ptr::null_mut();
        let status = lf_extract(k, -2, 2, -2, 2, 0.5, 256, &mut table);
        assert_eq!(status, LfStatus::Ok, "{}", last_error());

        let (mut re, mut im) = (0.0f64, 0.0f64);
        assert_eq!(lf_table_get(table, 0, 0, &mut re, &mut im), LfStatus::Ok);
        assert!((re - std::f64::consts::FRAC_PI_2).abs() < 1e-9, "a00 {re}");
        assert!(im.abs() < 1e-9);
        // outside the stored window reads as zero
        assert_eq!(lf_table_get(table, 9, 9, &mut re, &mut im), LfStatus::Ok);
        assert_eq!((re, im), (0.0, 0.0));

        assert_eq!(
            lf_pair_series(f, f, table, &mut re, &mut im),
            LfStatus::Ok,
            "{}",
            last_error()
        );
        assert!(
            (re - TWO_PI_CUBED).abs() / TWO_PI_CUBED < 1e-6,
            "series {re}"
        );

        let (mut qre, mut qim) = (0.0f64, 0.0f64);
        assert_eq!(
            lf_pair_quadrature(f, f, k, 256, 1.0, &mut qre, &mut qim),
            LfStatus::Ok,
            "{}",
            last_error()
        );
        assert!((qre - re).abs() / re.abs() < 1e-8, "{re} vs {qre}");
        assert!(qim.abs() < 1e-8 && im.abs() < 1e-8);

        lf_series_free(f);
        lf_table_free(table);
        lf_kernel_free(k);
    }
}

#[test]
fn table_json_roundtrip() {
    unsafe {
        let k = kernel(r#"{"kind":"sphere"}"#);
        let mut table = ptr::null_mut();
        assert_eq!(lf_extract(k, 0, 3, 0, 3, 0.5, 64, &mut table), LfStatus::Ok);

        let mut text = ptr::null_mut();
        assert_eq!(lf_table_to_json(table, &mut text), LfStatus::Ok);
        let json = CStr::from_ptr(text).to_str().unwrap().to_owned();

        let mut reloaded = ptr::null_mut();
        assert_eq!(
            lf_table_from_json(cstring(&json).as_ptr(), &mut reloaded),
            LfStatus::Ok,
            "{}",
            last_error()
        );
        let (mut re, mut im) = (1.0f64, 1.0f64);
        assert_eq!(lf_table_get(reloaded, 1, 2, &mut re, &mut im), LfStatus::Ok);
        assert!(re.abs() <= 1e-12 && im.abs() <= 1e-12);

        lf_string_free(text);
        lf_table_free(reloaded);
        lf_table_free(table);
        lf_kernel_free(k);
    }
}

#[test]
fn moment_identity_via_abi() {
    unsafe {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        assert_eq!(lf_moment(3, 2, 2, 1, 128, &mut re, &mut im), LfStatus::Ok);
        let want = (2.0 * std::f64::consts::PI).powi(2);
        assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);

        assert_eq!(lf_moment(3, 2, 2, 2, 128, &mut re, &mut im), LfStatus::Ok);
        assert!(re.abs() < 1e-12 && im.abs() < 1e-12);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            lf_kernel_from_json(ptr::null(), &mut out),
            LfStatus::NullArgument
        );

        assert_eq!(
            lf_kernel_from_json(cstring("{not json").as_ptr(), &mut out),
            LfStatus::Invalid
        );
        assert!(
            last_error().contains("kernel descriptor"),
            "{}",
            last_error()
        );

        assert_eq!(
            lf_kernel_from_json(
                cstring(r#"{"kind":"torus","tau":[0.0,-1.0]}"#).as_ptr(),
                &mut out
            ),
            LfStatus::Invalid
        );

        let bytes = b"{\"kind\":\xff}\0";
        assert_eq!(
            lf_kernel_from_json(bytes.as_ptr() as *const _, &mut out),
            LfStatus::BadEncoding
        );

        // undersampled extraction fails cleanly
        let k = kernel(r#"{"kind":"torus","tau":[0.0,1.0]}"#);
        let mut table = ptr::null_mut();
        assert_eq!(
            lf_extract(k, -8, 8, -8, 8, 0.5, 4, &mut table),
            LfStatus::Invalid
        );
        assert!(!last_error().is_empty());
        lf_kernel_free(k);

        // frees tolerate null
        lf_kernel_free(ptr::null_mut());
        lf_series_free(ptr::null_mut());
        lf_table_free(ptr::null_mut());
        lf_string_free(ptr::null_mut());
    }
}
