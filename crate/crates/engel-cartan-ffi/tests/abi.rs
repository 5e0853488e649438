//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! status codes, owned strings.

use engel_cartan_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

fn from_manifest(text: &str) -> (EcStatus, *mut EcStructure) {
    let text = CString::new(text).unwrap();
    let mut handle: *mut EcStructure = ptr::null_mut();
    let status = unsafe { ec_structure_from_manifest(text.as_ptr(), &mut handle) };
    (status, handle)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ec_last_error()) }.to_str().unwrap().to_string()
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { ec_string_free(ptr) };
    text
}

#[test]
fn cubic_handle_is_flat_with_zero_invariants() {
    let handle = ec_structure_cubic();
    assert!(!handle.is_null());

    let mut values = [f64::NAN; 4];
    let status =
        unsafe { ec_essential_curvatures(handle, ptr::null(), 4, 0.0, values.as_mut_ptr()) };
    assert_eq!(status, EcStatus::Ok);
    assert!(values.iter().all(|v| v.abs() < 1e-9), "{values:?}");

    let points = [0.3, -0.2, 0.1, 0.5, -0.4, 0.25, -0.15, 0.35];
    let (mut flat, mut residual) = (false, f64::NAN);
    let status = unsafe {
        ec_flatness_test(handle, points.as_ptr(), 2, 4, &mut flat, &mut residual)
    };
    assert_eq!(status, EcStatus::Ok);
    assert!(flat);
    assert!(residual < 1e-9);

    unsafe { ec_structure_free(handle) };
}

#[test]
fn manifest_handles_carry_their_file_defaults() {
    let (status, handle) = from_manifest(
        "format = 1\nkind = \"normal_form\"\npoints = [[0.0, 0.0, 0.0, 0.0]]\nt = 2.0\n[coefficients]\nb8 = 0.1\n",
    );
    assert_eq!(status, EcStatus::Ok);

    // t = 0 takes the file's t = 2; the weight-3 component scales by 8.
    let mut values = [f64::NAN; 4];
    let status =
        unsafe { ec_essential_curvatures(handle, ptr::null(), 0, 0.0, values.as_mut_ptr()) };
    assert_eq!(status, EcStatus::Ok);
    assert!((values[3] + 4.8).abs() < 1e-8, "{values:?}");

    let (mut flat, mut residual) = (true, f64::NAN);
    let status =
        unsafe { ec_flatness_test(handle, ptr::null(), 0, 0, &mut flat, &mut residual) };
    assert_eq!(status, EcStatus::Ok);
    assert!(!flat);
    assert!(residual > 0.1);

    let (mut umbilic, mut residual) = (true, f64::NAN);
    let status =
        unsafe { ec_umbilicity_test(handle, ptr::null(), 0, &mut umbilic, &mut residual) };
    assert_eq!(status, EcStatus::Ok);
    assert!(!umbilic);

    let mut json: *mut c_char = ptr::null_mut();
    let status = unsafe { ec_invariants_report_json(handle, 0, 0.0, &mut json) };
    assert_eq!(status, EcStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(report["kind"], serde_json::json!("normal_form"));
    assert_eq!(report["gauge"]["fiber_value"], serde_json::json!(2.0));
    let v = report["points"][0]["invariants"][3]["value"].as_f64().unwrap();
    assert!((v + 4.8).abs() < 1e-8);

    unsafe { ec_structure_free(handle) };
}

#[test]
fn statuses_and_last_error_report_failures() {
    let (status, _) = from_manifest("format = 3\nkind = \"cubic\"\n");
    assert_eq!(status, EcStatus::Parse);
    assert!(last_error().contains("format 3"), "{}", last_error());

    let (status, _) = from_manifest("format = 1\nkind = \"graph\"\nf1 = []\nf2 = []\n");
    assert_eq!(status, EcStatus::Degenerate);
    assert!(last_error().contains("Engel rank"), "{}", last_error());

    let bytes = b"format = 1\xff\xfe";
    let text = CString::new(&bytes[..]).unwrap();
    let mut handle: *mut EcStructure = ptr::null_mut();
    let status = unsafe { ec_structure_from_manifest(text.as_ptr(), &mut handle) };
    assert_eq!(status, EcStatus::Utf8);
    assert!(handle.is_null());

    let status = unsafe { ec_structure_from_manifest(ptr::null(), &mut handle) };
    assert_eq!(status, EcStatus::NullArg);

    let cubic = ec_structure_cubic();
    let mut values = [0.0; 4];
    let status = unsafe { ec_essential_curvatures(cubic, ptr::null(), 0, 0.0, ptr::null_mut()) };
    assert_eq!(status, EcStatus::NullArg);
    let status =
        unsafe { ec_essential_curvatures(cubic, ptr::null(), 1, 0.0, values.as_mut_ptr()) };
    assert_eq!(status, EcStatus::InsufficientOrder);
    assert!(last_error().contains("order"), "{}", last_error());
    let status =
        unsafe { ec_essential_curvatures(cubic, ptr::null(), 0, -1.0, values.as_mut_ptr()) };
    assert_eq!(status, EcStatus::Domain);
    unsafe { ec_structure_free(cubic) };
}

#[test]
fn cohomology_json_needs_no_handle() {
    let report: serde_json::Value =
        serde_json::from_str(&take_string(ec_cohomology_report_json())).unwrap();
    assert_eq!(report["c2_dimension"], serde_json::json!(30));
    assert_eq!(report["cocycle_dimension"], serde_json::json!(17));
    assert_eq!(report["coboundary_dimension"], serde_json::json!(13));
    assert_eq!(report["h2_dimension"], serde_json::json!(4));
    assert_eq!(report["differential_squares_to_zero"], serde_json::json!(true));
}

#[test]
fn default_order_matches_the_manifest_default() {
    assert_eq!(ec_default_order(), 6);
    let (status, handle) = from_manifest("format = 1\nkind = \"cubic\"\norder = 4\n");
    assert_eq!(status, EcStatus::Ok);
    // order = 0 uses the file's 4; explicit order still wins.
    let mut values = [0.0; 4];
    let status =
        unsafe { ec_essential_curvatures(handle, ptr::null(), 0, 0.0, values.as_mut_ptr()) };
    assert_eq!(status, EcStatus::Ok);
    unsafe { ec_structure_free(handle) };
}
