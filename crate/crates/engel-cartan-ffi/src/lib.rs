//! C ABI over the core curvature computations.
//!
//! Conventions:
//! - every fallible entry point returns an [`EcStatus`]; output parameters
//!   are written only when the status is `EC_STATUS_OK`;
//! - `EcStructure` handles are opaque, released with [`ec_structure_free`];
//! - returned strings are NUL-terminated UTF-8 owned by this library,
//!   released with [`ec_string_free`];
//! - [`ec_last_error`] holds a thread-local message for the most recent
//!   failure on the calling thread;
//! - panics never unwind across the boundary: they surface as
//!   `EC_STATUS_INTERNAL`.

use engel_cartan::cartan::{flatness_test, umbilicity_test, CartanContext};
use engel_cartan::error::Error;
use engel_cartan::manifest::{ManifoldFile, DEFAULT_ORDER};
use engel_cartan::models::cubic;
use engel_cartan::{report, EngelStructure, Point};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Validated manifold plus the evaluation defaults its file declared.
pub struct EcStructure {
    structure: EngelStructure,
    kind: &'static str,
    points: Vec<Point>,
    order: usize,
    t: f64,
}

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArg,
    /// Manifold text was not valid UTF-8.
    Utf8,
    /// Manifold text failed to parse or validate.
    Parse,
    /// The described distribution fails the Engel rank conditions.
    Degenerate,
    /// Y is not tangent to the canonical line field.
    NotD0Aligned,
    /// Scale normalization did not converge.
    NormalizationFailed,
    /// The requested analysis needs a higher jet order.
    InsufficientOrder,
    /// A linear solve or jet inversion hit a singular pivot.
    Singular,
    /// An argument lies outside the function domain.
    Domain,
    /// Internal invariant violation (library bug); see `ec_last_error`.
    Internal,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: EcStatus, message: &str) -> EcStatus {
    let owned = CString::new(message.replace('\0', " ")).expect("NULs stripped");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
    status
}

fn fail_with(e: &Error) -> EcStatus {
    let status = match e {
        Error::Manifest(_) => EcStatus::Parse,
        Error::EngelDegenerate(_) => EcStatus::Degenerate,
        Error::NotD0Aligned(_) => EcStatus::NotD0Aligned,
        Error::NormalizationFailed(_) => EcStatus::NormalizationFailed,
        Error::InsufficientOrder { .. } | Error::OrderExhausted => EcStatus::InsufficientOrder,
        Error::SingularMatrix | Error::SingularJet => EcStatus::Singular,
        Error::DomainError(_) => EcStatus::Domain,
        Error::OrderMismatch(..) | Error::BasePointMismatch => EcStatus::Internal,
    };
    fail(status, &e.to_string())
}

fn guarded<F: FnOnce() -> EcStatus>(f: F) -> EcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(EcStatus::Internal, "internal panic"),
    }
}

impl EcStructure {
    fn order_or(&self, order: u32) -> usize {
        if order == 0 {
            self.order
        } else {
            order as usize
        }
    }

    fn t_or(&self, t: f64) -> Result<f64, EcStatus> {
        if t == 0.0 {
            Ok(self.t)
        } else if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(fail(EcStatus::Domain, "fiber value t must be positive (or 0 for the default)"))
        }
    }
}

/// Message for the most recent failure on the calling thread, empty if
/// none. The pointer stays valid until the next failing call on the same
/// thread; do not free it.
#[no_mangle]
pub extern "C" fn ec_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Jet order used when a manifold file or a zero `order` argument leaves
/// the choice to the library.
#[no_mangle]
pub extern "C" fn ec_default_order() -> u32 {
    DEFAULT_ORDER as u32
}

/// Builds the flat cubic model with default evaluation settings (origin,
/// default order, t = 1). Returns null only on internal failure. Release
/// with `ec_structure_free`.
#[no_mangle]
pub extern "C" fn ec_structure_cubic() -> *mut EcStructure {
    match catch_unwind(|| EcStructure {
        structure: cubic(),
        kind: "cubic",
        points: vec![[0.0; 4]],
        order: DEFAULT_ORDER,
        t: 1.0,
    }) {
        Ok(handle) => Box::into_raw(Box::new(handle)),
        Err(_) => {
            fail(EcStatus::Internal, "internal panic");
            std::ptr::null_mut()
        }
    }
}

/// Parses manifold-file text (TOML, `format = 1`) and builds its
/// structure.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer. On `EC_STATUS_OK` the caller owns `*out` and
/// releases it with `ec_structure_free`; on any other status `*out` is
/// untouched.
#[no_mangle]
pub unsafe extern "C" fn ec_structure_from_manifest(
    text: *const c_char,
    out: *mut *mut EcStructure,
) -> EcStatus {
    if text.is_null() || out.is_null() {
        return fail(EcStatus::NullArg, "null argument");
    }
    let text = CStr::from_ptr(text);
    guarded(|| {
        let Ok(text) = text.to_str() else {
            return fail(EcStatus::Utf8, "manifold text is not valid UTF-8");
        };
        let file = match ManifoldFile::parse(text) {
            Ok(file) => file,
            Err(e) => return fail_with(&e),
        };
        let structure = match file.structure() {
            Ok(s) => s,
            Err(e) => return fail_with(&e),
        };
        let handle = EcStructure {
            structure,
            kind: file.kind.label(),
            points: file.points(),
            order: file.order(),
            t: file.t(),
        };
        out.write(Box::into_raw(Box::new(handle)));
        EcStatus::Ok
    })
}

/// Releases a structure handle. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ec_structure_free(s: *mut EcStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string pointer obtained from this library that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Four essential curvature components at one point, written to `out` in
/// the order R^x_{y2}, R^y_{y2}, R^2_{x3}, R^y_{x3}. Pass `order = 0`
/// and/or `t = 0` for the handle's defaults.
///
/// # Safety
/// `s` must be a live handle, `point` must address 4 doubles (or be null
/// for the handle's first evaluation point), `out` must address 4
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ec_essential_curvatures(
    s: *const EcStructure,
    point: *const f64,
    order: u32,
    t: f64,
    out: *mut f64,
) -> EcStatus {
    if s.is_null() || out.is_null() {
        return fail(EcStatus::NullArg, "null argument");
    }
    let handle = &*s;
    let p: Point = if point.is_null() {
        handle.points[0]
    } else {
        std::slice::from_raw_parts(point, 4).try_into().expect("length 4")
    };
    let out = std::slice::from_raw_parts_mut(out, 4);
    guarded(|| {
        let t = match handle.t_or(t) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let values = match CartanContext::new(&handle.structure, p, handle.order_or(order))
            .and_then(|ctx| ctx.essential_curvatures())
        {
            Ok(ess) => ess.values_at(t),
            Err(e) => return fail_with(&e),
        };
        out.copy_from_slice(&values);
        EcStatus::Ok
    })
}

/// Flatness verdict over `n_points` points. Pass `points = NULL,
/// n_points = 0` for the handle's evaluation points, `order = 0` for its
/// default order.
///
/// # Safety
/// `s` must be a live handle; `points` must address `4 * n_points`
/// doubles (x, y, u1, u2 per point) unless `n_points = 0`; `out_flat` and
/// `out_residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_flatness_test(
    s: *const EcStructure,
    points: *const f64,
    n_points: usize,
    order: u32,
    out_flat: *mut bool,
    out_residual: *mut f64,
) -> EcStatus {
    if s.is_null() || out_flat.is_null() || out_residual.is_null() {
        return fail(EcStatus::NullArg, "null argument");
    }
    if points.is_null() && n_points > 0 {
        return fail(EcStatus::NullArg, "null points with nonzero count");
    }
    let handle = &*s;
    let pts: Vec<Point> = if n_points == 0 {
        handle.points.clone()
    } else {
        std::slice::from_raw_parts(points, 4 * n_points)
            .chunks_exact(4)
            .map(|c| c.try_into().expect("length 4"))
            .collect()
    };
    guarded(|| match flatness_test(&handle.structure, &pts, handle.order_or(order)) {
        Ok(verdict) => {
            out_flat.write(verdict.flat);
            out_residual.write(verdict.max_residual);
            EcStatus::Ok
        }
        Err(e) => fail_with(&e),
    })
}

/// Umbilicity verdict at one point (null for the handle's first point).
///
/// # Safety
/// `s` must be a live handle, `point` null or 4 doubles, `out_umbilic`
/// and `out_residual` writable.
#[no_mangle]
pub unsafe extern "C" fn ec_umbilicity_test(
    s: *const EcStructure,
    point: *const f64,
    order: u32,
    out_umbilic: *mut bool,
    out_residual: *mut f64,
) -> EcStatus {
    if s.is_null() || out_umbilic.is_null() || out_residual.is_null() {
        return fail(EcStatus::NullArg, "null argument");
    }
    let handle = &*s;
    let p: Point = if point.is_null() {
        handle.points[0]
    } else {
        std::slice::from_raw_parts(point, 4).try_into().expect("length 4")
    };
    guarded(|| match umbilicity_test(&handle.structure, p, handle.order_or(order)) {
        Ok(verdict) => {
            out_umbilic.write(verdict.umbilic);
            out_residual.write(verdict.residual);
            EcStatus::Ok
        }
        Err(e) => fail_with(&e),
    })
}

/// JSON report of the essential curvatures at the handle's evaluation
/// points. Pass `order = 0` and/or `t = 0` for the handle's defaults. On
/// `EC_STATUS_OK` the caller owns `*out` and releases it with
/// `ec_string_free`.
///
/// # Safety
/// `s` must be a live handle and `out` writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ec_invariants_report_json(
    s: *const EcStructure,
    order: u32,
    t: f64,
    out: *mut *mut c_char,
) -> EcStatus {
    if s.is_null() || out.is_null() {
        return fail(EcStatus::NullArg, "null argument");
    }
    let handle = &*s;
    guarded(|| {
        let t = match handle.t_or(t) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let report = match report::invariants_report(
            handle.kind,
            &handle.structure,
            &handle.points,
            handle.order_or(order),
            t,
            None,
        ) {
            Ok(r) => r,
            Err(e) => return fail_with(&e),
        };
        let text = serde_json::to_string_pretty(&report).expect("report serialization");
        out.write(CString::new(text).expect("JSON has no NULs").into_raw());
        EcStatus::Ok
    })
}

/// JSON cohomology dimension report. Needs no handle; independent of any
/// manifold. Returns null only on internal failure. Release with
/// `ec_string_free`.
#[no_mangle]
pub extern "C" fn ec_cohomology_report_json() -> *mut c_char {
    match catch_unwind(|| {
        let text = serde_json::to_string_pretty(&report::cohomology_json())
            .expect("report serialization");
        CString::new(text).expect("JSON has no NULs").into_raw()
    }) {
        Ok(ptr) => ptr,
        Err(_) => {
            fail(EcStatus::Internal, "internal panic");
            std::ptr::null_mut()
        }
    }
}
