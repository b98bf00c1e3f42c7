//! C interface to `condcap`.
//!
//! Every fallible function returns a [`CondcapStatus`] and writes its result
//! through an out pointer. On failure a description is available from
//! [`condcap_last_error`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use condcap::capforms::{cap_rect_segment, RectSegmentSpec};
use condcap::capsolve::{estimate_capacity, Condenser, Region};
use condcap::ringbound::{ring_lower_bound, PolygonalRing};
use condcap::{specfun, Error};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondcapStatus {
    Ok = 0,
    Domain = 1,
    NoConvergence = 2,
    Pole = 3,
    Constraint = 4,
    NoRoot = 5,
    Resolution = 6,
    RedrawLimit = 7,
    NullPointer = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondcapComplex {
    pub re: f64,
    pub im: f64,
}

impl From<CondcapComplex> for Complex64 {
    fn from(z: CondcapComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Opaque polygonal ring domain.
pub struct CondcapRing(PolygonalRing);

/// Opaque condenser for the grid capacity solver.
pub struct CondcapCondenser(Condenser);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CondcapStatus {
    match e {
        Error::Domain { .. } => CondcapStatus::Domain,
        Error::NoConvergence { .. } => CondcapStatus::NoConvergence,
        Error::Pole { .. } => CondcapStatus::Pole,
        Error::Constraint(_) => CondcapStatus::Constraint,
        Error::NoRoot(_) => CondcapStatus::NoRoot,
        Error::Resolution(_) => CondcapStatus::Resolution,
        Error::RedrawLimit(_) => CondcapStatus::RedrawLimit,
        Error::Quadrilateral { source, .. } => status_of(source),
    }
}

fn guard<F: FnOnce() -> Result<(), CondcapStatus>>(f: F) -> CondcapStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CondcapStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CondcapStatus::Panic
        }
    }
}

fn lift<T>(r: condcap::Result<T>) -> Result<T, CondcapStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), CondcapStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(CondcapStatus::NullPointer);
    }
    Ok(())
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), CondcapStatus> {
    non_null(out, "output pointer")?;
    out.write(v);
    Ok(())
}

unsafe fn points(p: *const CondcapComplex, n: usize) -> Result<Vec<Complex64>, CondcapStatus> {
    non_null(p, "vertex array")?;
    Ok(std::slice::from_raw_parts(p, n).iter().map(|&z| z.into()).collect())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn condcap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Conformal modulus of the quadrilateral `0, 1, A, B`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn condcap_qm(a: CondcapComplex, b: CondcapComplex, out: *mut f64) -> CondcapStatus {
    guard(|| write(out, lift(condcap::quadmod::qm(a.into(), b.into()))?))
}

/// Modulus of the quadrilateral `0, 1, A, B` with `A` on the segment `[1, B]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn condcap_qmt(a: CondcapComplex, b: CondcapComplex, out: *mut f64) -> CondcapStatus {
    guard(|| write(out, lift(condcap::quadmod::qmt(a.into(), b.into()))?))
}

/// Grötzsch modulus μ(r), `0 < r < 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn condcap_mu(r: f64, out: *mut f64) -> CondcapStatus {
    guard(|| write(out, lift(specfun::mu(r))?))
}

/// Capacity of the rectangle `(-a, a) × (0, b)` with the slit `[ic, id]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn condcap_cap_rect_segment(a: f64, b: f64, c: f64, d: f64, out: *mut f64) -> CondcapStatus {
    guard(|| {
        let spec = lift(RectSegmentSpec::new(a, b, c, d))?;
        write(out, lift(cap_rect_segment(spec))?)
    })
}

/// Builds a ring from `m` outer and `m` inner vertices.
///
/// # Safety
/// `outer` and `inner` must each point to `m` values; `out` must be valid
/// for writes. Release the handle with [`condcap_ring_free`].
#[no_mangle]
pub unsafe extern "C" fn condcap_ring_new(
    outer: *const CondcapComplex,
    inner: *const CondcapComplex,
    m: usize,
    out: *mut *mut CondcapRing,
) -> CondcapStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let ring = lift(PolygonalRing::new(points(outer, m)?, points(inner, m)?))?;
        write(out, Box::into_raw(Box::new(CondcapRing(ring))))
    })
}

/// # Safety
/// `ring` must come from [`condcap_ring_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn condcap_ring_free(ring: *mut CondcapRing) {
    if !ring.is_null() {
        drop(Box::from_raw(ring));
    }
}

/// Lower bound for the ring capacity from its quadrilateral decomposition.
///
/// # Safety
/// `ring` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn condcap_ring_lower_bound(ring: *const CondcapRing, out: *mut f64) -> CondcapStatus {
    guard(|| {
        non_null(ring, "ring")?;
        write(out, lift(ring_lower_bound(&(*ring).0))?)
    })
}

/// Condenser formed by the ring between its two polygons.
///
/// # Safety
/// `ring` must be a live handle and `out` valid for writes. Release the
/// result with [`condcap_condenser_free`].
#[no_mangle]
pub unsafe extern "C" fn condcap_ring_condenser(ring: *const CondcapRing, out: *mut *mut CondcapCondenser) -> CondcapStatus {
    guard(|| {
        non_null(ring, "ring")?;
        let c = Condenser::polygonal_ring(&(*ring).0);
        write(out, Box::into_raw(Box::new(CondcapCondenser(c))))
    })
}

/// Condenser (unit disk, polygon) for a polygon with `n` vertices.
///
/// # Safety
/// `vertices` must point to `n` values and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn condcap_condenser_polygon_in_disk(
    vertices: *const CondcapComplex,
    n: usize,
    out: *mut *mut CondcapCondenser,
) -> CondcapStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let v = points(vertices, n)?;
        if v.len() < 3 {
            set_error(format!("polygon needs at least 3 vertices, got {}", v.len()));
            return Err(CondcapStatus::Domain);
        }
        let c = Condenser::in_unit_disk(Region::Polygon(v));
        write(out, Box::into_raw(Box::new(CondcapCondenser(c))))
    })
}

/// # Safety
/// `condenser` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn condcap_condenser_free(condenser: *mut CondcapCondenser) {
    if !condenser.is_null() {
        drop(Box::from_raw(condenser));
    }
}

/// Grid estimate of the capacity with `levels` (2 or 3) refinements.
///
/// # Safety
/// `condenser` must be a live handle; `value` and `error_estimate` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn condcap_condenser_estimate(
    condenser: *const CondcapCondenser,
    levels: u32,
    value: *mut f64,
    error_estimate: *mut f64,
) -> CondcapStatus {
    guard(|| {
        non_null(condenser, "condenser")?;
        non_null(value, "value")?;
        non_null(error_estimate, "error_estimate")?;
        let est = lift(estimate_capacity(&(*condenser).0, levels as usize))?;
        write(value, est.value)?;
        write(error_estimate, est.error_estimate)
    })
}
