//! C ABI over `nearfield_bd`.
//!
//! Arrays are opaque heap handles created by `nfb_*_new` and released with
//! the matching `nfb_*_free`. Every fallible call returns an [`NfbStatus`]
//! and writes its result through an out-pointer only on success. The text
//! of the most recent failure on the calling thread is available from
//! [`nfb_last_error`].

use nearfield_bd::beam_depth::{bd_circ, bd_rect, finite_bd_limit_rect, solve_a3db, BeamDepthResult, A3DB_TOL};
use nearfield_bd::field::{FocalPoint, QuadratureSpec};
use nearfield_bd::fresnel::fresnel_cs;
use nearfield_bd::gain::{
    analytic_gain_circ, analytic_gain_rect, analytic_gain_steered_tx, circ_parameter, defocus_parameter,
    exact_array_gain,
};
use nearfield_bd::geometry::{CircArray, RectArray, Sizing, TxGeometry};
use nearfield_bd::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NfbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    ReactiveNearField = 3,
    DegenerateProjection = 4,
    NumericalFailure = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NfbSizing {
    ElementDiagonal = 0,
    ApertureArea = 1,
    ApertureLength = 2,
}

/// Opaque rectangular array.
pub struct NfbRectArray(RectArray);

/// Opaque circular aperture.
pub struct NfbCircArray(CircArray);

/// Characteristic distances of a rectangular array, meters.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NfbDistances {
    pub fraunhofer: f64,
    pub array_fraunhofer: f64,
    pub uniform_amplitude: f64,
    pub reactive_limit: f64,
    pub finite_bd_limit: f64,
}

/// Half-power interval around a focus. `z_hi` is `INFINITY` when the depth
/// is unbounded.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NfbBeamDepth {
    pub focus: f64,
    pub z_lo: f64,
    pub z_hi: f64,
    pub depth: f64,
    pub finite_limit: f64,
    pub within_validity: bool,
}

impl From<BeamDepthResult> for NfbBeamDepth {
    fn from(r: BeamDepthResult) -> Self {
        Self {
            focus: r.focus,
            z_lo: r.z_lo,
            z_hi: r.z_hi,
            depth: r.depth,
            finite_limit: r.finite_limit,
            within_validity: r.within_validity,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

const NULL_HANDLE: &str = "handle";

fn status_of(err: &Error) -> NfbStatus {
    match err {
        Error::InvalidParameter { name, .. } if *name == NULL_HANDLE => NfbStatus::NullPointer,
        Error::ReactiveNearField { .. } => NfbStatus::ReactiveNearField,
        Error::DegenerateProjection(_) => NfbStatus::DegenerateProjection,
        e if e.is_validation() => NfbStatus::InvalidParameter,
        _ => NfbStatus::NumericalFailure,
    }
}

fn guard<T>(out: *mut T, f: impl FnOnce() -> nearfield_bd::Result<T>) -> NfbStatus {
    if out.is_null() {
        set_last_error("null output pointer".into());
        return NfbStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null above; the caller guarantees it is writable.
            unsafe { out.write(v) };
            NfbStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            NfbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> nearfield_bd::Result<&'a T> {
    // SAFETY: caller passes a handle obtained from the matching constructor.
    unsafe { p.as_ref() }.ok_or_else(|| Error::InvalidParameter {
        name: NULL_HANDLE,
        reason: "null array handle".into(),
    })
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nfb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn nfb_status_str(status: NfbStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        NfbStatus::Ok => b"ok\0",
        NfbStatus::NullPointer => b"null pointer\0",
        NfbStatus::InvalidParameter => b"invalid parameter\0",
        NfbStatus::ReactiveNearField => b"distance in the reactive near-field\0",
        NfbStatus::DegenerateProjection => b"degenerate projection\0",
        NfbStatus::NumericalFailure => b"numerical failure\0",
        NfbStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Creates a rectangular array. `value` is the fixed quantity selected by
/// `sizing`, in meters or square meters.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn nfb_rect_array_new(
    n_per_side: usize,
    eta: f64,
    sizing: NfbSizing,
    value: f64,
    wavelength: f64,
    out: *mut *mut NfbRectArray,
) -> NfbStatus {
    guard(out, || {
        let sizing = match sizing {
            NfbSizing::ElementDiagonal => Sizing::FixedElementDiagonal(value),
            NfbSizing::ApertureArea => Sizing::FixedApertureArea(value),
            NfbSizing::ApertureLength => Sizing::FixedApertureLength(value),
        };
        let arr = RectArray::new(n_per_side, eta, sizing, wavelength)?;
        Ok(Box::into_raw(Box::new(NfbRectArray(arr))))
    })
}

/// # Safety
/// `arr` must come from [`nfb_rect_array_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nfb_rect_array_free(arr: *mut NfbRectArray) {
    if !arr.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(arr) });
    }
}

/// # Safety
/// `arr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_rect_array_distances(arr: *const NfbRectArray, out: *mut NfbDistances) -> NfbStatus {
    guard(out, || {
        let a = &unsafe { deref(arr) }?.0;
        Ok(NfbDistances {
            fraunhofer: a.fraunhofer_distance(),
            array_fraunhofer: a.array_fraunhofer_distance(),
            uniform_amplitude: a.uniform_amplitude_distance(),
            reactive_limit: a.reactive_limit(),
            finite_bd_limit: finite_bd_limit_rect(a)?,
        })
    })
}

/// Creates a circular aperture. `reference_elements` sets the element count
/// of the matched rectangular array whose element Fraunhofer distance is
/// used as the distance unit; pass 0 for the default of 10⁴.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_circ_array_new(
    radius: f64,
    wavelength: f64,
    reference_elements: usize,
    out: *mut *mut NfbCircArray,
) -> NfbStatus {
    guard(out, || {
        let n = if reference_elements == 0 {
            CircArray::DEFAULT_REFERENCE_ELEMENTS
        } else {
            reference_elements
        };
        Ok(Box::into_raw(Box::new(NfbCircArray(CircArray::with_reference(radius, wavelength, n)?))))
    })
}

/// # Safety
/// `circ` must come from [`nfb_circ_array_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nfb_circ_array_free(circ: *mut NfbCircArray) {
    if !circ.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(circ) });
    }
}

/// Fresnel integrals `C(x)` and `S(x)` with the `π t² / 2` kernel.
///
/// # Safety
/// `c` and `s` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_fresnel(x: f64, c: *mut f64, s: *mut f64) -> NfbStatus {
    if c.is_null() || s.is_null() {
        set_last_error("null output pointer".into());
        return NfbStatus::NullPointer;
    }
    let (cv, sv) = fresnel_cs(x);
    // SAFETY: both checked non-null.
    unsafe {
        c.write(cv);
        s.write(sv);
    }
    NfbStatus::Ok
}

/// Half-power defocus parameter for aspect ratio `eta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_a3db(eta: f64, out: *mut f64) -> NfbStatus {
    guard(out, || solve_a3db(eta, A3DB_TOL))
}

/// Closed-form broadside gain at range `z` with focus `focus`
/// (`INFINITY` for a far-field filter).
///
/// # Safety
/// `arr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_rect_analytic_gain(arr: *const NfbRectArray, z: f64, focus: f64, out: *mut f64) -> NfbStatus {
    guard(out, || {
        let a = &unsafe { deref(arr) }?.0;
        if !(z > 0.0 && z.is_finite()) || !(focus > 0.0) {
            return Err(Error::Config("z must be finite and > 0, focus > 0".into()));
        }
        Ok(analytic_gain_rect(a.eta(), defocus_parameter(a, z, focus)))
    })
}

/// Closed-form gain for a transmitter at `(dist, azimuth, elevation)` with a
/// broadside focus at `focus`.
///
/// # Safety
/// `arr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_rect_analytic_gain_steered(
    arr: *const NfbRectArray,
    dist: f64,
    azimuth: f64,
    elevation: f64,
    focus: f64,
    out: *mut f64,
) -> NfbStatus {
    guard(out, || {
        let a = &unsafe { deref(arr) }?.0;
        let tx = TxGeometry::new(dist, azimuth, elevation)?;
        Ok(analytic_gain_steered_tx(a, &tx, focus))
    })
}

/// Exact normalized gain by element quadrature. The filter is focused at
/// range `focus` in direction `(focus_azimuth, focus_elevation)`;
/// `quadrature_order` points per element axis, refined until converged.
///
/// # Safety
/// `arr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_rect_exact_gain(
    arr: *const NfbRectArray,
    dist: f64,
    azimuth: f64,
    elevation: f64,
    focus: f64,
    focus_azimuth: f64,
    focus_elevation: f64,
    quadrature_order: usize,
    out: *mut f64,
) -> NfbStatus {
    guard(out, || {
        let a = &unsafe { deref(arr) }?.0;
        let tx = TxGeometry::new(dist, azimuth, elevation)?;
        let filter = FocalPoint::steered(focus, focus_azimuth, focus_elevation)?;
        let quad = QuadratureSpec {
            order: quadrature_order,
            ..QuadratureSpec::default()
        };
        quad.validate()?;
        exact_array_gain(a, &tx, &filter, &quad)
    })
}

/// # Safety
/// `arr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_rect_beam_depth(arr: *const NfbRectArray, focus: f64, out: *mut NfbBeamDepth) -> NfbStatus {
    guard(out, || Ok(bd_rect(&unsafe { deref(arr) }?.0, focus)?.into()))
}

/// Closed-form circular gain `sinc²(π l)`.
///
/// # Safety
/// `circ` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_circ_analytic_gain(circ: *const NfbCircArray, z: f64, focus: f64, out: *mut f64) -> NfbStatus {
    guard(out, || {
        let c = &unsafe { deref(circ) }?.0;
        if !(z > 0.0 && z.is_finite()) || !(focus > 0.0) {
            return Err(Error::Config("z must be finite and > 0, focus > 0".into()));
        }
        Ok(analytic_gain_circ(circ_parameter(c, z, focus)))
    })
}

/// # Safety
/// `circ` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_circ_beam_depth(circ: *const NfbCircArray, focus: f64, out: *mut NfbBeamDepth) -> NfbStatus {
    guard(out, || Ok(bd_circ(&unsafe { deref(circ) }?.0, focus)?.into()))
}

/// Element Fraunhofer distance of the circular aperture's reference array.
///
/// # Safety
/// `circ` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nfb_circ_fraunhofer_reference(circ: *const NfbCircArray, out: *mut f64) -> NfbStatus {
    guard(out, || Ok(unsafe { deref(circ) }?.0.fraunhofer_reference()))
}
