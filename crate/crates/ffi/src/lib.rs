//! C ABI over the `halflap` crate.
//!
//! Fields are passed around as opaque `HlField` handles owned by the caller
//! and released with `hl_field_free`. Every fallible function returns an
//! `HlStatus`; on failure a description is available from
//! `hl_last_error_message` on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use halflap::decay::fit_decay_exponent;
use halflap::extension::{dtn_map, extend};
use halflap::family::FieldFamily;
use halflap::fractional::{half_laplacian, OperatorBackend};
use halflap::kelvin::{phi_map, Point};
use halflap::{Error, Grid, SampledField};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    SizeMismatch = 4,
    NonFinite = 5,
    TooFewSamples = 6,
    IdenticallyZero = 7,
    NearSingularPoint = 8,
    Numerical = 9,
    Io = 10,
    Internal = 11,
    Panic = 12,
}

impl From<&Error> for HlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidGrid(_) => HlStatus::InvalidGrid,
            Error::InvalidArgument(_)
            | Error::AxisOutOfRange { .. }
            | Error::InvalidHeights(_)
            | Error::Config(_) => HlStatus::InvalidArgument,
            Error::BallOutsideDomain { .. } => HlStatus::InvalidArgument,
            Error::SizeMismatch { .. } | Error::GridMismatch => HlStatus::SizeMismatch,
            Error::NonFinite { .. } => HlStatus::NonFinite,
            Error::TooFewSamples { .. } => HlStatus::TooFewSamples,
            Error::IdenticallyZero => HlStatus::IdenticallyZero,
            Error::NearSingularPoint(_) => HlStatus::NearSingularPoint,
            Error::UndefinedRatio(_) => HlStatus::Numerical,
            Error::Io(_) => HlStatus::Io,
            Error::Invariant(_) => HlStatus::Internal,
        }
    }
}

/// Backend selector for `hl_half_laplacian`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlBackend {
    Spectral = 0,
    SingularIntegral = 1,
}

/// Opaque sampled field.
pub struct HlField {
    inner: SampledField,
}

/// Result of `hl_fit_decay`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HlDecayFit {
    pub prefactor: f64,
    pub rate: f64,
    pub alpha: f64,
    pub r_squared: f64,
    pub shells_used: usize,
    /// Number of diagnostic warnings attached to the fit.
    pub warnings: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (HlStatus, String)>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside halflap".into());
            HlStatus::Panic
        }
    }
}

fn lift(e: Error) -> (HlStatus, String) {
    (HlStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn field_ref<'a>(p: *const HlField) -> Result<&'a SampledField, (HlStatus, String)> {
    p.as_ref().map(|f| &f.inner).ok_or_else(|| null("field"))
}

unsafe fn emit(out: *mut *mut HlField, f: SampledField) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(HlField { inner: f }));
    Ok(())
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Wrap `len` samples on the grid `(dim, points, half_extent)`.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to a writable
/// handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_field_new(
    dim: usize,
    points: usize,
    half_extent: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut HlField,
) -> HlStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let grid = Grid::new(dim, points, half_extent).map_err(lift)?;
        let data = std::slice::from_raw_parts(values, len).to_vec();
        emit(out, SampledField::new(grid, data).map_err(lift)?)
    })
}

/// Sample a named family such as `"lorentzian"` or `"exp_smooth:1.5"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_field_sample(
    spec: *const c_char,
    dim: usize,
    points: usize,
    half_extent: f64,
    out: *mut *mut HlField,
) -> HlStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| (HlStatus::InvalidArgument, "spec is not UTF-8".to_string()))?;
        let family: FieldFamily = text.parse().map_err(lift)?;
        let grid = Grid::new(dim, points, half_extent).map_err(lift)?;
        emit(out, family.sample(&grid).map_err(lift)?)
    })
}

/// Number of samples held by `field`, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hl_field_len(field: *const HlField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.values().len())
}

/// Copy the samples into `buf`, which must hold exactly `hl_field_len` values.
///
/// # Safety
/// `field` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_field_values(
    field: *const HlField,
    buf: *mut f64,
    len: usize,
) -> HlStatus {
    guard(|| {
        let f = field_ref(field)?;
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let v = f.values();
        if v.len() != len {
            return Err(lift(Error::SizeMismatch {
                expected: v.len(),
                actual: len,
            }));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(v);
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hl_field_free(field: *mut HlField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Apply the half-Laplacian. Resolution warnings are not reported here.
///
/// # Safety
/// `field` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_half_laplacian(
    field: *const HlField,
    backend: HlBackend,
    out: *mut *mut HlField,
) -> HlStatus {
    guard(|| {
        let f = field_ref(field)?;
        let b = match backend {
            HlBackend::Spectral => OperatorBackend::Spectral,
            HlBackend::SingularIntegral => OperatorBackend::SingularIntegral,
        };
        emit(out, half_laplacian(f, b).map_err(lift)?.value)
    })
}

/// Harmonic extension of `field` evaluated at height `y > 0`.
///
/// # Safety
/// `field` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_extend(
    field: *const HlField,
    y: f64,
    out: *mut *mut HlField,
) -> HlStatus {
    guard(|| {
        let f = field_ref(field)?;
        let hf = extend(f, &[y]).map_err(lift)?;
        emit(out, hf.slice(0))
    })
}

/// Dirichlet-to-Neumann map `-d/dy` of the extension at `y = 0`.
///
/// # Safety
/// `field` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_dtn(field: *const HlField, out: *mut *mut HlField) -> HlStatus {
    guard(|| {
        let f = field_ref(field)?;
        emit(out, dtn_map(f))
    })
}

/// Fit `sup ~ C exp(-c R^alpha)` to `len` samples.
///
/// # Safety
/// `radii` and `sups` must point to `len` readable doubles, `out` to a
/// writable `HlDecayFit`.
#[no_mangle]
pub unsafe extern "C" fn hl_fit_decay(
    radii: *const f64,
    sups: *const f64,
    len: usize,
    out: *mut HlDecayFit,
) -> HlStatus {
    guard(|| {
        if radii.is_null() || sups.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let r = std::slice::from_raw_parts(radii, len);
        let s = std::slice::from_raw_parts(sups, len);
        let fit = fit_decay_exponent(r, s).map_err(lift)?;
        *out = HlDecayFit {
            prefactor: fit.value.prefactor,
            rate: fit.value.rate,
            alpha: fit.value.alpha,
            r_squared: fit.value.r_squared,
            shells_used: fit.value.shells_used,
            warnings: fit.warnings.len(),
        };
        Ok(())
    })
}

/// Ball/half-space map on `dim` coordinates (`dim` is 2 or 3), written to
/// `out`, which may alias `z`.
///
/// # Safety
/// `z` must point to `dim` readable doubles and `out` to `dim` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_phi_map(z: *const f64, dim: usize, out: *mut f64) -> HlStatus {
    guard(|| {
        if z.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let p = Point::new(std::slice::from_raw_parts(z, dim).to_vec()).map_err(lift)?;
        let w = phi_map(&p).map_err(lift)?;
        std::slice::from_raw_parts_mut(out, dim).copy_from_slice(w.coords());
        Ok(())
    })
}
