//! C ABI over the `isochrone` library.
//!
//! Objects are opaque heap handles created by `*_new`/`*_from_*` functions
//! and released with the matching `*_free`. Every fallible call returns an
//! [`IsoStatus`] and writes its result through an out pointer; on failure
//! the message is kept per thread and can be read with
//! [`iso_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use isochrone::cli::Family;
use isochrone::dynamics::{period_ode, period_quadrature, DEFAULT_ODE_TOL};
use isochrone::lambert::lambert_w0;
use isochrone::potential::check_necessary_conditions;
use isochrone::{Error, Involution, Potential};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    Parameter = 3,
    Domain = 4,
    NoConvergence = 5,
    BracketFailure = 6,
    UnboundedSide = 7,
    Integration = 8,
    NonFinite = 9,
    Panic = 10,
}

impl From<&Error> for IsoStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain { .. } => IsoStatus::Domain,
            Error::Parameter(_) => IsoStatus::Parameter,
            Error::BracketFailure { .. } => IsoStatus::BracketFailure,
            Error::NoConvergence { .. } => IsoStatus::NoConvergence,
            Error::UnboundedSide { .. } => IsoStatus::UnboundedSide,
            Error::StepUnderflow { .. } | Error::DomainExit { .. } | Error::CrossingDetection { .. } => {
                IsoStatus::Integration
            }
            Error::NonFinite(_) => IsoStatus::NonFinite,
        }
    }
}

/// Opaque involution handle.
pub struct IsoInvolution(Involution);

/// Opaque potential handle.
pub struct IsoPotential(Potential);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Status(IsoStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F>(f: F) -> IsoStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            IsoStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            IsoStatus::from(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            IsoStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(IsoStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::Status(IsoStatus::InvalidString, format!("{what} is not valid UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies the calling thread's last error message into `buf` as a
/// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
/// message length in bytes, excluding the terminator. An empty message
/// means the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn iso_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn iso_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Principal branch of the Lambert W function on `[-1/e, ∞)`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn iso_lambert_w0(x: f64, out: *mut f64) -> IsoStatus {
    guard(|| write(out, lambert_w0(x)?))
}

/// Builds an involution from a family address such as
/// `"stillinger:lambda=1,a=1"`, `"quintic"` or a JSON object.
///
/// # Safety
/// `address` must be a NUL-terminated string; `out` must be valid for a
/// pointer write. The handle is released with [`iso_involution_free`].
#[no_mangle]
pub unsafe extern "C" fn iso_involution_from_address(
    address: *const c_char,
    out: *mut *mut IsoInvolution,
) -> IsoStatus {
    guard(|| {
        let h = Family::parse(read_str(address, "address")?)?.involution()?;
        write(out, Box::into_raw(Box::new(IsoInvolution(h))))
    })
}

/// Releases an involution handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iso_involution_free(h: *mut IsoInvolution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `h(x)`.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn iso_involution_eval(h: *const IsoInvolution, x: f64, out: *mut f64) -> IsoStatus {
    guard(|| write(out, borrow(h, "involution")?.0.eval(x)?))
}

/// `h'(x)`, analytic when available.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn iso_involution_deriv(h: *const IsoInvolution, x: f64, out: *mut f64) -> IsoStatus {
    guard(|| write(out, borrow(h, "involution")?.0.deriv(x)?))
}

/// Open domain `(lo, hi)` of the involution; endpoints may be infinite.
///
/// # Safety
/// `h` must be a live handle; `lo` and `hi` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iso_involution_domain(h: *const IsoInvolution, lo: *mut f64, hi: *mut f64) -> IsoStatus {
    guard(|| {
        let d = borrow(h, "involution")?.0.domain();
        write(lo, d.lo)?;
        write(hi, d.hi)
    })
}

/// Builds the potential `V = ω²(x - h(x))²/8` of a family address. Also
/// accepts `"harmonic"` and `"quartic-control"`.
///
/// # Safety
/// `address` must be a NUL-terminated string; `out` must be valid for a
/// pointer write. The handle is released with [`iso_potential_free`].
#[no_mangle]
pub unsafe extern "C" fn iso_potential_from_address(
    address: *const c_char,
    omega: f64,
    out: *mut *mut IsoPotential,
) -> IsoStatus {
    guard(|| {
        let p = Family::parse(read_str(address, "address")?)?.potential(omega)?;
        write(out, Box::into_raw(Box::new(IsoPotential(p))))
    })
}

/// Builds the potential of an existing involution. `h` stays owned by the
/// caller.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_from_involution(
    h: *const IsoInvolution,
    omega: f64,
    out: *mut *mut IsoPotential,
) -> IsoStatus {
    guard(|| {
        let p = Potential::from_involution(borrow(h, "involution")?.0.clone(), omega)?;
        write(out, Box::into_raw(Box::new(IsoPotential(p))))
    })
}

/// Releases a potential handle. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_free(p: *mut IsoPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `V(x)`.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_v(p: *const IsoPotential, x: f64, out: *mut f64) -> IsoStatus {
    guard(|| write(out, borrow(p, "potential")?.0.v(x)?))
}

/// Force `g(x) = V'(x)`.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_g(p: *const IsoPotential, x: f64, out: *mut f64) -> IsoStatus {
    guard(|| write(out, borrow(p, "potential")?.0.g(x)?))
}

/// `2π/ω`.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_expected_period(p: *const IsoPotential, out: *mut f64) -> IsoStatus {
    guard(|| write(out, borrow(p, "potential")?.0.expected_period()))
}

/// Period of the orbit of energy `energy`, by adaptive quadrature.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_period_quadrature(
    p: *const IsoPotential,
    energy: f64,
    out: *mut f64,
) -> IsoStatus {
    guard(|| write(out, period_quadrature(&borrow(p, "potential")?.0, energy)?))
}

/// Period of the orbit of energy `energy`, by integrating the equation of
/// motion. `tol <= 0` selects the default tolerance.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_period_ode(
    p: *const IsoPotential,
    energy: f64,
    tol: f64,
    out: *mut f64,
) -> IsoStatus {
    guard(|| {
        let tol = if tol > 0.0 { tol } else { DEFAULT_ODE_TOL };
        write(out, period_ode(&borrow(p, "potential")?.0, energy, tol)?)
    })
}

/// Normalized residuals of the local derivative identities at the origin.
/// Both are below 1e-4 for isochronous potentials.
///
/// # Safety
/// `p` must be a live handle; `v4` and `v6` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn iso_potential_necessary_residuals(
    p: *const IsoPotential,
    v4: *mut f64,
    v6: *mut f64,
) -> IsoStatus {
    guard(|| {
        let r = check_necessary_conditions(&borrow(p, "potential")?.0)?;
        write(v4, r.v4_normalized)?;
        write(v6, r.v6_normalized)
    })
}
