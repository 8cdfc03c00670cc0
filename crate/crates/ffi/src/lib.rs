//! C interface to `emgreen`.
//!
//! Models and operators are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns an
//! [`EgStatus`]; the message of the last failure on the calling thread is
//! available from [`eg_last_error_message`]. Complex numbers cross the
//! boundary as [`EgComplex`] pairs and matrices as row-major arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use emgreen::config::MediumFile;
use emgreen::dispersion::{xi_map, PermittivityModel};
use emgreen::helmholtz::{norm_bound, DiscreteHelmholtz, Grid1D, OperatorKind};
use emgreen::Error;
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    PoleProximity = 4,
    InvalidModel = 5,
    GapViolation = 6,
    Periodicity = 7,
    Singular = 8,
    Quadrature = 9,
    NonDecaying = 10,
    NoConvergence = 11,
    Dimension = 12,
    Config = 13,
    Panic = 14,
}

impl From<&Error> for EgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => EgStatus::Domain,
            Error::PoleProximity { .. } => EgStatus::PoleProximity,
            Error::InvalidModel(_) => EgStatus::InvalidModel,
            Error::GapViolation(_) => EgStatus::GapViolation,
            Error::Periodicity(_) => EgStatus::Periodicity,
            Error::Singular { .. } => EgStatus::Singular,
            Error::Quadrature { .. } => EgStatus::Quadrature,
            Error::NonDecaying { .. } => EgStatus::NonDecaying,
            Error::NoConvergence { .. } => EgStatus::NoConvergence,
            Error::Dimension { .. } => EgStatus::Dimension,
            Error::Config(_) => EgStatus::Config,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EgComplex {
    pub re: f64,
    pub im: f64,
}

impl From<EgComplex> for Complex64 {
    fn from(c: EgComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for EgComplex {
    fn from(c: Complex64) -> Self {
        EgComplex { re: c.re, im: c.im }
    }
}

/// Layered permittivity model.
pub struct EgModel {
    inner: PermittivityModel,
}

/// Assembled and lazily factored Helmholtz operator.
pub struct EgOperator {
    inner: DiscreteHelmholtz,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Status(EgStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(EgStatus::NullPointer, format!("{what} is null"))
}

// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EgStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            EgStatus::from(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            EgStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn model_ref<'a>(p: *const EgModel) -> Result<&'a EgModel, Failure> {
    p.as_ref().ok_or_else(|| null("model"))
}

unsafe fn operator_ref<'a>(p: *const EgOperator) -> Result<&'a EgOperator, Failure> {
    p.as_ref().ok_or_else(|| null("operator"))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length in bytes, or 0
/// when no error has occurred.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn eg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parses a medium description in TOML.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_model_from_toml(text: *const c_char, out: *mut *mut EgModel) -> EgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure::Status(EgStatus::InvalidUtf8, e.to_string()))?;
        let inner = MediumFile::parse(text)?.into_model()?;
        *out = Box::into_raw(Box::new(EgModel { inner }));
        Ok(())
    })
}

/// Vacuum model.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_model_vacuum(out: *mut *mut EgModel) -> EgStatus {
    guard(|| {
        *out_ref(out, "out")? = Box::into_raw(Box::new(EgModel { inner: PermittivityModel::vacuum() }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eg_model_free(model: *mut EgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// ε(x, z) for Im z ≥ 0.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_model_eval(model: *const EgModel, x: f64, z: EgComplex, out: *mut EgComplex) -> EgStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out_ref(out, "out")?;
        *out = m.inner.eval_permittivity(x, z.into())?.into();
        Ok(())
    })
}

unsafe fn assemble(
    model: *const EgModel,
    grid: emgreen::Result<Grid1D>,
    kind: OperatorKind,
    out: *mut *mut EgOperator,
) -> EgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let m = model_ref(model)?;
        let inner = DiscreteHelmholtz::assemble(grid?, &m.inner, kind)?;
        *out = Box::into_raw(Box::new(EgOperator { inner }));
        Ok(())
    })
}

/// Dispersive operator on `n` interior points of a Dirichlet cell [0, length].
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_helmholtz_assemble(
    model: *const EgModel,
    length: f64,
    n: usize,
    z: EgComplex,
    out: *mut *mut EgOperator,
) -> EgStatus {
    assemble(model, Grid1D::dirichlet(length, n), OperatorKind::Dispersive { z: z.into() }, out)
}

/// Dispersive operator on a Bloch cell with wavevector `k`.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_helmholtz_assemble_bloch(
    model: *const EgModel,
    length: f64,
    n: usize,
    k: EgComplex,
    z: EgComplex,
    out: *mut *mut EgOperator,
) -> EgStatus {
    assemble(model, Grid1D::bloch(length, n, k.into()), OperatorKind::Dispersive { z: z.into() }, out)
}

/// Two-frequency operator z²ε(ξ) + d²/dx² on a Dirichlet cell.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_helmholtz_assemble_two_frequency(
    model: *const EgModel,
    length: f64,
    n: usize,
    z: EgComplex,
    xi: EgComplex,
    out: *mut *mut EgOperator,
) -> EgStatus {
    assemble(
        model,
        Grid1D::dirichlet(length, n),
        OperatorKind::TwoFrequency { z: z.into(), xi: xi.into() },
        out,
    )
}

/// # Safety
/// `op` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eg_operator_free(op: *mut EgOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Number of grid points of an operator.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eg_operator_len(op: *const EgOperator) -> usize {
    op.as_ref().map_or(0, |o| o.inner.grid().len())
}

/// Solves H·field = source; `residual` (may be null) receives the relative
/// residual.
///
/// # Safety
/// `source` and `field` must each hold `len` elements, `len` must equal the
/// operator size.
#[no_mangle]
pub unsafe extern "C" fn eg_solve(
    op: *const EgOperator,
    source: *const EgComplex,
    field: *mut EgComplex,
    len: usize,
    residual: *mut f64,
) -> EgStatus {
    guard(|| {
        let op = operator_ref(op)?;
        if source.is_null() || field.is_null() {
            return Err(null("source or field"));
        }
        let n = op.inner.grid().len();
        if len != n {
            return Err(Error::Dimension { expected: n, got: len }.into());
        }
        let src: Vec<Complex64> = std::slice::from_raw_parts(source, len).iter().map(|&c| c.into()).collect();
        let sol = op.inner.solve(&src)?;
        let dst = std::slice::from_raw_parts_mut(field, len);
        for (d, v) in dst.iter_mut().zip(sol.field) {
            *d = v.into();
        }
        if let Some(r) = residual.as_mut() {
            *r = sol.residual;
        }
        Ok(())
    })
}

/// Spectral norm of H⁻¹.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_inverse_norm(op: *const EgOperator, out: *mut f64) -> EgStatus {
    guard(|| {
        let op = operator_ref(op)?;
        *out_ref(out, "out")? = op.inner.inverse_norm()?;
        Ok(())
    })
}

/// Continuum bound 1/(|z| Im z) on the norm of H⁻¹.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_norm_bound(z: EgComplex, out: *mut f64) -> EgStatus {
    guard(|| {
        if !(z.im > 0.0) {
            return Err(Failure::Status(EgStatus::Domain, format!("norm bound needs Im z > 0, got {}", z.im)));
        }
        *out_ref(out, "out")? = norm_bound(z.into());
        Ok(())
    })
}

/// Green samples G[i][j] written row-major into `out`, which must hold
/// `len = n·n` elements.
///
/// # Safety
/// `out` must point to `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn eg_green_matrix(op: *const EgOperator, out: *mut EgComplex, len: usize) -> EgStatus {
    guard(|| {
        let op = operator_ref(op)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let n = op.inner.grid().len();
        if len != n * n {
            return Err(Error::Dimension { expected: n * n, got: len }.into());
        }
        let g = op.inner.green_matrix()?;
        let dst = std::slice::from_raw_parts_mut(out, len);
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = g.values[(i, j)].into();
            }
        }
        Ok(())
    })
}

/// ξ = ν + (ω0² − ν²)/z.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eg_xi_map(z: EgComplex, nu: f64, omega0: f64, out: *mut EgComplex) -> EgStatus {
    guard(|| {
        *out_ref(out, "out")? = xi_map(z.into(), nu, omega0)?.into();
        Ok(())
    })
}
