//! C ABI over `scatlab`.
//!
//! Fields cross the boundary as opaque `ScatField` handles owned by the
//! caller and released with [`scat_field_free`]. Every fallible call
//! returns a [`ScatStatus`]; on failure [`scat_last_error`] describes the
//! cause for the calling thread. Complex samples are exchanged as
//! interleaved `re, im` doubles in row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use scatlab::exponents::{self, PhysParams};
use scatlab::scattering::{born_term, solve_map, BornSettings, MapKind, MapSettings};
use scatlab::spectral::io::{load_field, save_field};
use scatlab::spectral::{energy, lp_power, mass, sigma_norm, Field, FreeFlow, Grid, Profile};
use scatlab::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Precondition = 3,
    SizeMismatch = 4,
    /// Non-finite values, non-integrable tails, failed contraction or fits.
    Numerical = 5,
    Config = 6,
    Format = 7,
    Io = 8,
    /// A Rust panic was caught at the boundary.
    Panic = 9,
}

/// Opaque field handle.
pub struct ScatField {
    inner: Field,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ScatNorms {
    pub mass: f64,
    pub l2: f64,
    pub sigma: f64,
    /// `½‖∇f‖² + ‖f‖_{p+2}^{p+2}/(p+2)`.
    pub energy: f64,
    /// `‖f‖_{p+2}^{p+2}`.
    pub lp_power: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ScatExponents {
    pub strauss: f64,
    /// `2(2p+1)/(p+2)`.
    pub q_unsharp: f64,
    /// `NaN` when undefined for `(d, p)`.
    pub canonical_q: f64,
    pub theta: f64,
    pub mass_subcritical: bool,
    pub scattering_regime: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ScatBornInfo {
    pub norm: f64,
    pub duality_lhs: f64,
    pub duality_rhs: f64,
    pub duality_gap: f64,
    pub tail_fraction: f64,
    pub horizon: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ScatMapInfo {
    pub displacement_norm: f64,
    pub born_norm: f64,
    pub error_norm: f64,
    pub iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ScatStatus {
    match e {
        Error::InvalidParameter(_) => ScatStatus::InvalidParameter,
        Error::Precondition(_) => ScatStatus::Precondition,
        Error::SizeMismatch { .. } => ScatStatus::SizeMismatch,
        Error::NonFinite { .. } | Error::NonIntegrableTail { .. } | Error::NotContracting(_) | Error::Fit(_) => {
            ScatStatus::Numerical
        }
        Error::Config(_) => ScatStatus::Config,
        Error::Format(_) => ScatStatus::Format,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => ScatStatus::Io,
    }
}

struct Null;

enum Failure {
    Lib(Error),
    Null,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<Null> for Failure {
    fn from(_: Null) -> Self {
        Failure::Null
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ScatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScatStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null)) => {
            set_error("null pointer argument".into());
            ScatStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            ScatStatus::Panic
        }
    }
}

unsafe fn field_ref<'a>(f: *const ScatField) -> Result<&'a Field, Null> {
    f.as_ref().map(|h| &h.inner).ok_or(Null)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Null> {
    if out.is_null() {
        return Err(Null);
    }
    out.write(value);
    Ok(())
}

unsafe fn emit_field(out: *mut *mut ScatField, f: Field) -> Result<(), Null> {
    write_out(out, Box::into_raw(Box::new(ScatField { inner: f })))
}

unsafe fn path_arg(path: *const c_char) -> Result<String, Failure> {
    if path.is_null() {
        return Err(Failure::Null);
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::Lib(Error::InvalidParameter("path is not valid UTF-8".into())))
}

fn params_for(f: &Field, p: f64) -> Result<PhysParams, Error> {
    PhysParams::new(f.grid().dim(), p)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn scat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn scat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Field on a `d`-dimensional periodic box `[-L/2, L/2)^d` with `n` points
/// per axis from `2 n^d` interleaved doubles.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_field_new(
    d: u32,
    n: usize,
    length: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut ScatField,
) -> ScatStatus {
    guard(|| {
        if values.is_null() {
            return Err(Failure::Null);
        }
        let grid = Grid::new(d, n, length)?;
        if len != 2 * grid.len() {
            return Err(Error::SizeMismatch { expected: 2 * grid.len(), got: len }.into());
        }
        let raw = std::slice::from_raw_parts(values, len);
        let v = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        emit_field(out, Field::new(grid, v)?)?;
        Ok(())
    })
}

/// Gaussian `exp(-|x|²/(2w²))` scaled to L² norm `amplitude`, on a grid
/// that holds its free evolution up to `horizon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_field_gaussian(
    d: u32,
    width: f64,
    amplitude: f64,
    horizon: f64,
    out: *mut *mut ScatField,
) -> ScatStatus {
    guard(|| {
        if !(amplitude.is_finite() && amplitude >= 0.0 && horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need amplitude, horizon >= 0, got {amplitude}, {horizon}"
            ))
            .into());
        }
        let prof = Profile::Gaussian { width };
        let grid = prof.grid_for(d, 1.0, horizon)?;
        emit_field(out, prof.unit_mass(grid).scale(amplitude))?;
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scat_field_free(f: *mut ScatField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Grid of a field.
///
/// # Safety
/// `f` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_field_grid(
    f: *const ScatField,
    d: *mut u32,
    n: *mut usize,
    length: *mut f64,
) -> ScatStatus {
    guard(|| {
        let g = *field_ref(f)?.grid();
        write_out(d, g.dim())?;
        write_out(n, g.points_per_axis())?;
        write_out(length, g.length())?;
        Ok(())
    })
}

/// Number of doubles [`scat_field_values`] writes: `2 n^d`.
///
/// # Safety
/// `f` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn scat_field_value_count(f: *const ScatField) -> usize {
    f.as_ref().map_or(0, |h| 2 * h.inner.grid().len())
}

/// Copies interleaved samples into `buf`.
///
/// # Safety
/// `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn scat_field_values(f: *const ScatField, buf: *mut f64, len: usize) -> ScatStatus {
    guard(|| {
        let field = field_ref(f)?;
        if buf.is_null() {
            return Err(Failure::Null);
        }
        let need = 2 * field.grid().len();
        if len != need {
            return Err(Error::SizeMismatch { expected: need, got: len }.into());
        }
        let out = std::slice::from_raw_parts_mut(buf, len);
        for (c, z) in out.chunks_exact_mut(2).zip(field.values()) {
            c[0] = z.re;
            c[1] = z.im;
        }
        Ok(())
    })
}

/// Reads a binary field file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_field_read(path: *const c_char, out: *mut *mut ScatField) -> ScatStatus {
    guard(|| {
        let p = path_arg(path)?;
        emit_field(out, load_field(p)?)?;
        Ok(())
    })
}

/// Writes a binary field file.
///
/// # Safety
/// `f` must be a live handle; `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn scat_field_write(f: *const ScatField, path: *const c_char) -> ScatStatus {
    guard(|| {
        let field = field_ref(f)?;
        save_field(path_arg(path)?, field)?;
        Ok(())
    })
}

/// `e^{itΔ}f` as a new handle.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_propagate(f: *const ScatField, t: f64, out: *mut *mut ScatField) -> ScatStatus {
    guard(|| {
        let field = field_ref(f)?;
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time must be finite, got {t}")).into());
        }
        emit_field(out, FreeFlow::new(*field.grid()).propagate(field, t))?;
        Ok(())
    })
}

/// Norms of a field; `p` enters the energy and the Lebesgue power.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_norms(f: *const ScatField, p: f64, out: *mut ScatNorms) -> ScatStatus {
    guard(|| {
        let field = field_ref(f)?;
        params_for(field, p)?;
        let m = mass(field);
        write_out(
            out,
            ScatNorms {
                mass: m,
                l2: m.sqrt(),
                sigma: sigma_norm(field),
                energy: energy(field, p),
                lp_power: lp_power(field, p + 2.0),
            },
        )?;
        Ok(())
    })
}

/// Exponent bookkeeping for `(d, p)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_exponents(d: u32, p: f64, out: *mut ScatExponents) -> ScatStatus {
    guard(|| {
        let params = PhysParams::new(d, p)?;
        write_out(
            out,
            ScatExponents {
                strauss: exponents::strauss_exponent(d)?,
                q_unsharp: exponents::unsharpened_q(params),
                canonical_q: exponents::canonical_q(params).unwrap_or(f64::NAN),
                theta: exponents::theta(params).unwrap_or(f64::NAN),
                mass_subcritical: params.is_mass_subcritical(),
                scattering_regime: params.in_scattering_regime(),
            },
        )?;
        Ok(())
    })
}

/// Born term `B(f)` as a new handle, with the duality identity.
///
/// # Safety
/// `f` must be a live handle; `out` and `info` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_born(
    f: *const ScatField,
    p: f64,
    out: *mut *mut ScatField,
    info: *mut ScatBornInfo,
) -> ScatStatus {
    guard(|| {
        let field = field_ref(f)?;
        if out.is_null() || info.is_null() {
            return Err(Failure::Null);
        }
        let r = born_term(field, params_for(field, p)?, &BornSettings::default())?;
        write_out(
            info,
            ScatBornInfo {
                norm: r.norm,
                duality_lhs: r.duality_lhs,
                duality_rhs: r.duality_rhs,
                duality_gap: r.duality_gap,
                tail_fraction: r.tail_fraction,
                horizon: r.horizon,
            },
        )?;
        emit_field(out, r.born)?;
        Ok(())
    })
}

unsafe fn map_call(
    f: *const ScatField,
    p: f64,
    kind: MapKind,
    out: *mut *mut ScatField,
    info: *mut ScatMapInfo,
) -> ScatStatus {
    guard(|| {
        let field = field_ref(f)?;
        if out.is_null() || info.is_null() {
            return Err(Failure::Null);
        }
        let sol = solve_map(field, params_for(field, p)?, kind, &MapSettings::default())?;
        write_out(
            info,
            ScatMapInfo {
                displacement_norm: sol.displacement_norm,
                born_norm: sol.born_norm,
                error_norm: sol.error_norm,
                iterations: sol.iterations,
            },
        )?;
        emit_field(out, sol.image)?;
        Ok(())
    })
}

/// Scattering map `S(f)` as a new handle.
///
/// # Safety
/// `f` must be a live handle; `out` and `info` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_scatter(
    f: *const ScatField,
    p: f64,
    out: *mut *mut ScatField,
    info: *mut ScatMapInfo,
) -> ScatStatus {
    map_call(f, p, MapKind::Scattering, out, info)
}

/// Wave operator `W(f)` as a new handle.
///
/// # Safety
/// `f` must be a live handle; `out` and `info` must be writable.
#[no_mangle]
pub unsafe extern "C" fn scat_wave(
    f: *const ScatField,
    p: f64,
    out: *mut *mut ScatField,
    info: *mut ScatMapInfo,
) -> ScatStatus {
    map_call(f, p, MapKind::Wave, out, info)
}
