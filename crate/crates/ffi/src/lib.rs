//! C interface to the yardstick simulator.
//!
//! Objects are opaque handles created by `ys_*_new` or returned through out
//! pointers, and released with the matching `ys_*_free`. Every fallible call
//! returns a [`YsStatus`]; on failure `ys_last_error()` describes the cause
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use yardstick::boost::{boost_nw, BoostParams};
use yardstick::dispersion::ModelParams;
use yardstick::evolution::{evolve_free, lightcone_fraction_about};
use yardstick::grid::SpatialGrid;
use yardstick::states::{convert_yardstick, density, make_packet, DensityProfile, PacketShape, WavePacket, Yardstick};
use yardstick::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    WrongYardstick = 3,
    NumericalGuard = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YsYardstick {
    NewtonWigner = 0,
    Field = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YsShape {
    Box = 0,
    Gaussian = 1,
}

/// Model constants `m`, `c`, `λ`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct YsModel {
    pub m: f64,
    pub c: f64,
    pub lambda: f64,
}

pub struct YsGrid(Arc<SpatialGrid>);
pub struct YsPacket(WavePacket);
pub struct YsDensity(DensityProfile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> YsStatus {
    match e {
        Error::WrongYardstick { .. } => YsStatus::WrongYardstick,
        e if e.is_numerical_guard() => YsStatus::NumericalGuard,
        _ => YsStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), YsStatus>) -> YsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => YsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            YsStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, YsStatus>;
}

impl<T> OrStatus<T> for yardstick::Result<T> {
    fn or_status(self) -> Result<T, YsStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, YsStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        YsStatus::NullPointer
    })
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), YsStatus> {
    if out.is_null() {
        set_error("null out pointer".into());
        return Err(YsStatus::NullPointer);
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), YsStatus> {
    if buf.is_null() {
        set_error("null buffer".into());
        return Err(YsStatus::NullPointer);
    }
    if len < src.len() {
        set_error(format!("buffer holds {len} values, {} needed", src.len()));
        return Err(YsStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ys_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default model constants (atomic units).
#[no_mangle]
pub extern "C" fn ys_model_default() -> YsModel {
    let d = ModelParams::default();
    YsModel { m: d.m, c: d.c, lambda: d.lambda }
}

/// Periodic grid of `n` points on `[z_min, z_max)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_grid_new(n: usize, z_min: f64, z_max: f64, out: *mut *mut YsGrid) -> YsStatus {
    guard(|| put(out, YsGrid(SpatialGrid::new(n, z_min, z_max).or_status()?)))
}

/// # Safety
/// `g` must come from `ys_grid_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ys_grid_free(g: *mut YsGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn ys_grid_len(g: *const YsGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.n_points())
}

/// # Safety
/// `g` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ys_grid_positions(g: *const YsGrid, buf: *mut f64, len: usize) -> YsStatus {
    guard(|| copy_out(deref(g)?.0.positions(), buf, len))
}

/// Normalized Newton-Wigner packet with the given shape.
///
/// # Safety
/// `g` must be a live grid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_packet_new(
    g: *const YsGrid,
    shape: YsShape,
    w: f64,
    center: f64,
    model: YsModel,
    out: *mut *mut YsPacket,
) -> YsStatus {
    guard(|| {
        let g = deref(g)?;
        let s = match shape {
            YsShape::Box => PacketShape::boxed(w, center),
            YsShape::Gaussian => PacketShape::gaussian(w, center),
        };
        let pr = ModelParams::new(model.m, model.c, model.lambda).or_status()?;
        put(out, YsPacket(make_packet(&s, &g.0, &pr).or_status()?))
    })
}

/// # Safety
/// `p` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ys_packet_free(p: *mut YsPacket) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live packet handle.
#[no_mangle]
pub unsafe extern "C" fn ys_packet_yardstick(p: *const YsPacket) -> YsYardstick {
    match p.as_ref().map(|p| p.0.yardstick()) {
        Some(Yardstick::Field) => YsYardstick::Field,
        _ => YsYardstick::NewtonWigner,
    }
}

/// Free evolution to time `t`; writes a new handle.
///
/// # Safety
/// `p` must be a live packet handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_packet_evolve(p: *const YsPacket, t: f64, out: *mut *mut YsPacket) -> YsStatus {
    guard(|| put(out, YsPacket(evolve_free(&deref(p)?.0, t).or_status()?)))
}

/// Re-expresses the state in the other yardstick.
///
/// # Safety
/// `p` must be a live packet handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_packet_convert(p: *const YsPacket, target: YsYardstick, out: *mut *mut YsPacket) -> YsStatus {
    let y = match target {
        YsYardstick::NewtonWigner => Yardstick::NewtonWigner,
        YsYardstick::Field => Yardstick::Field,
    };
    guard(|| put(out, YsPacket(convert_yardstick(&deref(p)?.0, y).or_status()?)))
}

/// Newton-Wigner boost by velocity `v`. The result lives on a larger grid.
///
/// # Safety
/// `p` must be a live packet handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_packet_boost(p: *const YsPacket, v: f64, out: *mut *mut YsPacket) -> YsStatus {
    guard(|| {
        let p = &deref(p)?.0;
        let b = BoostParams::from_velocity(p.params(), v).or_status()?;
        put(out, YsPacket(boost_nw(p, &b).or_status()?))
    })
}

/// Position density `|ψ(z)|²`, optionally rescaled to unit integral.
///
/// # Safety
/// `p` must be a live packet handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_packet_density(p: *const YsPacket, normalize: bool, out: *mut *mut YsDensity) -> YsStatus {
    guard(|| put(out, YsDensity(density(&deref(p)?.0, normalize))))
}

/// # Safety
/// `d` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ys_density_free(d: *mut YsDensity) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be null or a live density handle.
#[no_mangle]
pub unsafe extern "C" fn ys_density_len(d: *const YsDensity) -> usize {
    d.as_ref().map_or(0, |d| d.0.values().len())
}

/// # Safety
/// `d` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ys_density_values(d: *const YsDensity, buf: *mut f64, len: usize) -> YsStatus {
    guard(|| copy_out(deref(d)?.0.values(), buf, len))
}

/// # Safety
/// `d` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ys_density_positions(d: *const YsDensity, buf: *mut f64, len: usize) -> YsStatus {
    guard(|| copy_out(deref(d)?.0.grid().positions(), buf, len))
}

/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_density_integral(d: *const YsDensity, out: *mut f64) -> YsStatus {
    guard(|| {
        let v = deref(d)?.0.integral();
        *out.as_mut().ok_or(YsStatus::NullPointer)? = v;
        Ok(())
    })
}

/// Share of a normalized density outside `center ± (w + c|t|)`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ys_lightcone_fraction(
    d: *const YsDensity,
    center: f64,
    w: f64,
    t: f64,
    c: f64,
    out: *mut f64,
) -> YsStatus {
    guard(|| {
        let rep = lightcone_fraction_about(&deref(d)?.0, center, w, t, c).or_status()?;
        *out.as_mut().ok_or(YsStatus::NullPointer)? = rep.fraction_outside;
        Ok(())
    })
}
