//! C ABI over the `equitangent` library.
//!
//! Objects cross the boundary as opaque handles created by `*_new` style
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`EtStatus`]; on failure a message is available from
//! [`et_last_error`] on the same thread. Output arrays are caller-allocated
//! with the documented length. Non-null pointers must be valid for the
//! documented number of elements; handles must come from this library and
//! be freed at most once.

// pointer validity is the caller's contract, stated above
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use equitangent::bigon::{bigon_commutators, BigonState};
use equitangent::chain::{chain_to_framed, framed_to_chain, random_generic_chain, OrientedChain, SampleMargins};
use equitangent::distribution::{bracket_rank, kernel_field};
use equitangent::framed::{compute_framing, framing_obstruction_even, FramedPolygon, Polygon};
use equitangent::geom::Vec2;
use equitangent::poncelet::{euler_fuss_residual, poncelet_closure, BicentricConfig};
use equitangent::spectral::spectrum;
use equitangent::{Error, ErrorKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtStatus {
    Ok = 0,
    /// Malformed or out-of-domain input.
    InvalidInput = 1,
    /// A mathematical precondition does not hold.
    Precondition = 2,
    /// A numerical procedure missed its accuracy target.
    Numerical = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// Internal panic caught at the boundary.
    Panic = 5,
}

/// Oriented chain of tangent circles.
pub struct EtChain(OrientedChain);

/// Polygon with a framing.
pub struct EtFramedPolygon(FramedPolygon);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> EtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EtStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            EtStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            match e.kind() {
                ErrorKind::Input => EtStatus::InvalidInput,
                ErrorKind::Precondition => EtStatus::Precondition,
                ErrorKind::Numerical => EtStatus::Numerical,
            }
        }
        Err(_) => {
            set_error("internal panic".into());
            EtStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees non-null pointers are valid
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: as above
    unsafe { p.as_mut() }.ok_or(Failure::Null(name))
}

fn slice<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: the caller guarantees `len` readable doubles
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a>(p: *mut f64, len: usize, name: &'static str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: the caller guarantees `len` writable doubles
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn points(xy: &[f64]) -> Vec<Vec2> {
    xy.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect()
}

fn write_points(dst: &mut [f64], pts: &[Vec2]) {
    for (d, p) in dst.chunks_exact_mut(2).zip(pts) {
        d[0] = p.x;
        d[1] = p.y;
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn et_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Chain from `n` centers (`xy`, `2n` doubles) and signed radii (`n`
/// doubles). Tangency is checked against `tol`.
#[no_mangle]
pub extern "C" fn et_chain_new(xy: *const f64, radii: *const f64, n: usize, tol: f64, result: *mut *mut EtChain) -> EtStatus {
    guard(|| {
        let centers = points(slice(xy, 2 * n, "xy")?);
        let radii = slice(radii, n, "radii")?.to_vec();
        let slot = out(result, "result")?;
        let chain = OrientedChain::with_tol(centers, radii, tol)?;
        *slot = Box::into_raw(Box::new(EtChain(chain)));
        Ok(())
    })
}

/// Random generic chain of `n >= 4` circles.
#[no_mangle]
pub extern "C" fn et_chain_random(n: usize, seed: u64, result: *mut *mut EtChain) -> EtStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_generic_chain(&mut rng, n, &SampleMargins::default())?;
        *slot = Box::into_raw(Box::new(EtChain(chain)));
        Ok(())
    })
}

/// Releases a chain; null is ignored.
#[no_mangle]
pub extern "C" fn et_chain_free(chain: *mut EtChain) {
    if !chain.is_null() {
        // SAFETY: created by Box::into_raw in this crate and freed once
        drop(unsafe { Box::from_raw(chain) });
    }
}

/// Number of circles, or 0 for null.
#[no_mangle]
pub extern "C" fn et_chain_len(chain: *const EtChain) -> usize {
    // SAFETY: null or a live handle
    unsafe { chain.as_ref() }.map_or(0, |c| c.0.len())
}

/// Copies the centers (`2n` doubles) and signed radii (`n` doubles).
#[no_mangle]
pub extern "C" fn et_chain_get(chain: *const EtChain, xy: *mut f64, radii: *mut f64) -> EtStatus {
    guard(|| {
        let c = &non_null(chain, "chain")?.0;
        write_points(slice_mut(xy, 2 * c.len(), "xy")?, c.centers());
        slice_mut(radii, c.len(), "radii")?.copy_from_slice(c.signed_radii());
        Ok(())
    })
}

/// Rank of the distribution plus its first brackets (`2n` when bracket
/// generating) with commutator step `h`.
#[no_mangle]
pub extern "C" fn et_chain_bracket_rank(chain: *const EtChain, h: f64, rank: *mut usize) -> EtStatus {
    guard(|| {
        let c = &non_null(chain, "chain")?.0;
        let slot = out(rank, "rank")?;
        *slot = bracket_rank(c, h)?.rank;
        Ok(())
    })
}

/// The kernel field: vertex velocities (`2n` doubles) and radius rates
/// (`n` doubles).
#[no_mangle]
pub extern "C" fn et_chain_kernel_field(chain: *const EtChain, velocities: *mut f64, rates: *mut f64) -> EtStatus {
    guard(|| {
        let c = &non_null(chain, "chain")?.0;
        let f = kernel_field(c)?;
        write_points(slice_mut(velocities, 2 * c.len(), "velocities")?, &f.vertex_velocities);
        slice_mut(rates, c.len(), "rates")?.copy_from_slice(&f.radius_rates);
        Ok(())
    })
}

/// Framed polygon of tangency points.
#[no_mangle]
pub extern "C" fn et_chain_to_framed(chain: *const EtChain, result: *mut *mut EtFramedPolygon) -> EtStatus {
    guard(|| {
        let c = &non_null(chain, "chain")?.0;
        let slot = out(result, "result")?;
        *slot = Box::into_raw(Box::new(EtFramedPolygon(chain_to_framed(c)?)));
        Ok(())
    })
}

/// Frames the polygon with vertices `xy` (`2n` doubles): the unique framing
/// for odd `n`, the base member of the family for even `n`.
#[no_mangle]
pub extern "C" fn et_framed_from_polygon(xy: *const f64, n: usize, tol: f64, result: *mut *mut EtFramedPolygon) -> EtStatus {
    guard(|| {
        let p = Polygon::new(points(slice(xy, 2 * n, "xy")?))?;
        let slot = out(result, "result")?;
        *slot = Box::into_raw(Box::new(EtFramedPolygon(compute_framing(&p, tol)?)));
        Ok(())
    })
}

/// Framed polygon from vertices (`2n` doubles) and framing directions in
/// radians (`n` doubles), validated against `tol`.
#[no_mangle]
pub extern "C" fn et_framed_new(
    xy: *const f64,
    directions: *const f64,
    n: usize,
    tol: f64,
    result: *mut *mut EtFramedPolygon,
) -> EtStatus {
    guard(|| {
        let p = Polygon::new(points(slice(xy, 2 * n, "xy")?))?;
        let d = slice(directions, n, "directions")?;
        let slot = out(result, "result")?;
        *slot = Box::into_raw(Box::new(EtFramedPolygon(FramedPolygon::new(p, d, tol)?)));
        Ok(())
    })
}

/// Releases a framed polygon; null is ignored.
#[no_mangle]
pub extern "C" fn et_framed_free(fp: *mut EtFramedPolygon) {
    if !fp.is_null() {
        // SAFETY: created by Box::into_raw in this crate and freed once
        drop(unsafe { Box::from_raw(fp) });
    }
}

/// Number of vertices, or 0 for null.
#[no_mangle]
pub extern "C" fn et_framed_len(fp: *const EtFramedPolygon) -> usize {
    // SAFETY: null or a live handle
    unsafe { fp.as_ref() }.map_or(0, |f| f.0.len())
}

/// Copies the vertices (`2n` doubles) and framing directions (`n`
/// doubles).
#[no_mangle]
pub extern "C" fn et_framed_get(fp: *const EtFramedPolygon, xy: *mut f64, directions: *mut f64) -> EtStatus {
    guard(|| {
        let f = &non_null(fp, "fp")?.0;
        write_points(slice_mut(xy, 2 * f.len(), "xy")?, f.polygon().vertices());
        slice_mut(directions, f.len(), "directions")?.copy_from_slice(&f.directions());
        Ok(())
    })
}

/// Largest framing residual over the sides.
#[no_mangle]
pub extern "C" fn et_framed_max_residual(fp: *const EtFramedPolygon, residual: *mut f64) -> EtStatus {
    guard(|| {
        let f = &non_null(fp, "fp")?.0;
        *out(residual, "residual")? = f.max_residual();
        Ok(())
    })
}

/// Chain of circles through consecutive vertex pairs tangent to the
/// framing.
#[no_mangle]
pub extern "C" fn et_framed_to_chain(fp: *const EtFramedPolygon, tol: f64, result: *mut *mut EtChain) -> EtStatus {
    guard(|| {
        let f = &non_null(fp, "fp")?.0;
        let slot = out(result, "result")?;
        *slot = Box::into_raw(Box::new(EtChain(framed_to_chain(f, tol)?)));
        Ok(())
    })
}

/// Framing obstruction of an even polygon (`2n` doubles); zero iff a
/// framing exists.
#[no_mangle]
pub extern "C" fn et_framing_obstruction_even(xy: *const f64, n: usize, obstruction: *mut f64) -> EtStatus {
    guard(|| {
        let p = Polygon::new(points(slice(xy, 2 * n, "xy")?))?;
        *out(obstruction, "obstruction")? = framing_obstruction_even(&p)?;
        Ok(())
    })
}

/// Eigenvalue magnitudes of the linearized flow for odd `n`; writes
/// `(n − 1)/2` values into `magnitudes`, whose capacity is `cap`.
#[no_mangle]
pub extern "C" fn et_spectrum(n: usize, magnitudes: *mut f64, cap: usize, len: *mut usize) -> EtStatus {
    guard(|| {
        let s = spectrum(n)?;
        let len = out(len, "len")?;
        *len = s.len();
        if cap < s.len() {
            return Err(Error::InvalidInput(format!("buffer holds {cap} values, need {}", s.len())).into());
        }
        slice_mut(magnitudes, s.len(), "magnitudes")?.copy_from_slice(&s);
        Ok(())
    })
}

/// Closure defect of `n` Poncelet steps from angle `start` between the
/// circle of radius `big_r` at the origin and the circle of radius `r`
/// centered at `(d, 0)`.
#[no_mangle]
pub extern "C" fn et_poncelet_closure(n: usize, big_r: f64, r: f64, d: f64, start: f64, defect: *mut f64) -> EtStatus {
    guard(|| {
        let cfg = BicentricConfig::new(n, big_r, r, d)?;
        *out(defect, "defect")? = poncelet_closure(&cfg, start)?.closure_defect;
        Ok(())
    })
}

/// Residual of Euler's (`n = 3`) or Fuss's (`n = 4`) relation.
#[no_mangle]
pub extern "C" fn et_euler_fuss_residual(n: usize, big_r: f64, r: f64, d: f64, residual: *mut f64) -> EtStatus {
    guard(|| {
        let cfg = BicentricConfig::new(n, big_r, r, d)?;
        *out(residual, "residual")? = euler_fuss_residual(&cfg)?;
        Ok(())
    })
}

/// Rank of the three generators and their two brackets at a bigon state.
#[no_mangle]
pub extern "C" fn et_bigon_rank(p: f64, q: f64, r: f64, alpha: f64, phi: f64, h: f64, rank: *mut usize) -> EtStatus {
    guard(|| {
        let s = BigonState::new(p, q, r, alpha, phi)?;
        *out(rank, "rank")? = bigon_commutators(&s, h)?.rank;
        Ok(())
    })
}
