//! C ABI over the robust-bound library.
//!
//! Densities live behind the opaque `RbDensity` handle; every fallible call
//! returns an `RbStatus` and writes its result through an out-pointer. The
//! message of the last failure on the calling thread is available from
//! `rb_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use robust_bound::bayes::bayes_error;
use robust_bound::bounds::{compute_bounds, cor1_lower, BoundsOptions};
use robust_bound::density::{
    make_gaussian_mixture, moons_default_spec, overlapping_squares, LabeledDensity, MoonsDensity,
    MoonsParams,
};
use robust_bound::grid::GridSpec;
use robust_bound::vicinity::{build_kernel, effective_radius, Norm};
use robust_bound::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Numeric = 3,
    Io = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RbNorm {
    Linf = 0,
    L2 = 1,
}

impl From<RbNorm> for Norm {
    fn from(n: RbNorm) -> Self {
        match n {
            RbNorm::Linf => Norm::LInf,
            RbNorm::L2 => Norm::L2,
        }
    }
}

/// Cell-centered grid: cell (i, j) is centered at
/// (x0 + (i + 0.5)·dx, y0 + (j + 0.5)·dy).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RbGrid {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl From<GridSpec> for RbGrid {
    fn from(s: GridSpec) -> Self {
        Self {
            x0: s.x0,
            y0: s.y0,
            dx: s.dx,
            dy: s.dy,
            nx: s.nx,
            ny: s.ny,
        }
    }
}

impl RbGrid {
    fn to_spec(self) -> Result<GridSpec, Error> {
        GridSpec::new(self.x0, self.y0, self.dx, self.dy, self.nx, self.ny)
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RbBoundsReport {
    pub epsilon: f64,
    pub tau_unc: f64,
    pub beta_d: f64,
    pub beta_dprime: f64,
    pub zeta_thm3: f64,
    pub zeta_cor1: f64,
    pub zeta_cor2: f64,
    pub zeta_sharp: f64,
    pub zeta_d: f64,
    /// 1 − zeta_d, the certified-accuracy upper bound.
    pub ub_zeta_d: f64,
    pub eps_eff: f64,
    pub p_min: f64,
    pub volume_k_d: f64,
}

/// Opaque labeled density.
pub struct RbDensity {
    inner: LabeledDensity,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RbStatus {
    if e.is_numeric() {
        RbStatus::Numeric
    } else if e.is_io() {
        RbStatus::Io
    } else {
        RbStatus::InvalidParameter
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (RbStatus, String)>) -> RbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RbStatus::Panic
        }
    }
}

fn lib(e: Error) -> (RbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (RbStatus, String) {
    (RbStatus::NullPointer, format!("`{name}` is null"))
}

/// # Safety
/// `out` must be valid for a write.
unsafe fn emit<T>(out: *mut T, name: &str, value: T) -> Result<(), (RbStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `out` must be valid for a write.
unsafe fn emit_density(
    out: *mut *mut RbDensity,
    d: LabeledDensity,
) -> Result<(), (RbStatus, String)> {
    emit(out, "out", Box::into_raw(Box::new(RbDensity { inner: d })))
}

/// # Safety
/// `d` must be null or a handle from this library that was not freed.
unsafe fn density<'a>(d: *const RbDensity) -> Result<&'a LabeledDensity, (RbStatus, String)> {
    d.as_ref().map(|d| &d.inner).ok_or_else(|| null("density"))
}

/// Two-moons density. `grid` may be null for the default 512×512 grid.
///
/// # Safety
/// `grid` must be null or point to an `RbGrid`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_density_moons(
    sigma: f64,
    quadrature_points: usize,
    grid: *const RbGrid,
    out: *mut *mut RbDensity,
) -> RbStatus {
    guard(|| {
        let spec = match grid.as_ref() {
            Some(g) => g.to_spec().map_err(lib)?,
            None => moons_default_spec(512),
        };
        let md = MoonsDensity::new(MoonsParams {
            sigma,
            quadrature_points,
        })
        .map_err(lib)?;
        let (d, _) = md.labeled_density(&spec).map_err(lib)?;
        emit_density(out, d)
    })
}

/// One isotropic Gaussian per class. `means` holds `2·n_classes` values
/// (x, y per class).
///
/// # Safety
/// `priors` and `sigmas` must hold `n_classes` values, `means`
/// `2·n_classes`; `grid` must point to an `RbGrid`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_density_gaussian_mixture(
    n_classes: usize,
    priors: *const f64,
    means: *const f64,
    sigmas: *const f64,
    grid: *const RbGrid,
    out: *mut *mut RbDensity,
) -> RbStatus {
    guard(|| {
        if priors.is_null() {
            return Err(null("priors"));
        }
        if means.is_null() {
            return Err(null("means"));
        }
        if sigmas.is_null() {
            return Err(null("sigmas"));
        }
        let spec = grid
            .as_ref()
            .ok_or_else(|| null("grid"))?
            .to_spec()
            .map_err(lib)?;
        let priors = std::slice::from_raw_parts(priors, n_classes);
        let sigmas = std::slice::from_raw_parts(sigmas, n_classes);
        let means: Vec<[f64; 2]> = std::slice::from_raw_parts(means, 2 * n_classes)
            .chunks_exact(2)
            .map(|c| [c[0], c[1]])
            .collect();
        let d = make_gaussian_mixture(priors, &means, sigmas, &spec).map_err(lib)?;
        emit_density(out, d)
    })
}

/// The overlapping unit squares [0,1]² and [0.5,1.5]×[0,1], equal priors.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_density_squares(out: *mut *mut RbDensity) -> RbStatus {
    guard(|| emit_density(out, overlapping_squares()))
}

/// Releases a density; null is ignored.
///
/// # Safety
/// `d` must be null or a handle from this library that was not freed.
#[no_mangle]
pub unsafe extern "C" fn rb_density_free(d: *mut RbDensity) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle; `out_classes` and `out_grid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_density_info(
    d: *const RbDensity,
    out_classes: *mut usize,
    out_grid: *mut RbGrid,
) -> RbStatus {
    guard(|| {
        let d = density(d)?;
        emit(out_classes, "out_classes", d.num_classes())?;
        emit(out_grid, "out_grid", RbGrid::from(*d.spec()))
    })
}

/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_bayes_error(d: *const RbDensity, out: *mut f64) -> RbStatus {
    guard(|| emit(out, "out", bayes_error(density(d)?)))
}

/// Every bound for the ε-ball of `norm`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_bounds(
    d: *const RbDensity,
    norm: RbNorm,
    epsilon: f64,
    tau_unc: f64,
    out: *mut RbBoundsReport,
) -> RbStatus {
    guard(|| {
        let d = density(d)?;
        let k = build_kernel(norm.into(), epsilon, (d.spec().dx, d.spec().dy)).map_err(lib)?;
        let r = compute_bounds(
            d,
            &k,
            &BoundsOptions {
                tau_unc,
                p_min_override: None,
            },
        )
        .map_err(lib)?;
        emit(
            out,
            "out",
            RbBoundsReport {
                epsilon: r.epsilon,
                tau_unc: r.tau_unc,
                beta_d: r.beta_d,
                beta_dprime: r.beta_dprime,
                zeta_thm3: r.zeta_thm3,
                zeta_cor1: r.zeta_cor1,
                zeta_cor2: r.zeta_cor2,
                zeta_sharp: r.zeta_sharp,
                zeta_d: r.zeta_d,
                ub_zeta_d: r.ub_zeta_d(),
                eps_eff: r.eps_eff,
                p_min: r.p_min,
                volume_k_d: r.volume_k_d,
            },
        )
    })
}

/// β·K/(K − 1) for a Bayes error `beta` over `num_classes` labels.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_cor1_lower(beta: f64, num_classes: usize, out: *mut f64) -> RbStatus {
    guard(|| emit(out, "out", cor1_lower(beta, num_classes).map_err(lib)?))
}

/// Radius of the `dim`-dimensional Euclidean ball with the volume of the
/// ε-ball of `norm`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_effective_radius(
    norm: RbNorm,
    epsilon: f64,
    dim: usize,
    out: *mut f64,
) -> RbStatus {
    guard(|| {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err((
                RbStatus::InvalidParameter,
                format!("invalid parameter `epsilon`: must be >= 0, got {epsilon}"),
            ));
        }
        if dim == 0 {
            return Err((
                RbStatus::InvalidParameter,
                "invalid parameter `dim`: must be >= 1".into(),
            ));
        }
        emit(out, "out", effective_radius(norm.into(), epsilon, dim))
    })
}

/// Message of the last failed call on this thread ("" after a success).
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn rb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rb_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
