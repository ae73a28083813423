//! C ABI over the `hartley-bessel` toolkit.
//!
//! Grids and plans cross the boundary as opaque handles. Every fallible call
//! returns an [`HbStatus`]; on failure a description is available from
//! [`hb_last_error_message`] on the same thread. Array arguments are plain
//! `double` buffers whose length must equal the grid size.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use hartley_bessel::convolution::convolve;
use hartley_bessel::quadrature::{lp_norm, GridSpec, QuadratureGrid, SampledFunction, Scheme};
use hartley_bessel::solver::{solve_integral_equation, SolverConfig};
use hartley_bessel::special_functions::{hartley_bessel_kernel, normalized_bessel, KernelParams};
use hartley_bessel::transform::{SpectralFunction, TransformPlan};
use hartley_bessel::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    NonConvergence = 4,
    GridMismatch = 5,
    NotSolvable = 6,
    Internal = 7,
    Panic = 8,
}

/// Quadrature rule used on each panel.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbScheme {
    GaussLegendre = 0,
    Trapezoid = 1,
}

/// Opaque node set with its weights.
pub struct HbGrid(Arc<QuadratureGrid>);

/// Opaque precomputed transform for one grid.
pub struct HbPlan(TransformPlan);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(HbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_non_convergence() {
            HbStatus::NonConvergence
        } else {
            match e {
                Error::GridMismatch => HbStatus::GridMismatch,
                Error::InvalidConfig(_) | Error::InvalidExponent(_) => HbStatus::InvalidArgument,
                Error::ReportNotSolvable => HbStatus::NotSolvable,
                _ => HbStatus::Internal,
            }
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: HbStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `body`, recording any error or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HbStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside hartley-bessel");
            HbStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(HbStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn input<'a>(p: *const f64, len: usize, expected: usize, name: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(fail(HbStatus::NullPointer, format!("`{name}` is null")));
    }
    if len != expected {
        return Err(fail(HbStatus::LengthMismatch, format!("`{name}` has {len} values, grid has {expected}")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, expected: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(fail(HbStatus::NullPointer, format!("`{name}` is null")));
    }
    if len != expected {
        return Err(fail(HbStatus::LengthMismatch, format!("`{name}` has room for {len} values, grid has {expected}")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn scalar_out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(HbStatus::NullPointer, format!("`{name}` is null")))
}

fn sampled(grid: &Arc<QuadratureGrid>, values: &[f64]) -> Result<SampledFunction, Failure> {
    Ok(SampledFunction::new(grid.clone(), values.to_vec())?)
}

/// Message for the last failed call on this thread, or null after a success.
///
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn hb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Builds a grid on `[-radius, radius]` with `panels` panels of `points` nodes each.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to release with [`hb_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn hb_grid_new(
    alpha: f64,
    radius: f64,
    panels: usize,
    points: usize,
    scheme: HbScheme,
    out: *mut *mut HbGrid,
) -> HbStatus {
    guard(|| {
        let out = scalar_out(out, "out")?;
        *out = ptr::null_mut();
        let scheme = match scheme {
            HbScheme::GaussLegendre => Scheme::GaussLegendre,
            HbScheme::Trapezoid => Scheme::Trapezoid,
        };
        let grid = GridSpec { alpha, radius, panels, points_per_panel: points, scheme }.build()?;
        *out = Box::into_raw(Box::new(HbGrid(grid)));
        Ok(())
    })
}

/// # Safety
/// `grid` must come from [`hb_grid_new`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hb_grid_free(grid: *mut HbGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hb_grid_len(grid: *const HbGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Copies the nodes and, if `weights` is non-null, the measure weights.
///
/// # Safety
/// `grid` must be live; `nodes` (and `weights`, when given) must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hb_grid_nodes(
    grid: *const HbGrid,
    nodes: *mut f64,
    weights: *mut f64,
    len: usize,
) -> HbStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.0;
        output(nodes, len, g.len(), "nodes")?.copy_from_slice(g.nodes());
        if !weights.is_null() {
            output(weights, len, g.len(), "weights")?.copy_from_slice(g.mu_weights());
        }
        Ok(())
    })
}

/// Precomputes the transform matrix for `grid`. `max_terms` of 0 keeps the default series budget.
///
/// # Safety
/// `grid` must be live and `out` valid; release the plan with [`hb_plan_free`].
#[no_mangle]
pub unsafe extern "C" fn hb_plan_new(grid: *const HbGrid, max_terms: usize, out: *mut *mut HbPlan) -> HbStatus {
    guard(|| {
        let out = scalar_out(out, "out")?;
        *out = ptr::null_mut();
        let g = &handle(grid, "grid")?.0;
        let plan = if max_terms == 0 {
            TransformPlan::for_grid(g)?
        } else {
            TransformPlan::build(g, KernelParams::with_limits(g.alpha(), KernelParams::DEFAULT_SERIES_TOL, max_terms)?)?
        };
        *out = Box::into_raw(Box::new(HbPlan(plan)));
        Ok(())
    })
}

/// # Safety
/// `plan` must come from [`hb_plan_new`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hb_plan_free(plan: *mut HbPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Grid size of the plan; 0 for a null handle.
///
/// # Safety
/// `plan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hb_plan_len(plan: *const HbPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.0.len())
}

/// Spectrum of `f` at the frequency nodes (which coincide with the grid nodes).
///
/// # Safety
/// `plan` must be live; `f` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hb_forward(plan: *const HbPlan, f: *const f64, out: *mut f64, len: usize) -> HbStatus {
    guard(|| {
        let p = &handle(plan, "plan")?.0;
        let f = sampled(p.grid(), input(f, len, p.len(), "f")?)?;
        output(out, len, p.len(), "out")?.copy_from_slice(p.forward(&f)?.values());
        Ok(())
    })
}

/// Spatial samples recovered from a spectrum.
///
/// # Safety
/// `plan` must be live; `spectrum` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hb_inverse(plan: *const HbPlan, spectrum: *const f64, out: *mut f64, len: usize) -> HbStatus {
    guard(|| {
        let p = &handle(plan, "plan")?.0;
        let s = SpectralFunction::new(p.grid().clone(), input(spectrum, len, p.len(), "spectrum")?.to_vec())?;
        output(out, len, p.len(), "out")?.copy_from_slice(p.inverse(&s)?.values());
        Ok(())
    })
}

/// Generalized convolution `f * g`.
///
/// # Safety
/// `plan` must be live; `f`, `g` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hb_convolve(
    plan: *const HbPlan,
    f: *const f64,
    g: *const f64,
    out: *mut f64,
    len: usize,
) -> HbStatus {
    guard(|| {
        let p = &handle(plan, "plan")?.0;
        let f = sampled(p.grid(), input(f, len, p.len(), "f")?)?;
        let g = sampled(p.grid(), input(g, len, p.len(), "g")?)?;
        output(out, len, p.len(), "out")?.copy_from_slice(convolve(p, &f, &g)?.values());
        Ok(())
    })
}

/// Summary of one solve of `f + f * g = g * h`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HbSolveInfo {
    /// Smallest `|1 + H g|` over the frequency nodes.
    pub min_denominator: f64,
    pub min_denominator_lambda: f64,
    /// L1 residual of the returned solution.
    pub residual_l1: f64,
    /// Residual relative to the L1 norm of `g * h`.
    pub relative_residual: f64,
}

/// Solves `f + f * g = g * h`. Returns [`HbStatus::NotSolvable`] (with `info` filled
/// and `f_out` untouched) when `1 + H g` comes within `denom_threshold` of zero or
/// changes sign. A non-positive threshold selects the default.
///
/// # Safety
/// `plan` must be live; `g`, `h` and `f_out` must each hold `len` doubles; `info` may be null.
#[no_mangle]
pub unsafe extern "C" fn hb_solve(
    plan: *const HbPlan,
    g: *const f64,
    h: *const f64,
    len: usize,
    denom_threshold: f64,
    f_out: *mut f64,
    info: *mut HbSolveInfo,
) -> HbStatus {
    guard(|| {
        let p = &handle(plan, "plan")?.0;
        let g = sampled(p.grid(), input(g, len, p.len(), "g")?)?;
        let h = sampled(p.grid(), input(h, len, p.len(), "h")?)?;
        let out = output(f_out, len, p.len(), "f_out")?;
        let mut cfg = SolverConfig::default();
        if denom_threshold > 0.0 {
            cfg.denom_threshold = denom_threshold;
        }
        let report = solve_integral_equation(p, &g, &h, &cfg)?;
        if let Some(info) = info.as_mut() {
            *info = HbSolveInfo {
                min_denominator: report.min_denominator,
                min_denominator_lambda: report.min_denominator_lambda,
                residual_l1: report.residual_l1,
                relative_residual: report.relative_residual(),
            };
        }
        match &report.solution_f {
            Some(f) => {
                out.copy_from_slice(f.values());
                Ok(())
            }
            None => Err(fail(
                HbStatus::NotSolvable,
                format!(
                    "1 + H g vanishes: min |1 + H g| = {:e} at lambda = {}",
                    report.min_denominator, report.min_denominator_lambda
                ),
            )),
        }
    })
}

/// Normalized Bessel function `B_order(x)`, `order > -1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hb_normalized_bessel(order: f64, x: f64, out: *mut f64) -> HbStatus {
    guard(|| {
        let out = scalar_out(out, "out")?;
        // only the series limits of the parameter set matter here
        *out = normalized_bessel(order, x, &KernelParams::new(0.0)?)?;
        Ok(())
    })
}

/// Transform kernel at `(lambda, x)` for parameter `alpha`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hb_kernel(lambda: f64, x: f64, alpha: f64, out: *mut f64) -> HbStatus {
    guard(|| {
        let out = scalar_out(out, "out")?;
        *out = hartley_bessel_kernel(lambda, x, &KernelParams::new(alpha)?)?;
        Ok(())
    })
}

/// Weighted `L^p` norm of grid samples; `p = INFINITY` gives the sup norm.
///
/// # Safety
/// `grid` must be live; `values` must hold `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_lp_norm(
    grid: *const HbGrid,
    values: *const f64,
    len: usize,
    p: f64,
    out: *mut f64,
) -> HbStatus {
    guard(|| {
        let g = &handle(grid, "grid")?.0;
        let f = sampled(g, input(values, len, g.len(), "values")?)?;
        *scalar_out(out, "out")? = lp_norm(&f, p)?;
        Ok(())
    })
}
