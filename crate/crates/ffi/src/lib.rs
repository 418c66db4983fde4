//! C ABI over `basinlab`.
//!
//! Grids cross the boundary as opaque `BasinlabGrid` handles owned by the
//! caller and released with `basinlab_grid_free`. Every fallible call
//! returns a `BasinlabStatus`; on failure a description is available from
//! `basinlab_last_error_message` on the same thread. Panics never unwind
//! into C: they are caught and reported as `BASINLAB_STATUS_PANIC`.

use basinlab::dataset::{read_basin_image, write_basin_image};
use basinlab::metrics::{
    entropy_estimate, fractal_dimension, wada_test, EntropyConfig, FDimConfig, WadaConfig,
};
use basinlab::systems::{compute_basin, IntegratorConfig, SystemSpec};
use basinlab::{BasinGrid, Region};
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasinlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Generation = 4,
    Metric = 5,
    Panic = 6,
}

/// Opaque basin grid.
pub struct BasinlabGrid {
    inner: BasinGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type Outcome = Result<(), (BasinlabStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> BasinlabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BasinlabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            BasinlabStatus::Panic
        }
    }
}

fn invalid(msg: impl std::fmt::Display) -> (BasinlabStatus, String) {
    (BasinlabStatus::InvalidArgument, msg.to_string())
}

fn null(what: &str) -> (BasinlabStatus, String) {
    (BasinlabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn grid_ref<'a>(grid: *const BasinlabGrid) -> Result<&'a BasinGrid, (BasinlabStatus, String)> {
    grid.as_ref().map(|g| &g.inner).ok_or_else(|| null("grid"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (BasinlabStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (BasinlabStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

fn boxed(grid: BasinGrid) -> *mut BasinlabGrid {
    Box::into_raw(Box::new(BasinlabGrid { inner: grid }))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next basinlab call on the same thread.
#[no_mangle]
pub extern "C" fn basinlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn basinlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a grid from `width * height` row-major labels (255 = unresolved).
///
/// # Safety
/// `labels` must point to `width * height` readable bytes; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_new(
    width: usize,
    height: usize,
    labels: *const u8,
    out: *mut *mut BasinlabGrid,
) -> BasinlabStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        let n = width.checked_mul(height).ok_or_else(|| invalid("size overflows"))?;
        let data = std::slice::from_raw_parts(labels, n).to_vec();
        let grid = BasinGrid::new(width, height, data).map_err(invalid)?;
        *out = boxed(grid);
        Ok(())
    })
}

/// Release a grid. NULL is ignored.
///
/// # Safety
/// `grid` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_free(grid: *mut BasinlabGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Width in pixels, or 0 for NULL.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_width(grid: *const BasinlabGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.width())
}

/// Height in pixels, or 0 for NULL.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_height(grid: *const BasinlabGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.height())
}

/// Number of distinct attractor labels present (unresolved excluded), or
/// 0 for NULL.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_num_labels(grid: *const BasinlabGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.num_labels())
}

/// Copy the row-major labels into `out`, which holds `len` bytes; `len`
/// must equal width * height.
///
/// # Safety
/// `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_copy_labels(
    grid: *const BasinlabGrid,
    out: *mut u8,
    len: usize,
) -> BasinlabStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != g.labels().len() {
            return Err(invalid(format!("buffer holds {len} bytes, grid has {}", g.labels().len())));
        }
        ptr::copy_nonoverlapping(g.labels().as_ptr(), out, len);
        Ok(())
    })
}

/// Load an 8-bit grayscale PNG basin image.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_read_png(
    path: *const c_char,
    out: *mut *mut BasinlabGrid,
) -> BasinlabStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let path = c_str(path, "path")?;
        let grid = read_basin_image(path).map_err(|e| (BasinlabStatus::Io, e.to_string()))?;
        *out = boxed(grid);
        Ok(())
    })
}

/// Write a grid as an 8-bit grayscale PNG (pixel value = label).
///
/// # Safety
/// `grid` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn basinlab_grid_write_png(
    grid: *const BasinlabGrid,
    path: *const c_char,
) -> BasinlabStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let path = c_str(path, "path")?;
        write_basin_image(g, path).map_err(|e| (BasinlabStatus::Io, e.to_string()))
    })
}

/// Compute a basin. `system_json` describes the system, e.g.
/// `{"system":"duffing","gamma":0.3,"omega":1.0}`; `config_json` is NULL
/// for the per-system integrator defaults or a complete settings object.
///
/// # Safety
/// String arguments must be NUL-terminated (or NULL where allowed); `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn basinlab_compute_basin(
    system_json: *const c_char,
    config_json: *const c_char,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    resolution: usize,
    out: *mut *mut BasinlabGrid,
) -> BasinlabStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let spec: SystemSpec =
            serde_json::from_str(c_str(system_json, "system_json")?).map_err(invalid)?;
        let config = if config_json.is_null() {
            IntegratorConfig::for_system(spec.kind())
        } else {
            serde_json::from_str(c_str(config_json, "config_json")?).map_err(invalid)?
        };
        let region = Region::new(x_min, x_max, y_min, y_max, resolution).map_err(invalid)?;
        let grid = compute_basin(&spec, &region, &config)
            .map_err(|e| (BasinlabStatus::Generation, e.to_string()))?;
        *out = boxed(grid);
        Ok(())
    })
}

/// One Monte Carlo estimate of the uncertainty dimension with box sizes
/// 3..=33 step 3 and `boxes_per_size` boxes per size.
///
/// # Safety
/// `grid` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn basinlab_fractal_dimension(
    grid: *const BasinlabGrid,
    boxes_per_size: usize,
    seed: u64,
    out: *mut f64,
) -> BasinlabStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let out = out_ptr(out, "out")?;
        let cfg = FDimConfig { boxes_per_size, seed, ..FDimConfig::default() };
        *out = fractal_dimension(g, &cfg).map_err(|e| (BasinlabStatus::Metric, e.to_string()))?;
        Ok(())
    })
}

/// One Monte Carlo estimate of Sb and Sbb from the same `n_boxes` boxes of
/// side `box_size`. `sbb` is set to NaN when no sampled box contained a
/// boundary.
///
/// # Safety
/// `grid` must be a live handle; `sb` and `sbb` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn basinlab_basin_entropy(
    grid: *const BasinlabGrid,
    box_size: usize,
    n_boxes: usize,
    seed: u64,
    sb: *mut f64,
    sbb: *mut f64,
) -> BasinlabStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let sb = out_ptr(sb, "sb")?;
        let sbb = out_ptr(sbb, "sbb")?;
        let cfg = EntropyConfig { box_size, n_boxes, seed };
        let est = entropy_estimate(g, &cfg).map_err(|e| (BasinlabStatus::Metric, e.to_string()))?;
        *sb = est.sb;
        *sbb = est.sbb.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Wada test by merging with fattening radius `fattening_r`; `is_wada`
/// receives 1 or 0.
///
/// # Safety
/// `grid` must be a live handle; `is_wada` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn basinlab_wada(
    grid: *const BasinlabGrid,
    fattening_r: usize,
    is_wada: *mut c_int,
) -> BasinlabStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let is_wada = out_ptr(is_wada, "is_wada")?;
        let report = wada_test(g, &WadaConfig { fattening_r });
        *is_wada = report.verdict.is_wada() as c_int;
        Ok(())
    })
}
