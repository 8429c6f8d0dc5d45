//! C ABI over the tfdkit core.
//!
//! Objects cross the boundary as opaque handles created by a `*_new` or
//! compute call and released with the matching `*_free`. Every fallible call
//! returns a [`TfdStatus`]; on failure the message is kept per thread and can
//! be read with [`tfd_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tfdkit::cli::pipeline::{compute_grid, render_condition, Condition, TransformOptions};
use tfdkit::evalstats::{mann_whitney_u, metrics, ConfusionCounts, MwMode};
use tfdkit::imaging::{grid_to_image, write_png, ExportedImage, InputKind};
use tfdkit::sigcore::Signal;
use tfdkit::tfd::TfdGrid as CoreGrid;
use tfdkit::Error;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdStatus {
    Ok = 0,
    InvalidArgument = 1,
    ZeroVariance = 2,
    UndefinedRate = 3,
    PredictionMismatch = 4,
    Format = 5,
    MissingFile = 6,
    Io = 7,
    NullPointer = 8,
    Panic = 9,
}

/// Representation to compute or render.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdKind {
    Stft = 0,
    Cwt = 1,
    Chirplet = 2,
    Wvd = 3,
    Spwvd = 4,
    Cwd = 5,
    Raw = 6,
    Lograw = 7,
}

impl From<TfdKind> for InputKind {
    fn from(k: TfdKind) -> Self {
        match k {
            TfdKind::Stft => InputKind::Stft,
            TfdKind::Cwt => InputKind::Cwt,
            TfdKind::Chirplet => InputKind::Chirplet,
            TfdKind::Wvd => InputKind::Wvd,
            TfdKind::Spwvd => InputKind::Spwvd,
            TfdKind::Cwd => InputKind::Cwd,
            TfdKind::Raw => InputKind::Raw,
            TfdKind::Lograw => InputKind::Lograw,
        }
    }
}

/// A real signal with its sample rate.
pub struct TfdSignal(Signal);

/// A time-frequency grid, row-major with one row per time instant.
pub struct TfdGrid(CoreGrid);

/// An image, interleaved height x width x channels.
pub struct TfdImage(ExportedImage);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TfdMetrics {
    pub acc: f64,
    pub se: f64,
    pub sp: f64,
    pub macc: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TfdMannWhitney {
    pub u: f64,
    pub p_two_sided: f64,
    /// 1 when the exact distribution was used, 0 for the normal approximation.
    pub exact: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TfdStatus {
    match e {
        Error::InvalidArgument(_) => TfdStatus::InvalidArgument,
        Error::ZeroVariance(_) => TfdStatus::ZeroVariance,
        Error::UndefinedRate(_) => TfdStatus::UndefinedRate,
        Error::PredictionMismatch { .. } => TfdStatus::PredictionMismatch,
        Error::MissingFile(_) => TfdStatus::MissingFile,
        Error::Io(_) => TfdStatus::Io,
        Error::Format { .. } | Error::Json(_) | Error::Wav(_) | Error::Png(_) => TfdStatus::Format,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TfdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TfdStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            TfdStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            TfdStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn tfd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tfd_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Copy `len` samples into a new signal.
///
/// # Safety
/// `samples` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfd_signal_new(
    samples: *const f64,
    len: usize,
    sample_rate: f64,
    out: *mut *mut TfdSignal,
) -> TfdStatus {
    guard(|| {
        let x = slice(samples, len, "samples")?;
        put(out, TfdSignal(Signal::new(x.to_vec(), sample_rate)?))
    })
}

/// # Safety
/// `signal` must come from [`tfd_signal_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tfd_signal_free(signal: *mut TfdSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

/// Compute a time-frequency grid with default parameters. `cwd_sigma` is
/// only used by [`TfdKind::Cwd`]. Raw kinds have no grid and are rejected.
///
/// # Safety
/// `signal` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_compute(
    signal: *const TfdSignal,
    kind: TfdKind,
    cwd_sigma: f64,
    out: *mut *mut TfdGrid,
) -> TfdStatus {
    guard(|| {
        let x = deref(signal, "signal")?;
        let opts = TransformOptions {
            cwd_sigma,
            ..TransformOptions::default()
        };
        let grid = compute_grid(&x.0, kind.into(), &opts)?.ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{} is not a time-frequency distribution",
                InputKind::from(kind).name()
            ))
        })?;
        put(out, TfdGrid(grid))
    })
}

/// # Safety
/// `grid` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_rows(grid: *const TfdGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.rows())
}

/// # Safety
/// `grid` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_cols(grid: *const TfdGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.cols())
}

/// Row-major values, `rows * cols` long, owned by the grid.
///
/// # Safety
/// `grid` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_values(grid: *const TfdGrid) -> *const f64 {
    grid.as_ref().map_or(ptr::null(), |g| g.0.values().as_ptr())
}

/// Time of every row in seconds, `rows` long, owned by the grid.
///
/// # Safety
/// `grid` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_time_axis(grid: *const TfdGrid) -> *const f64 {
    grid.as_ref()
        .map_or(ptr::null(), |g| g.0.time_axis().as_ptr())
}

/// Frequency of every column in Hz, `cols` long, owned by the grid.
///
/// # Safety
/// `grid` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_freq_axis(grid: *const TfdGrid) -> *const f64 {
    grid.as_ref()
        .map_or(ptr::null(), |g| g.0.freq_axis().as_ptr())
}

/// # Safety
/// `grid` must come from [`tfd_grid_compute`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_free(grid: *mut TfdGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// 8-bit greyscale raster of a grid, optionally log-compressed.
///
/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tfd_grid_to_image(
    grid: *const TfdGrid,
    log_compress: bool,
    height: usize,
    width: usize,
    out: *mut *mut TfdImage,
) -> TfdStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        put(
            out,
            TfdImage(grid_to_image(&g.0, log_compress, (height, width))?),
        )
    })
}

/// Normalized network input for one kind (replicated to three channels) or
/// three kinds (stacked). `n_kinds` must be 1 or 3.
///
/// # Safety
/// `signal` must be a live handle, `kinds` must point to `n_kinds` values and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfd_render(
    signal: *const TfdSignal,
    kinds: *const TfdKind,
    n_kinds: usize,
    size: usize,
    cwd_sigma: f64,
    out: *mut *mut TfdImage,
) -> TfdStatus {
    guard(|| {
        let x = deref(signal, "signal")?;
        if kinds.is_null() {
            return Err(Failure::Null("kinds"));
        }
        let kinds = std::slice::from_raw_parts(kinds, n_kinds);
        let cond = Condition::new(kinds.iter().map(|&k| k.into()).collect())?;
        let opts = TransformOptions {
            cwd_sigma,
            size: (size, size),
            ..TransformOptions::default()
        };
        put(
            out,
            TfdImage(render_condition(&x.0, "", &cond, &opts)?.tensor),
        )
    })
}

/// # Safety
/// `image` must be a live handle; each out pointer may be NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_image_shape(
    image: *const TfdImage,
    height: *mut usize,
    width: *mut usize,
    channels: *mut usize,
) -> TfdStatus {
    guard(|| {
        let img = &deref(image, "image")?.0;
        for (p, v) in [
            (height, img.height()),
            (width, img.width()),
            (channels, img.channels()),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Interleaved pixels, `height * width * channels` long, owned by the image.
///
/// # Safety
/// `image` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_image_pixels(image: *const TfdImage) -> *const f64 {
    image
        .as_ref()
        .map_or(ptr::null(), |i| i.0.pixels().as_ptr())
}

/// Write an 8-bit image as PNG. Normalized images are rejected.
///
/// # Safety
/// `image` must be a live handle and `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn tfd_image_write_png(
    image: *const TfdImage,
    path: *const c_char,
) -> TfdStatus {
    guard(|| {
        let img = deref(image, "image")?;
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Error::InvalidArgument("path is not valid UTF-8".into()))?;
        Ok(write_png(&img.0, Path::new(path))?)
    })
}

/// # Safety
/// `image` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tfd_image_free(image: *mut TfdImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Accuracy, sensitivity, specificity and mean accuracy, with abnormal as
/// the positive class.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfd_metrics(
    tp: u64,
    fp: u64,
    tn: u64,
    fn_: u64,
    out: *mut TfdMetrics,
) -> TfdStatus {
    guard(|| {
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        let m = metrics(ConfusionCounts { tp, fp, tn, fn_ })?;
        *out = TfdMetrics {
            acc: m.acc,
            se: m.se,
            sp: m.sp,
            macc: m.macc,
        };
        Ok(())
    })
}

/// Two-sided Mann-Whitney U test of `a` against `b`. With `exact` set the
/// permutation distribution is used up to 16 pooled values.
///
/// # Safety
/// `a` and `b` must point to `n1` and `n2` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfd_mann_whitney(
    a: *const f64,
    n1: usize,
    b: *const f64,
    n2: usize,
    exact: bool,
    out: *mut TfdMannWhitney,
) -> TfdStatus {
    guard(|| {
        let (a, b) = (slice(a, n1, "a")?, slice(b, n2, "b")?);
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        let mode = if exact {
            MwMode::Exact
        } else {
            MwMode::NormalApprox
        };
        let r = mann_whitney_u(a, b, mode)?;
        *out = TfdMannWhitney {
            u: r.u,
            p_two_sided: r.p_two_sided,
            exact: (r.mode == MwMode::Exact) as i32,
        };
        Ok(())
    })
}
