//! C interface to the `diffuse` crate.
//!
//! Objects cross the boundary as opaque handles created by `diffuse_*_new`
//! or by an algorithm and released with the matching `*_free`. Every call
//! returns a [`DiffuseStatus`]; on failure `diffuse_last_error` describes the
//! problem until the next call on the same thread. Panics are caught and
//! reported as `DIFFUSE_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use diffuse::diffusion::{
    coordinate_vectors, db_embed, dm_embed, pairwise_sq_dist, resolve_epsilon, DataMatrix, DbVariant, DmVariant,
    Embedding, EpsilonChoice, KernelParams, Truncation,
};
use diffuse::hyperspectral::{
    detect_subpixel, drill_down, normalize_layers, reduce_cube, wwg, HyperCube, ReduceParams, SegmentationMap,
    SubPixelHit, SubPixelParams, WwgParams,
};
use diffuse::video::{
    dbsdb, parallel_blocks, sbsdb, BackgroundParams, BinaryMask, BlockPartition, DbsdbParams, DynamicParams,
    FrameSequence, InnerAlgorithm, Mu, SbsdbParams, ThresholdParams,
};
use diffuse::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffuseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    ZeroDegree = 3,
    ConvergenceFailure = 4,
    DegenerateLeadVector = 5,
    NoLinearRegion = 6,
    SmallEigenvalue = 7,
    EmptySelection = 8,
    TooFewPixels = 9,
    WindowTooLarge = 10,
    BlockTooSmall = 11,
    InvalidPartition = 12,
    HeaderMismatch = 13,
    SizeMismatch = 14,
    BadMagic = 15,
    Io = 16,
    Format = 17,
    Panic = 18,
}

impl From<&Error> for DiffuseStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => DiffuseStatus::InvalidInput,
            Error::ZeroDegree(_) => DiffuseStatus::ZeroDegree,
            Error::ConvergenceFailure { .. } => DiffuseStatus::ConvergenceFailure,
            Error::DegenerateLeadVector { .. } => DiffuseStatus::DegenerateLeadVector,
            Error::NoLinearRegion => DiffuseStatus::NoLinearRegion,
            Error::SmallEigenvalue { .. } => DiffuseStatus::SmallEigenvalue,
            Error::EmptySelection(_) => DiffuseStatus::EmptySelection,
            Error::TooFewPixels { .. } => DiffuseStatus::TooFewPixels,
            Error::WindowTooLarge { .. } => DiffuseStatus::WindowTooLarge,
            Error::BlockTooSmall { .. } => DiffuseStatus::BlockTooSmall,
            Error::InvalidPartition(_) => DiffuseStatus::InvalidPartition,
            Error::HeaderMismatch(_) => DiffuseStatus::HeaderMismatch,
            Error::SizeMismatch { .. } => DiffuseStatus::SizeMismatch,
            Error::BadMagic { .. } => DiffuseStatus::BadMagic,
            Error::Io { .. } => DiffuseStatus::Io,
            Error::Format(_) => DiffuseStatus::Format,
        }
    }
}

/// Embedding variant for [`diffuse_dm_embed`] and [`diffuse_db_embed`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffuseVariant {
    /// DM: eigenvectors of P computed directly. DB: project onto the right eigenvectors of P.
    Plain = 0,
    /// Eigenvectors obtained through the symmetric conjugate.
    Modified = 1,
}

/// Kernel scale and truncation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffuseKernelParams {
    /// Kernel scale; 0 picks it from the data.
    pub epsilon: f64,
    /// Truncation accuracy used when `eta` is 0.
    pub delta: f64,
    /// Fixed number of eigenpairs, or 0 to derive it from `delta`.
    pub eta: usize,
    /// Diffusion time (DM only).
    pub time: u32,
    pub variant: DiffuseVariant,
}

/// Segmentation settings.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffuseWwgParams {
    pub kernel: DiffuseKernelParams,
    pub theta: usize,
    pub xi: u16,
    pub levels: usize,
    pub drop_first_color: bool,
}

/// Sub-pixel detection settings.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffuseSubpixelParams {
    pub kernel: DiffuseKernelParams,
    pub alpha: usize,
    pub tau1: f64,
    pub tau2: usize,
}

/// Background-subtraction settings shared by the static and dynamic pipelines.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffuseVideoParams {
    pub window: usize,
    /// Slope threshold as a fraction of the histogram peak; used when `mu_absolute` is 0.
    pub mu_fraction: f64,
    /// Absolute slope threshold per bin; 0 selects `mu_fraction`.
    pub mu_absolute: f64,
    /// Odd moving-average width.
    pub smoothing: usize,
    /// Kernel scale; 0 picks it from the first window.
    pub epsilon: f64,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub overlap: usize,
    /// Dynamic pipeline only.
    pub stop_fraction: f64,
    /// Dynamic pipeline only.
    pub max_iters: usize,
}

/// Dense row-major matrix of doubles.
pub struct DiffuseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Hyper-spectral cube.
pub struct DiffuseCube(HyperCube);

/// Label map of a segmentation.
pub struct DiffuseSegmentation(SegmentationMap);

/// Sub-pixel detections.
pub struct DiffuseHits(Vec<SubPixelHit>);

/// Frame sequence.
pub struct DiffuseVideo(FrameSequence);

/// One binary mask per frame.
pub struct DiffuseMasks(Vec<BinaryMask>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(DiffuseStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(DiffuseStatus::from(&e), format!("{}: {e}", e.name()))
    }
}

fn null(what: &str) -> Fail {
    Fail(DiffuseStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(DiffuseStatus::InvalidInput, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DiffuseStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiffuseStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
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
            DiffuseStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn path(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, len: usize) -> Result<(), Fail> {
    if len < src.len() {
        return Err(invalid(format!("buffer holds {len} values, {} needed", src.len())));
    }
    if src.is_empty() {
        return Ok(());
    }
    if dst.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn epsilon_choice(e: f64) -> Result<EpsilonChoice, Fail> {
    if e == 0.0 {
        Ok(EpsilonChoice::Auto)
    } else if e.is_finite() && e > 0.0 {
        Ok(EpsilonChoice::Fixed(e))
    } else {
        Err(invalid(format!("epsilon must be positive or 0 for automatic, got {e}")))
    }
}

fn truncation(k: &DiffuseKernelParams) -> Truncation {
    Truncation { time: k.time, delta: k.delta, eta: (k.eta > 0).then_some(k.eta) }
}

fn db_variant(v: DiffuseVariant) -> DbVariant {
    match v {
        DiffuseVariant::Plain => DbVariant::Plain,
        DiffuseVariant::Modified => DbVariant::Modified,
    }
}

fn reduce_params(k: &DiffuseKernelParams) -> Result<ReduceParams, Fail> {
    Ok(ReduceParams {
        epsilon: epsilon_choice(k.epsilon)?,
        delta: k.delta,
        eta: (k.eta > 0).then_some(k.eta),
        variant: db_variant(k.variant),
    })
}

fn wwg_params(p: &DiffuseWwgParams) -> Result<WwgParams, Fail> {
    Ok(WwgParams {
        reduce: reduce_params(&p.kernel)?,
        theta: p.theta,
        xi: p.xi,
        levels: p.levels,
        drop_first_color: p.drop_first_color,
    })
}

fn threshold_params(p: &DiffuseVideoParams) -> ThresholdParams {
    let mu = if p.mu_absolute != 0.0 { Mu::Absolute(p.mu_absolute) } else { Mu::PeakFraction(p.mu_fraction) };
    ThresholdParams { mu, smoothing_width: p.smoothing }
}

fn partition(p: &DiffuseVideoParams) -> BlockPartition {
    BlockPartition { grid_rows: p.grid_rows, grid_cols: p.grid_cols, overlap: p.overlap }
}

fn single_block(p: &DiffuseVideoParams) -> bool {
    p.grid_rows == 1 && p.grid_cols == 1
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn diffuse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn diffuse_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn diffuse_kernel_params_default() -> DiffuseKernelParams {
    let t = Truncation::default();
    DiffuseKernelParams { epsilon: 0.0, delta: t.delta, eta: 0, time: t.time, variant: DiffuseVariant::Plain }
}

#[no_mangle]
pub extern "C" fn diffuse_wwg_params_default() -> DiffuseWwgParams {
    let w = WwgParams::default();
    DiffuseWwgParams {
        kernel: diffuse_kernel_params_default(),
        theta: w.theta,
        xi: w.xi,
        levels: w.levels,
        drop_first_color: w.drop_first_color,
    }
}

#[no_mangle]
pub extern "C" fn diffuse_subpixel_params_default() -> DiffuseSubpixelParams {
    let s = SubPixelParams::default();
    DiffuseSubpixelParams { kernel: diffuse_kernel_params_default(), alpha: s.alpha, tau1: s.tau1, tau2: s.tau2 }
}

#[no_mangle]
pub extern "C" fn diffuse_video_params_default() -> DiffuseVideoParams {
    let d = DynamicParams::default();
    let b = BlockPartition::default();
    DiffuseVideoParams {
        window: SbsdbParams::default().window,
        mu_fraction: 0.005,
        mu_absolute: 0.0,
        smoothing: ThresholdParams::default().smoothing_width,
        epsilon: 0.0,
        grid_rows: b.grid_rows,
        grid_cols: b.grid_cols,
        overlap: b.overlap,
        stop_fraction: d.stop_fraction,
        max_iters: d.max_iters,
    }
}

/// Copies `rows * cols` row-major values into a new matrix.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_matrix_new(rows: usize, cols: usize, data: *const f64, out: *mut *mut DiffuseMatrix) -> DiffuseStatus {
    guard(|| {
        let len = rows.checked_mul(cols).ok_or_else(|| invalid("matrix size overflows"))?;
        let values = slice(data, len, "data")?.to_vec();
        put(out, DiffuseMatrix { rows, cols, data: values })
    })
}

/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn diffuse_matrix_rows(m: *const DiffuseMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.rows)
}

/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn diffuse_matrix_cols(m: *const DiffuseMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.cols)
}

/// Copies the row-major values into `buf`, which must hold `rows * cols` doubles.
///
/// # Safety
/// `m` must be a live matrix handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn diffuse_matrix_copy(m: *const DiffuseMatrix, buf: *mut f64, len: usize) -> DiffuseStatus {
    guard(|| copy_out(&get(m, "matrix")?.data, buf, len))
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diffuse_matrix_free(m: *mut DiffuseMatrix) {
    free(m)
}

fn data_matrix(m: &DiffuseMatrix) -> Result<DataMatrix, Fail> {
    Ok(DataMatrix::from_row_slice(m.rows, m.cols, &m.data)?)
}

fn to_handle(e: Embedding) -> DiffuseMatrix {
    let (rows, cols) = e.coords.shape();
    // column-major storage of the transpose is the row-major order
    DiffuseMatrix { rows, cols, data: e.coords.transpose().as_slice().to_vec() }
}

/// Kernel scale chosen for a point set (one point per row); `epsilon_out`
/// receives the value.
///
/// # Safety
/// `points` must be a live matrix handle and `epsilon_out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_choose_epsilon(points: *const DiffuseMatrix, epsilon_out: *mut f64) -> DiffuseStatus {
    guard(|| {
        let data = data_matrix(get(points, "points")?)?;
        let (eps, _) = resolve_epsilon(&pairwise_sq_dist(&data), EpsilonChoice::Auto, data.n_coords())?;
        let out = epsilon_out.as_mut().ok_or_else(|| null("epsilon_out"))?;
        *out = eps;
        Ok(())
    })
}

/// Diffusion-maps embedding of the rows of `points`; writes an `N x (eta - 1)` matrix.
///
/// # Safety
/// `points` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_dm_embed(
    points: *const DiffuseMatrix,
    params: *const DiffuseKernelParams,
    out: *mut *mut DiffuseMatrix,
) -> DiffuseStatus {
    guard(|| {
        let data = data_matrix(get(points, "points")?)?;
        let k = get(params, "params")?;
        let sq = pairwise_sq_dist(&data);
        let (eps, _) = resolve_epsilon(&sq, epsilon_choice(k.epsilon)?, data.n_coords())?;
        let variant = match k.variant {
            DiffuseVariant::Plain => DmVariant::Direct,
            DiffuseVariant::Modified => DmVariant::Modified,
        };
        let e = dm_embed(&data, KernelParams::new(eps)?, truncation(k), variant)?;
        put(out, to_handle(e))
    })
}

/// Diffusion-bases embedding of the rows of `points`; writes an `N x eta` matrix.
///
/// # Safety
/// `points` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_db_embed(
    points: *const DiffuseMatrix,
    params: *const DiffuseKernelParams,
    out: *mut *mut DiffuseMatrix,
) -> DiffuseStatus {
    guard(|| {
        let data = data_matrix(get(points, "points")?)?;
        let k = get(params, "params")?;
        let sq = pairwise_sq_dist(&coordinate_vectors(&data));
        let (eps, _) = resolve_epsilon(&sq, epsilon_choice(k.epsilon)?, data.n_points())?;
        let e = db_embed(&data, KernelParams::new(eps)?, truncation(k), db_variant(k.variant))?;
        put(out, to_handle(e))
    })
}

/// Cube from band-sequential values: band, then row, then column.
///
/// # Safety
/// `data` must point to `rows * cols * bands` readable floats and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_cube_new(
    rows: usize,
    cols: usize,
    bands: usize,
    data: *const f32,
    out: *mut *mut DiffuseCube,
) -> DiffuseStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .and_then(|v| v.checked_mul(bands))
            .ok_or_else(|| invalid("cube size overflows"))?;
        let values = slice(data, len, "data")?.to_vec();
        put(out, DiffuseCube(HyperCube::new(rows, cols, bands, values)?))
    })
}

/// Loads a cube from its JSON header; the data file sits next to it with extension `.bsq`.
///
/// # Safety
/// `header` must be a NUL-terminated path and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_cube_load(header: *const c_char, out: *mut *mut DiffuseCube) -> DiffuseStatus {
    guard(|| {
        let h = path(header)?;
        let cube = diffuse::io::load_cube(&h, &diffuse::io::default_data_path(&h))?;
        put(out, DiffuseCube(cube))
    })
}

/// Writes `rows`, `cols` and `bands`; any pointer may be null.
///
/// # Safety
/// `cube` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_cube_shape(cube: *const DiffuseCube, rows: *mut usize, cols: *mut usize, bands: *mut usize) -> DiffuseStatus {
    guard(|| {
        let c = &get(cube, "cube")?.0;
        for (p, v) in [(rows, c.rows()), (cols, c.cols()), (bands, c.bands())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `cube` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diffuse_cube_free(cube: *mut DiffuseCube) {
    free(cube)
}

/// Segments a cube.
///
/// # Safety
/// `cube` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_wwg(
    cube: *const DiffuseCube,
    params: *const DiffuseWwgParams,
    out: *mut *mut DiffuseSegmentation,
) -> DiffuseStatus {
    guard(|| {
        let r = wwg(&get(cube, "cube")?.0, &wwg_params(get(params, "params")?)?)?;
        put(out, DiffuseSegmentation(r.segmentation))
    })
}

/// Re-segments the pixels with label `label` of `seg`; other pixels get label 0.
///
/// # Safety
/// `cube`, `seg` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_drilldown(
    cube: *const DiffuseCube,
    seg: *const DiffuseSegmentation,
    label: u32,
    params: *const DiffuseWwgParams,
    out: *mut *mut DiffuseSegmentation,
) -> DiffuseStatus {
    guard(|| {
        let r = drill_down(&get(cube, "cube")?.0, &get(seg, "segmentation")?.0, label, &wwg_params(get(params, "params")?)?)?;
        put(out, DiffuseSegmentation(r.segmentation))
    })
}

/// Number of segments (labels run from 1 to this value; 0 marks unsegmented pixels).
///
/// # Safety
/// `seg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diffuse_segmentation_count(seg: *const DiffuseSegmentation) -> usize {
    seg.as_ref().map_or(0, |s| s.0.peaks.peaks.len())
}

/// Copies the row-major label map into `buf`, which must hold `rows * cols` labels.
///
/// # Safety
/// `seg` must be a live handle and `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn diffuse_segmentation_labels(seg: *const DiffuseSegmentation, buf: *mut u32, len: usize) -> DiffuseStatus {
    guard(|| copy_out(&get(seg, "segmentation")?.0.labels, buf, len))
}

/// # Safety
/// `seg` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diffuse_segmentation_free(seg: *mut DiffuseSegmentation) {
    free(seg)
}

/// Detects single-pixel anomalies.
///
/// # Safety
/// `cube` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_subpixel(
    cube: *const DiffuseCube,
    params: *const DiffuseSubpixelParams,
    out: *mut *mut DiffuseHits,
) -> DiffuseStatus {
    guard(|| {
        let p = get(params, "params")?;
        let reduced = reduce_cube(&get(cube, "cube")?.0, &reduce_params(&p.kernel)?)?;
        let hits = detect_subpixel(&normalize_layers(&reduced), &SubPixelParams { alpha: p.alpha, tau1: p.tau1, tau2: p.tau2 })?;
        put(out, DiffuseHits(hits))
    })
}

/// # Safety
/// `hits` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diffuse_hits_count(hits: *const DiffuseHits) -> usize {
    hits.as_ref().map_or(0, |h| h.0.len())
}

/// Position and isolated-layer count of detection `index`, in row-major order.
///
/// # Safety
/// `hits` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_hits_get(
    hits: *const DiffuseHits,
    index: usize,
    row: *mut usize,
    col: *mut usize,
    layers: *mut usize,
) -> DiffuseStatus {
    guard(|| {
        let h = get(hits, "hits")?.0.get(index).ok_or_else(|| invalid(format!("hit index {index} out of range")))?;
        for (p, v) in [(row, h.row), (col, h.col), (layers, h.layers_isolated)] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `hits` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diffuse_hits_free(hits: *mut DiffuseHits) {
    free(hits)
}

/// Video from `frames` frames of `channels` planes each, row-major, values in `[0, 255]`.
///
/// # Safety
/// `data` must point to `frames * channels * rows * cols` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_video_new(
    rows: usize,
    cols: usize,
    channels: usize,
    frames: usize,
    data: *const f64,
    out: *mut *mut DiffuseVideo,
) -> DiffuseStatus {
    guard(|| {
        let per = rows
            .checked_mul(cols)
            .and_then(|v| v.checked_mul(channels))
            .ok_or_else(|| invalid("frame size overflows"))?;
        let len = per.checked_mul(frames).ok_or_else(|| invalid("video size overflows"))?;
        let values = slice(data, len, "data")?;
        let frames = if per == 0 { Vec::new() } else { values.chunks(per).map(<[f64]>::to_vec).collect() };
        put(out, DiffuseVideo(FrameSequence::new(rows, cols, channels, frames)?))
    })
}

/// Loads a frame directory (PGM/PPM files in name order) or a cube header (bands as frames).
///
/// # Safety
/// `source` must be a NUL-terminated path and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_video_load(source: *const c_char, out: *mut *mut DiffuseVideo) -> DiffuseStatus {
    guard(|| {
        let seq = diffuse::io::read_video(&path(source)?)?;
        put(out, DiffuseVideo(seq))
    })
}

/// # Safety
/// `video` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diffuse_video_free(video: *mut DiffuseVideo) {
    free(video)
}

/// Static-background subtraction; RGB input is converted to gray first.
///
/// # Safety
/// `video` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_sbsdb(
    video: *const DiffuseVideo,
    params: *const DiffuseVideoParams,
    out: *mut *mut DiffuseMasks,
) -> DiffuseStatus {
    guard(|| {
        let v = &get(video, "video")?.0;
        let p = get(params, "params")?;
        let gray;
        let seq = if v.channels() == 3 {
            gray = v.to_gray();
            &gray
        } else {
            v
        };
        let sp = SbsdbParams {
            window: p.window,
            threshold: threshold_params(p),
            background: BackgroundParams { epsilon: epsilon_choice(p.epsilon)?, ..Default::default() },
        };
        let masks = if single_block(p) {
            sbsdb(seq, &sp)?.masks
        } else {
            parallel_blocks(seq, &partition(p), InnerAlgorithm::Sbsdb(sp))?
        };
        put(out, DiffuseMasks(masks))
    })
}

/// Dynamic-background subtraction of RGB `rtd` trained on RGB `bgd`.
///
/// # Safety
/// `rtd`, `bgd` and `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffuse_dbsdb(
    rtd: *const DiffuseVideo,
    bgd: *const DiffuseVideo,
    params: *const DiffuseVideoParams,
    out: *mut *mut DiffuseMasks,
) -> DiffuseStatus {
    guard(|| {
        let (rtd, bgd) = (&get(rtd, "rtd")?.0, &get(bgd, "bgd")?.0);
        let p = get(params, "params")?;
        let dp = DbsdbParams {
            window: p.window,
            threshold: threshold_params(p),
            dynamic: DynamicParams {
                background: BackgroundParams { epsilon: epsilon_choice(p.epsilon)?, ..Default::default() },
                stop_fraction: p.stop_fraction,
                max_iters: p.max_iters,
            },
        };
        let masks = if single_block(p) {
            dbsdb(rtd, bgd, &dp)?.masks
        } else {
            parallel_blocks(rtd, &partition(p), InnerAlgorithm::Dbsdb { bgd, params: dp })?
        };
        put(out, DiffuseMasks(masks))
    })
}

/// # Safety
/// `masks` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn diffuse_masks_count(masks: *const DiffuseMasks) -> usize {
    masks.as_ref().map_or(0, |m| m.0.len())
}

/// Copies mask `index` (row-major, 1 = foreground) into `buf`, which must hold `rows * cols` bytes.
///
/// # Safety
/// `masks` must be a live handle and `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn diffuse_masks_copy(masks: *const DiffuseMasks, index: usize, buf: *mut u8, len: usize) -> DiffuseStatus {
    guard(|| {
        let m = get(masks, "masks")?.0.get(index).ok_or_else(|| invalid(format!("mask index {index} out of range")))?;
        copy_out(m.values(), buf, len)
    })
}

/// # Safety
/// `masks` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diffuse_masks_free(masks: *mut DiffuseMasks) {
    free(masks)
}
