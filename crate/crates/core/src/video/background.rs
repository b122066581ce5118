use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::diffusion::{gaussian_affinity, resolve_epsilon, DbVariant, EpsilonChoice, KernelParams};
use crate::error::{Error, Result};

use super::frames::FrameSequence;

/// Settings for estimating a background from a window of frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundParams {
    pub epsilon: EpsilonChoice,
    pub variant: DbVariant,
}

impl Default for BackgroundParams {
    fn default() -> Self {
        Self { epsilon: EpsilonChoice::Auto, variant: DbVariant::Plain }
    }
}

/// Background estimate of a window: the raw first diffusion-bases vector
/// and its `[0, 255]` normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundModel {
    pub rows: usize,
    pub cols: usize,
    pub bg: Vec<f64>,
    pub bg_norm: Vec<f64>,
    /// Frame range `start..end` the estimate was built from.
    pub window: (usize, usize),
    pub epsilon: f64,
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Min-max scaling to `[0, 255]`. A constant image maps to 255 everywhere,
/// so subtracting it clears any frame.
pub fn normalize_255(v: &[f64]) -> Vec<f64> {
    normalize_range(v, 0.0, 255.0)
}

/// Min-max scaling to `[lo, hi]`; a constant image maps to `hi`.
pub fn normalize_range(v: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let (min, max) = value_range(v.iter().copied());
    let span = max - min;
    if span > 0.0 {
        v.iter().map(|x| lo + (hi - lo) * (x - min) / span).collect()
    } else {
        vec![hi; v.len()]
    }
}

fn value_range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Squared distances between the frames of a sliding window, updated one
/// row and column per slide.
#[derive(Debug, Clone)]
pub struct SlidingKernel {
    frames: VecDeque<Vec<f64>>,
    sq: DMatrix<f64>,
}

impl SlidingKernel {
    pub fn new(frames: &[&[f64]]) -> Self {
        let m = frames.len();
        let mut sq = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let d = sq_dist(frames[i], frames[j]);
                sq[(i, j)] = d;
                sq[(j, i)] = d;
            }
        }
        Self { frames: frames.iter().map(|f| f.to_vec()).collect(), sq }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Drops the oldest frame and appends `frame`.
    pub fn push(&mut self, frame: &[f64]) {
        let m = self.frames.len();
        self.frames.pop_front();
        let mut sq = DMatrix::zeros(m, m);
        sq.view_mut((0, 0), (m - 1, m - 1)).copy_from(&self.sq.view((1, 1), (m - 1, m - 1)));
        for (i, f) in self.frames.iter().enumerate() {
            let d = sq_dist(f, frame);
            sq[(i, m - 1)] = d;
            sq[(m - 1, i)] = d;
        }
        self.frames.push_back(frame.to_vec());
        self.sq = sq;
    }

    pub fn sq_dist(&self) -> &DMatrix<f64> {
        &self.sq
    }

    pub fn frames(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.frames.iter()
    }
}

/// First basis vector over the frames, applied to every pixel.
///
/// The first vector is known in closed form: `nu_1` is all ones and
/// `theta_1` is the unit-norm square root of the degrees. Using it directly
/// keeps the estimate defined when residual frames split the frame graph
/// into nearly disconnected pieces.
fn background_from(frames: &[&[f64]], sq: &DMatrix<f64>, epsilon: f64, variant: DbVariant) -> Result<Vec<f64>> {
    let basis = first_basis_vector(sq, epsilon, variant)?;
    let n = frames[0].len();
    let mut bg = vec![0.0; n];
    for (t, f) in frames.iter().enumerate() {
        let w = basis[t];
        for (b, v) in bg.iter_mut().zip(f.iter()) {
            *b += w * v;
        }
    }
    Ok(bg)
}

pub(crate) fn first_basis_vector(sq: &DMatrix<f64>, epsilon: f64, variant: DbVariant) -> Result<DVector<f64>> {
    let m = sq.nrows();
    match variant {
        DbVariant::Plain => Ok(DVector::from_element(m, 1.0)),
        DbVariant::Modified => {
            let w = gaussian_affinity(sq, KernelParams::new(epsilon)?);
            let root = DVector::from_iterator(m, w.row_iter().map(|r| r.sum().sqrt()));
            Ok(&root / root.norm())
        }
    }
}

fn check_gray(seq: &FrameSequence) -> Result<()> {
    if seq.channels() != 1 {
        return Err(Error::invalid("background estimation needs a gray sequence"));
    }
    Ok(())
}

/// Resolves the kernel scale once for a window of frames.
pub(crate) fn window_epsilon(sq: &DMatrix<f64>, choice: EpsilonChoice, pixels: usize) -> Result<f64> {
    Ok(resolve_epsilon(sq, choice, pixels)?.0)
}

/// Background of a window of at least two gray frames.
pub fn capture_static_background(window: &FrameSequence, params: &BackgroundParams) -> Result<BackgroundModel> {
    check_gray(window)?;
    if window.len() < 2 {
        return Err(Error::invalid("a background window needs at least two frames"));
    }
    let frames: Vec<&[f64]> = window.frames().iter().map(Vec::as_slice).collect();
    let kernel = SlidingKernel::new(&frames);
    let epsilon = window_epsilon(kernel.sq_dist(), params.epsilon, window.pixels())?;
    model_from_kernel(&kernel, window.rows(), window.cols(), epsilon, params.variant, (0, window.len()))
}

pub(crate) fn model_from_kernel(
    kernel: &SlidingKernel,
    rows: usize,
    cols: usize,
    epsilon: f64,
    variant: DbVariant,
    window: (usize, usize),
) -> Result<BackgroundModel> {
    let frames: Vec<&[f64]> = kernel.frames().map(Vec::as_slice).collect();
    let bg = background_from(&frames, kernel.sq_dist(), epsilon, variant)?;
    let bg_norm = normalize_255(&bg);
    Ok(BackgroundModel { rows, cols, bg, bg_norm, window, epsilon })
}

/// Settings of the iterative dynamic-background capture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicParams {
    pub background: BackgroundParams,
    /// Stop once this fraction of all pixel values is non-positive.
    pub stop_fraction: f64,
    pub max_iters: usize,
}

impl Default for DynamicParams {
    fn default() -> Self {
        Self { background: BackgroundParams::default(), stop_fraction: 0.99, max_iters: 10 }
    }
}

impl DynamicParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.stop_fraction > 0.0 && self.stop_fraction <= 1.0) || self.max_iters == 0 {
            return Err(Error::invalid("stop fraction must be in (0, 1] and max_iters positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicBackground {
    /// Accumulated background and its normalization.
    pub model: BackgroundModel,
    pub iterations: usize,
    /// False when `max_iters` ran out before the stop fraction was reached.
    pub converged: bool,
    /// Non-positive fraction after each iteration.
    pub fractions: Vec<f64>,
}

/// Repeatedly estimates and subtracts a background, zeroing negatives, and
/// accumulates the raw estimates until enough of the sequence is cleared.
///
/// Each estimate is scaled to the value range of the frames it was taken
/// from, and the accumulated background to the range of `bgd`; for 8-bit
/// frames spanning `[0, 255]` this is the usual `[0, 255]` normalization.
pub fn capture_dynamic_background(bgd: &FrameSequence, params: &DynamicParams) -> Result<DynamicBackground> {
    check_gray(bgd)?;
    params.validate()?;
    if bgd.len() < 2 {
        return Err(Error::invalid("dynamic background needs at least two frames"));
    }
    let n = bgd.pixels();
    let mut frames: Vec<Vec<f64>> = bgd.frames().to_vec();
    let mut total = vec![0.0; n];
    let mut fractions = Vec::new();
    let mut epsilon = 0.0;
    let mut converged = false;
    for _ in 0..params.max_iters {
        let refs: Vec<&[f64]> = frames.iter().map(Vec::as_slice).collect();
        let kernel = SlidingKernel::new(&refs);
        epsilon = window_epsilon(kernel.sq_dist(), params.background.epsilon, n)?;
        let model = model_from_kernel(&kernel, bgd.rows(), bgd.cols(), epsilon, params.background.variant, (0, bgd.len()))?;
        for (t, b) in total.iter_mut().zip(&model.bg) {
            *t += b;
        }
        let (lo, hi) = value_range(frames.iter().flatten().copied());
        let bg_norm = normalize_range(&model.bg, lo, hi);
        let mut non_positive = 0usize;
        for f in frames.iter_mut() {
            for (v, b) in f.iter_mut().zip(&bg_norm) {
                *v = (*v - b).max(0.0);
                non_positive += usize::from(*v <= 0.0);
            }
        }
        let fraction = non_positive as f64 / (n * frames.len()) as f64;
        fractions.push(fraction);
        if fraction >= params.stop_fraction {
            converged = true;
            break;
        }
    }
    let (lo, hi) = value_range(bgd.frames().iter().flatten().copied());
    let bg_norm = normalize_range(&total, lo, hi);
    let model = BackgroundModel { rows: bgd.rows(), cols: bgd.cols(), bg: total, bg_norm, window: (0, bgd.len()), epsilon };
    Ok(DynamicBackground { model, iterations: fractions.len(), converged, fractions })
}
