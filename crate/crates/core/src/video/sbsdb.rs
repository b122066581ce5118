use crate::error::{Error, Result};

use super::background::{model_from_kernel, window_epsilon, BackgroundModel, BackgroundParams, SlidingKernel};
use super::frames::{BinaryMask, FrameSequence};
use super::threshold::{bin_of, gray_threshold, histogram, smooth, GrayThreshold, ThresholdParams};

/// Settings of the static-background pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbsdbParams {
    pub window: usize,
    pub threshold: ThresholdParams,
    pub background: BackgroundParams,
}

impl Default for SbsdbParams {
    fn default() -> Self {
        Self { window: 5, threshold: ThresholdParams::default(), background: BackgroundParams::default() }
    }
}

/// Frames after background subtraction, negatives zeroed.
#[derive(Debug, Clone)]
pub struct Subtracted {
    pub frames: Vec<Vec<f64>>,
    /// One background per window position.
    pub backgrounds: Vec<BackgroundModel>,
    pub epsilon: f64,
}

/// Sliding-window background subtraction without thresholding.
///
/// Frame `i` uses the background of the window starting at `i`; frames past
/// the last full window reuse the last background. The kernel scale is
/// resolved on the first window and kept for the whole stream, and each
/// slide computes only the distances to the incoming frame.
pub fn subtract_backgrounds(seq: &FrameSequence, window: usize, params: &BackgroundParams) -> Result<Subtracted> {
    if seq.channels() != 1 {
        return Err(Error::invalid("background subtraction needs a gray sequence"));
    }
    let n = seq.len();
    if window > n {
        return Err(Error::WindowTooLarge { window, frames: n });
    }
    if window < 2 {
        return Err(Error::invalid("window must be at least 2"));
    }
    let refs: Vec<&[f64]> = seq.frames().iter().map(Vec::as_slice).collect();
    let mut kernel = SlidingKernel::new(&refs[0..window]);
    let epsilon = window_epsilon(kernel.sq_dist(), params.epsilon, seq.pixels())?;
    let last = n - window;
    let mut backgrounds = Vec::with_capacity(last + 1);
    for i in 0..=last {
        if i > 0 {
            kernel.push(refs[i + window - 1]);
        }
        backgrounds.push(model_from_kernel(&kernel, seq.rows(), seq.cols(), epsilon, params.variant, (i, i + window))?);
    }
    let frames = (0..n)
        .map(|t| {
            let bg = &backgrounds[t.min(last)].bg_norm;
            refs[t].iter().zip(bg).map(|(s, b)| (s - b).max(0.0)).collect()
        })
        .collect();
    Ok(Subtracted { frames, backgrounds, epsilon })
}

/// Foreground where a frame reaches its own histogram threshold.
pub fn threshold_gray(frame: &[f64], rows: usize, cols: usize, params: &ThresholdParams) -> (BinaryMask, GrayThreshold) {
    let h = smooth(&histogram(frame), params.smoothing_width);
    let th = gray_threshold(&h, params.mu_for(&h));
    let values = frame.iter().map(|&v| u8::from(bin_of(v) >= th.th)).collect();
    (BinaryMask::from_values(rows, cols, values).expect("mask shape"), th)
}

#[derive(Debug, Clone)]
pub struct SbsdbOutput {
    pub masks: Vec<BinaryMask>,
    pub thresholds: Vec<GrayThreshold>,
    pub epsilon: f64,
}

/// Static-background subtraction of a gray sequence.
pub fn sbsdb(seq: &FrameSequence, params: &SbsdbParams) -> Result<SbsdbOutput> {
    params.threshold.validate()?;
    let sub = subtract_backgrounds(seq, params.window, &params.background)?;
    let (masks, thresholds) = sub
        .frames
        .iter()
        .map(|f| threshold_gray(f, seq.rows(), seq.cols(), &params.threshold))
        .unzip();
    Ok(SbsdbOutput { masks, thresholds, epsilon: sub.epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence_has_no_foreground() {
        let seq = FrameSequence::gray(3, 3, vec![vec![90.0; 9]; 7]).unwrap();
        let out = sbsdb(&seq, &SbsdbParams::default()).unwrap();
        assert!(out.masks.iter().all(|m| m.count() == 0));
    }

    #[test]
    fn window_too_large() {
        let seq = FrameSequence::gray(2, 2, vec![vec![0.0; 4]; 3]).unwrap();
        let p = SbsdbParams { window: 4, ..Default::default() };
        assert!(matches!(sbsdb(&seq, &p), Err(Error::WindowTooLarge { window: 4, frames: 3 })));
    }

    #[test]
    fn full_window_shares_one_background() {
        let frames: Vec<Vec<f64>> = (0..4).map(|t| (0..4).map(|i| (t * 4 + i) as f64).collect()).collect();
        let seq = FrameSequence::gray(2, 2, frames).unwrap();
        let sub = subtract_backgrounds(&seq, 4, &BackgroundParams::default()).unwrap();
        assert_eq!(sub.backgrounds.len(), 1);
    }
}
