use rayon::prelude::*;

use crate::error::{Error, Result};

use super::background::{capture_dynamic_background, normalize_255, DynamicBackground, DynamicParams};
use super::frames::{BinaryMask, FrameSequence};
use super::sbsdb::{subtract_backgrounds, threshold_gray};
use super::threshold::{bin_of, histogram, rgb_threshold, smooth, ThresholdParams};

/// Union of the 8-connected foreground components of `rgb` that contain a
/// foreground pixel of `gray`.
pub fn dfs_combine(gray: &BinaryMask, rgb: &BinaryMask) -> BinaryMask {
    assert_eq!((gray.rows(), gray.cols()), (rgb.rows(), rgb.cols()), "mask shapes differ");
    let (rows, cols) = (rgb.rows(), rgb.cols());
    let mut out = BinaryMask::zeros(rows, cols);
    let mut stack = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if !(gray.get(r, c) && rgb.get(r, c)) || out.get(r, c) {
                continue;
            }
            out.set(r, c, true);
            stack.push((r, c));
            while let Some((y, x)) = stack.pop() {
                for yy in y.saturating_sub(1)..=(y + 1).min(rows - 1) {
                    for xx in x.saturating_sub(1)..=(x + 1).min(cols - 1) {
                        if rgb.get(yy, xx) && !out.get(yy, xx) {
                            out.set(yy, xx, true);
                            stack.push((yy, xx));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Settings of the dynamic-background pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbsdbParams {
    pub window: usize,
    pub threshold: ThresholdParams,
    pub dynamic: DynamicParams,
}

impl Default for DbsdbParams {
    fn default() -> Self {
        Self { window: 5, threshold: ThresholdParams::default(), dynamic: DynamicParams::default() }
    }
}

#[derive(Debug, Clone)]
pub struct DbsdbOutput {
    pub masks: Vec<BinaryMask>,
    pub gray_masks: Vec<BinaryMask>,
    pub rgb_masks: Vec<BinaryMask>,
    pub gray_background: DynamicBackground,
    pub rgb_background: Vec<DynamicBackground>,
}

/// Dynamic-background subtraction: train on `bgd`, classify `rtd`.
///
/// Both sequences must be RGB with the same frame size.
pub fn dbsdb(rtd: &FrameSequence, bgd: &FrameSequence, params: &DbsdbParams) -> Result<DbsdbOutput> {
    if rtd.channels() != 3 || bgd.channels() != 3 {
        return Err(Error::invalid("dynamic background subtraction needs RGB sequences"));
    }
    if (rtd.rows(), rtd.cols()) != (bgd.rows(), bgd.cols()) {
        return Err(Error::invalid("training and test frames differ in size"));
    }
    params.threshold.validate()?;
    let (rows, cols) = (rtd.rows(), rtd.cols());
    let bg_params = &params.dynamic.background;

    // Gray training on the residuals of the static pass.
    let bgd_gray = bgd.to_gray();
    let residual = subtract_backgrounds(&bgd_gray, params.window, bg_params)?;
    let residual = FrameSequence::gray(rows, cols, residual.frames)?;
    let gray_background = capture_dynamic_background(&residual, &params.dynamic)?;

    // Colour training per channel.
    let rgb_background = (0..3)
        .map(|ch| capture_dynamic_background(&bgd.channel(ch), &params.dynamic))
        .collect::<Result<Vec<_>>>()?;

    // Gray classification.
    let rtd_gray = rtd.to_gray();
    let sub = subtract_backgrounds(&rtd_gray, params.window, bg_params)?;
    let dyn_gray = &gray_background.model.bg_norm;
    let gray_masks: Vec<BinaryMask> = sub
        .frames
        .par_iter()
        .map(|f| {
            let s: Vec<f64> = f.iter().zip(dyn_gray).map(|(v, b)| (v - b).max(0.0)).collect();
            threshold_gray(&s, rows, cols, &params.threshold).0
        })
        .collect();

    // Colour classification.
    let rgb_masks: Vec<BinaryMask> = (0..rtd.len())
        .into_par_iter()
        .map(|t| {
            let mut mask = BinaryMask::zeros(rows, cols);
            for (ch, bg) in rgb_background.iter().enumerate() {
                let diff: Vec<f64> = rtd.plane(t, ch).iter().zip(&bg.model.bg_norm).map(|(s, b)| s - b).collect();
                let norm = normalize_255(&diff);
                let h = smooth(&histogram(&norm), params.threshold.smoothing_width);
                let th = rgb_threshold(&h, params.threshold.mu_for(&h));
                let channel = BinaryMask::from_fn(rows, cols, |r, c| {
                    let b = bin_of(norm[r * cols + c]) as i64;
                    !(th.lower < b && b < th.upper)
                });
                mask = mask.or(&channel);
            }
            mask
        })
        .collect();

    let masks = gray_masks.iter().zip(&rgb_masks).map(|(g, c)| dfs_combine(g, c)).collect();
    Ok(DbsdbOutput { masks, gray_masks, rgb_masks, gray_background, rgb_background })
}
