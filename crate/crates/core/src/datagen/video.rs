use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::video::{BinaryMask, FrameSequence};

use super::rng::SeededRng;

/// Side of the dark/bright calibration patches placed in each corner.
pub const PATCH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VideoMode {
    /// Fixed background.
    Static,
    /// Every background pixel oscillates as
    /// `amplitude * gain(x) * sin(2 pi t / period + phase(x))`. Phase and
    /// gain are drawn once per pixel; gain is `0.1 + 0.9 u^2` with `u`
    /// uniform, so most pixels flicker weakly and a few strongly.
    Flicker { amplitude: f64, period: f64 },
}

/// Moving square bouncing inside the frame, clear of the corner patches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareSpec {
    /// Side in pixels; zero disables the square.
    pub size: usize,
    /// Top-left corner at frame 0, `(row, col)`.
    pub start: (f64, f64),
    /// Pixels per frame, `(row, col)`.
    pub velocity: (f64, f64),
    /// Channel intensities; gray videos use the first entry.
    pub intensity: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VideoSpec {
    pub rows: usize,
    pub cols: usize,
    pub frames: usize,
    /// Time index of the first frame; lets a training clip and a test clip
    /// share one background.
    pub first_frame: usize,
    pub mode: VideoMode,
    pub square: SquareSpec,
    pub noise_sigma: f64,
    pub color: bool,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SynthVideo {
    pub frames: FrameSequence,
    /// Square pixels of each frame.
    pub masks: Vec<BinaryMask>,
}

/// Smooth texture in `[10, 110]`; dark and bright patches in the corners
/// span the full `[0, 255]` range.
fn base_value(rows: usize, cols: usize, r: usize, c: usize, ch: usize) -> f64 {
    if let Some(v) = patch_value(rows, cols, r, c) {
        return v;
    }
    let (y, x) = (r as f64 / rows as f64, c as f64 / cols as f64);
    let k = ch as f64;
    let a = (TAU * (1.3 + 0.4 * k) * y + 0.7 * k).sin();
    let b = (TAU * (0.9 + 0.3 * k) * x + 1.1).cos();
    let g = (TAU * (2.1 * x + 1.7 * y) + k).sin();
    60.0 + 28.0 * a * b + 22.0 * g
}

fn patch_value(rows: usize, cols: usize, r: usize, c: usize) -> Option<f64> {
    let top = r < PATCH;
    let bottom = r + PATCH >= rows;
    let left = c < PATCH;
    let right = c + PATCH >= cols;
    if (top || bottom) && (left || right) {
        let local = if left { c } else { c + PATCH - cols };
        Some(if local < PATCH / 2 { 0.0 } else { 255.0 })
    } else {
        None
    }
}

fn bounce(p: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    if span <= 0.0 {
        return lo;
    }
    let m = (p - lo).rem_euclid(2.0 * span);
    lo + if m <= span { m } else { 2.0 * span - m }
}

/// Synthetic clip with ground-truth square masks.
///
/// Pixels are clamped to `[0, 255]` after noise. In flicker mode the
/// per-pixel phase and gain are drawn from `seed`, row-major, phase before
/// gain. The noise of the frame at absolute time `t` comes from its own
/// generator seeded with `seed ^ ((t + 1) * 0x9E3779B97F4A7C15)`, drawn per
/// channel in row-major order, so clips with different `first_frame` are
/// windows of one video.
pub fn synth_video(spec: &VideoSpec) -> Result<SynthVideo> {
    let (rows, cols) = (spec.rows, spec.cols);
    if rows < 2 * PATCH + 1 || cols < 2 * PATCH + 1 || spec.frames == 0 {
        return Err(Error::invalid("video must be at least 9x9 with one frame"));
    }
    let sq = spec.square;
    if sq.size > 0 && (sq.size + 2 * PATCH > rows || sq.size + 2 * PATCH > cols) {
        return Err(Error::invalid("square does not fit between the corner patches"));
    }
    let channels = if spec.color { 3 } else { 1 };
    let mut field = SeededRng::new(spec.seed);
    let flicker: Vec<(f64, f64)> = match spec.mode {
        VideoMode::Static => Vec::new(),
        VideoMode::Flicker { .. } => (0..rows * cols)
            .map(|_| {
                let phase = TAU * field.uniform();
                (phase, 0.1 + 0.9 * field.uniform().powi(2))
            })
            .collect(),
    };
    let mut frames = Vec::with_capacity(spec.frames);
    let mut masks = Vec::with_capacity(spec.frames);
    for f in 0..spec.frames {
        let abs = spec.first_frame + f;
        let t = abs as f64;
        let mut rng = SeededRng::new(spec.seed ^ (abs as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mask = if sq.size == 0 {
            BinaryMask::zeros(rows, cols)
        } else {
            let lo = PATCH as f64;
            let r0 = bounce(sq.start.0 + sq.velocity.0 * t, lo, (rows - PATCH - sq.size) as f64).round() as usize;
            let c0 = bounce(sq.start.1 + sq.velocity.1 * t, lo, (cols - PATCH - sq.size) as f64).round() as usize;
            BinaryMask::from_fn(rows, cols, |r, c| r >= r0 && r < r0 + sq.size && c >= c0 && c < c0 + sq.size)
        };
        let mut frame = Vec::with_capacity(rows * cols * channels);
        for ch in 0..channels {
            for r in 0..rows {
                for c in 0..cols {
                    let mut v = if mask.get(r, c) {
                        sq.intensity[ch]
                    } else {
                        let base = base_value(rows, cols, r, c, ch);
                        match spec.mode {
                            VideoMode::Static => base,
                            VideoMode::Flicker { amplitude, period } => {
                                let (phase, gain) = flicker[r * cols + c];
                                let wave = (TAU * t / period + phase).sin();
                                match patch_value(rows, cols, r, c) {
                                    Some(0.0) => amplitude * 0.5 * (1.0 + wave),
                                    Some(_) => 255.0 - amplitude * 0.5 * (1.0 + wave),
                                    None => base + amplitude * gain * wave,
                                }
                            }
                        }
                    };
                    if spec.noise_sigma > 0.0 {
                        v += spec.noise_sigma * rng.normal();
                    }
                    frame.push(v.clamp(0.0, 255.0));
                }
            }
        }
        frames.push(frame);
        masks.push(mask);
    }
    Ok(SynthVideo { frames: FrameSequence::new(rows, cols, channels, frames)?, masks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(mode: VideoMode, size: usize, noise: f64) -> VideoSpec {
        VideoSpec {
            rows: 32,
            cols: 32,
            frames: 6,
            first_frame: 0,
            mode,
            square: SquareSpec { size, start: (5.0, 9.0), velocity: (3.0, 2.0), intensity: [230.0, 200.0, 60.0] },
            noise_sigma: noise,
            color: false,
            seed: 4,
        }
    }

    #[test]
    fn no_square_means_empty_masks() {
        let v = synth_video(&spec(VideoMode::Static, 0, 1.0)).unwrap();
        assert!(v.masks.iter().all(|m| m.count() == 0));
    }

    #[test]
    fn static_difference_is_the_square() {
        let v = synth_video(&spec(VideoMode::Static, 4, 0.0)).unwrap();
        let bg = synth_video(&spec(VideoMode::Static, 0, 0.0)).unwrap();
        for t in 0..6 {
            for i in 0..32 * 32 {
                let diff = v.frames.frame(t)[i] != bg.frames.frame(t)[i];
                assert_eq!(diff, v.masks[t].values()[i] == 1);
            }
            assert_eq!(v.masks[t].count(), 16);
        }
    }

    #[test]
    fn flicker_varies_every_background_pixel() {
        let v = synth_video(&spec(VideoMode::Flicker { amplitude: 10.0, period: 5.0 }, 0, 0.0)).unwrap();
        for i in 0..32 * 32 {
            let xs: Vec<f64> = (0..6).map(|t| v.frames.frame(t)[i]).collect();
            let mean = xs.iter().sum::<f64>() / 6.0;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
            assert!(var > 0.0, "pixel {i}");
        }
    }

    #[test]
    fn clips_are_windows_of_one_video() {
        let mode = VideoMode::Flicker { amplitude: 10.0, period: 5.0 };
        let whole = synth_video(&spec(mode, 4, 1.0)).unwrap();
        let tail = synth_video(&VideoSpec { frames: 2, first_frame: 4, ..spec(mode, 4, 1.0) }).unwrap();
        assert_eq!(tail.frames.frame(0), whole.frames.frame(4));
        assert_eq!(tail.frames.frame(1), whole.frames.frame(5));
    }

    #[test]
    fn bounce_stays_in_range() {
        for k in 0..100 {
            let p = bounce(4.0 + 7.0 * k as f64, 4.0, 20.0);
            assert!((4.0..=20.0).contains(&p));
        }
    }
}
