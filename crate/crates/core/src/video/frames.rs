use crate::error::{Error, Result};

/// Binary image, row-major, values 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    rows: usize,
    cols: usize,
    values: Vec<u8>,
}

impl BinaryMask {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, values: vec![0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(u8::from(f(r, c)));
            }
        }
        Self { rows, cols, values }
    }

    pub fn from_values(rows: usize, cols: usize, values: Vec<u8>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::invalid(format!("mask needs {} values, got {}", rows * cols, values.len())));
        }
        if values.iter().any(|v| *v > 1) {
            return Err(Error::invalid("mask values must be 0 or 1"));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.values[row * self.cols + col] == 1
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.values[row * self.cols + col] = u8::from(on);
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|v| **v == 1).count()
    }

    /// Pixel-wise OR of two masks of the same shape.
    pub fn or(&self, other: &BinaryMask) -> BinaryMask {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "mask shapes differ");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a | b).collect();
        BinaryMask { rows: self.rows, cols: self.cols, values }
    }

    /// Intersection over union; two empty masks score 1.
    pub fn iou(&self, other: &BinaryMask) -> f64 {
        let (mut inter, mut union) = (0usize, 0usize);
        for (a, b) in self.values.iter().zip(&other.values) {
            inter += usize::from(a & b);
            union += usize::from(a | b);
        }
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// Video frames with one (gray) or three (RGB) channels, each channel a
/// row-major plane of `rows * cols` values.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    rows: usize,
    cols: usize,
    channels: usize,
    frames: Vec<Vec<f64>>,
}

impl FrameSequence {
    /// `frames[t]` holds `channels` consecutive planes.
    pub fn new(rows: usize, cols: usize, channels: usize, frames: Vec<Vec<f64>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("frames must have positive size"));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!("frames need 1 or 3 channels, got {channels}")));
        }
        if frames.is_empty() {
            return Err(Error::invalid("sequence has no frames"));
        }
        let len = rows * cols * channels;
        if let Some(t) = frames.iter().position(|f| f.len() != len) {
            return Err(Error::invalid(format!("frame {t} has {} values, expected {len}", frames[t].len())));
        }
        if frames.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("frames contain non-finite values"));
        }
        Ok(Self { rows, cols, channels, frames })
    }

    pub fn gray(rows: usize, cols: usize, frames: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows, cols, 1, frames)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.frames[t]
    }

    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn plane(&self, t: usize, channel: usize) -> &[f64] {
        let n = self.pixels();
        &self.frames[t][channel * n..(channel + 1) * n]
    }

    /// One channel as a gray sequence.
    pub fn channel(&self, channel: usize) -> FrameSequence {
        let frames = (0..self.len()).map(|t| self.plane(t, channel).to_vec()).collect();
        FrameSequence { rows: self.rows, cols: self.cols, channels: 1, frames }
    }

    /// Luma `0.299 R + 0.587 G + 0.114 B`; gray input is returned unchanged.
    pub fn to_gray(&self) -> FrameSequence {
        if self.channels == 1 {
            return self.clone();
        }
        let frames = (0..self.len())
            .map(|t| {
                let (r, g, b) = (self.plane(t, 0), self.plane(t, 1), self.plane(t, 2));
                (0..self.pixels()).map(|i| 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]).collect()
            })
            .collect();
        FrameSequence { rows: self.rows, cols: self.cols, channels: 1, frames }
    }

    /// Rectangular crop of every frame.
    pub fn crop(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> FrameSequence {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "crop out of bounds");
        let frames = self
            .frames
            .iter()
            .map(|f| {
                let mut out = Vec::with_capacity(rows * cols * self.channels);
                for ch in 0..self.channels {
                    let plane = &f[ch * self.pixels()..(ch + 1) * self.pixels()];
                    for r in row0..row0 + rows {
                        out.extend_from_slice(&plane[r * self.cols + col0..r * self.cols + col0 + cols]);
                    }
                }
                out
            })
            .collect();
        FrameSequence { rows, cols, channels: self.channels, frames }
    }
}
