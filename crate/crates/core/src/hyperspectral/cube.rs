use nalgebra::DMatrix;

use crate::diffusion::DataMatrix;
use crate::error::{Error, Result};

/// Hyper-spectral image cube stored band-sequentially: band slowest, then
/// rows, then columns.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    rows: usize,
    cols: usize,
    bands: usize,
    values: Vec<f32>,
}

impl HyperCube {
    pub fn new(rows: usize, cols: usize, bands: usize, values: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 || bands == 0 {
            return Err(Error::invalid(format!("cube dimensions must be positive, got {rows}x{cols}x{bands}")));
        }
        let expected = rows
            .checked_mul(cols)
            .and_then(|v| v.checked_mul(bands))
            .ok_or_else(|| Error::invalid("cube dimensions overflow"))?;
        if values.len() != expected {
            return Err(Error::invalid(format!("expected {expected} values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("cube contains non-finite values"));
        }
        Ok(Self { rows, cols, bands, values })
    }

    /// Builds a cube from `f(row, col, band)`.
    pub fn from_fn(rows: usize, cols: usize, bands: usize, mut f: impl FnMut(usize, usize, usize) -> f32) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols * bands);
        for b in 0..bands {
            for r in 0..rows {
                for c in 0..cols {
                    values.push(f(r, c, b));
                }
            }
        }
        Self::new(rows, cols, bands, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    /// Raw band-sequential values.
    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize, band: usize) -> f32 {
        self.values[band * self.pixels() + row * self.cols + col]
    }

    /// One band as a row-major image.
    pub fn band(&self, band: usize) -> &[f32] {
        let n = self.pixels();
        &self.values[band * n..(band + 1) * n]
    }

    /// The spectrum of one pixel.
    pub fn hyper_pixel(&self, row: usize, col: usize) -> Vec<f64> {
        (0..self.bands).map(|b| self.value(row, col, b) as f64).collect()
    }

    /// Pixels as rows of an `(R*C) x L` matrix, each band min-max scaled to
    /// `[0, 1]` over the selected pixels. A constant band becomes zeros.
    pub(crate) fn normalized_pixels(&self, select: &[usize]) -> DataMatrix {
        let n = self.pixels();
        let mut m = DMatrix::zeros(select.len(), self.bands);
        for b in 0..self.bands {
            let band = &self.values[b * n..(b + 1) * n];
            let (lo, hi) = select
                .iter()
                .map(|&p| band[p] as f64)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            let span = hi - lo;
            for (i, &p) in select.iter().enumerate() {
                m[(i, b)] = if span > 0.0 { (band[p] as f64 - lo) / span } else { 0.0 };
            }
        }
        DataMatrix::new(m).expect("normalized values are finite")
    }
}

/// Wavelength-averaged image, row-major `R x C`.
pub fn wav_image(cube: &HyperCube) -> DMatrix<f64> {
    let l = cube.bands() as f64;
    DMatrix::from_fn(cube.rows(), cube.cols(), |r, c| {
        (0..cube.bands()).map(|b| cube.value(r, c, b) as f64).sum::<f64>() / l
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wav_of_two_constant_bands() {
        let cube = HyperCube::from_fn(2, 3, 2, |_, _, b| if b == 0 { 2.0 } else { 4.0 }).unwrap();
        assert!(wav_image(&cube).iter().all(|v| *v == 3.0));
    }

    #[test]
    fn wav_of_single_band_is_copy() {
        let cube = HyperCube::from_fn(2, 2, 1, |r, c, _| (r * 2 + c) as f32).unwrap();
        let w = wav_image(&cube);
        assert_eq!(w[(1, 0)], 2.0);
    }

    #[test]
    fn wav_matches_loop() {
        let cube = HyperCube::from_fn(4, 4, 3, |r, c, b| ((r * 7 + c * 3 + b * 11) % 13) as f32 * 0.37).unwrap();
        let w = wav_image(&cube);
        for r in 0..4 {
            for c in 0..4 {
                let mut s = 0.0;
                for b in 0..3 {
                    s += cube.values()[b * 16 + r * 4 + c] as f64;
                }
                assert!((w[(r, c)] - s / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_sizes() {
        assert!(HyperCube::new(2, 2, 2, vec![0.0; 7]).is_err());
        assert!(HyperCube::new(0, 2, 2, vec![]).is_err());
        assert!(HyperCube::new(1, 1, 1, vec![f32::NAN]).is_err());
    }

    #[test]
    fn constant_band_normalizes_to_zero() {
        let cube = HyperCube::from_fn(1, 3, 2, |_, c, b| if b == 0 { 5.0 } else { c as f32 }).unwrap();
        let m = cube.normalized_pixels(&[0, 1, 2]);
        assert_eq!(m.values().column(0).as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(m.values().column(1).as_slice(), &[0.0, 0.5, 1.0]);
    }
}
