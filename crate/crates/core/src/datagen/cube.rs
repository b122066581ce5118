use crate::error::{Error, Result};
use crate::hyperspectral::HyperCube;

use super::rng::SeededRng;

/// Pixel set of a region. Pixel `(r, c)` belongs to a polygon when its
/// centre `(r + 0.5, c + 0.5)` is inside by the even-odd rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Vertices as `(row, col)` in pixel units.
    Polygon(Vec<(f64, f64)>),
    Rect { row: usize, col: usize, rows: usize, cols: usize },
    /// Every pixel not claimed by another region.
    Rest,
}

impl Shape {
    fn contains(&self, r: usize, c: usize) -> bool {
        match self {
            Shape::Polygon(v) => point_in_polygon(v, r as f64 + 0.5, c as f64 + 0.5),
            Shape::Rect { row, col, rows, cols } => r >= *row && r < row + rows && c >= *col && c < col + cols,
            Shape::Rest => false,
        }
    }
}

fn point_in_polygon(v: &[(f64, f64)], y: f64, x: f64) -> bool {
    let mut inside = false;
    let n = v.len();
    for i in 0..n {
        let (yi, xi) = v[i];
        let (yj, xj) = v[(i + n - 1) % n];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
    }
    inside
}

/// Linear blend from a region's spectrum to `end` across the image.
///
/// The blend weight is `(wr * r / (R-1) + wc * c / (C-1)) / (wr + wc)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ramp {
    pub end: Vec<f64>,
    pub row_weight: f64,
    pub col_weight: f64,
}

/// Plane wave added on top of a region: `spectrum * sin(2 pi (fr r / R + fc c / C) + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave {
    pub spectrum: Vec<f64>,
    pub row_cycles: f64,
    pub col_cycles: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub shape: Shape,
    pub spectrum: Vec<f64>,
    pub ramp: Option<Ramp>,
    pub waves: Vec<Wave>,
}

impl Region {
    pub fn new(shape: Shape, spectrum: Vec<f64>) -> Self {
        Self { shape, spectrum, ramp: None, waves: Vec::new() }
    }

    /// Noise-free value of band `b` at pixel `(r, c)` of a `rows x cols` image.
    pub fn value(&self, r: usize, c: usize, rows: usize, cols: usize, b: usize) -> f64 {
        let mut v = self.spectrum[b];
        if let Some(ramp) = &self.ramp {
            let t = (ramp.row_weight * r as f64 / (rows.max(2) - 1) as f64
                + ramp.col_weight * c as f64 / (cols.max(2) - 1) as f64)
                / (ramp.row_weight + ramp.col_weight);
            v += t * (ramp.end[b] - v);
        }
        for w in &self.waves {
            let arg = w.row_cycles * r as f64 / rows as f64 + w.col_cycles * c as f64 / cols as f64;
            v += w.spectrum[b] * (std::f64::consts::TAU * arg + w.phase).sin();
        }
        v
    }
}

/// A single pixel overwritten with its own spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Anomaly {
    pub row: usize,
    pub col: usize,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubeSpec {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub regions: Vec<Region>,
    pub noise_sigma: f64,
    pub anomalies: Vec<Anomaly>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SynthCube {
    pub cube: HyperCube,
    /// Region index plus one for every pixel, row-major.
    pub labels: Vec<u32>,
    pub anomalies: Vec<Anomaly>,
}

/// Builds a cube where each pixel is its region's spectrum plus Gaussian
/// noise; anomaly pixels are then overwritten without noise. Noise is drawn
/// in file order: band, then row, then column.
pub fn synth_cube(spec: &CubeSpec) -> Result<SynthCube> {
    let (rows, cols, bands) = (spec.rows, spec.cols, spec.bands);
    if rows == 0 || cols == 0 || bands == 0 {
        return Err(Error::invalid("cube dimensions must be positive"));
    }
    if !(spec.noise_sigma >= 0.0 && spec.noise_sigma.is_finite()) {
        return Err(Error::invalid("noise_sigma must be non-negative"));
    }
    for (i, reg) in spec.regions.iter().enumerate() {
        let ramp_ok = reg.ramp.as_ref().is_none_or(|r| r.end.len() == bands && r.row_weight + r.col_weight > 0.0);
        let waves_ok = reg.waves.iter().all(|w| w.spectrum.len() == bands);
        if reg.spectrum.len() != bands || !ramp_ok || !waves_ok {
            return Err(Error::invalid(format!("region {i} spectrum does not have {bands} bands")));
        }
    }
    if spec.regions.iter().filter(|r| r.shape == Shape::Rest).count() > 1 {
        return Err(Error::InvalidPartition("more than one Rest region".into()));
    }

    let mut labels = vec![0u32; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let hits: Vec<usize> = (0..spec.regions.len()).filter(|&i| spec.regions[i].shape.contains(r, c)).collect();
            let label = match hits.as_slice() {
                [one] => *one,
                [] => spec
                    .regions
                    .iter()
                    .position(|reg| reg.shape == Shape::Rest)
                    .ok_or_else(|| Error::InvalidPartition(format!("pixel ({r}, {c}) is in no region")))?,
                _ => return Err(Error::InvalidPartition(format!("pixel ({r}, {c}) is in regions {hits:?}"))),
            };
            labels[r * cols + c] = label as u32 + 1;
        }
    }

    for a in &spec.anomalies {
        if a.row >= rows || a.col >= cols || a.spectrum.len() != bands {
            return Err(Error::invalid(format!("anomaly at ({}, {}) is out of range or has the wrong band count", a.row, a.col)));
        }
    }

    let mut rng = SeededRng::new(spec.seed);
    let mut values = Vec::with_capacity(rows * cols * bands);
    for b in 0..bands {
        for r in 0..rows {
            for c in 0..cols {
                let reg = &spec.regions[labels[r * cols + c] as usize - 1];
                let mut v = reg.value(r, c, rows, cols, b);
                if spec.noise_sigma > 0.0 {
                    v += spec.noise_sigma * rng.normal();
                }
                values.push(v as f32);
            }
        }
    }
    for a in &spec.anomalies {
        for b in 0..bands {
            values[b * rows * cols + a.row * cols + a.col] = a.spectrum[b] as f32;
        }
    }
    let cube = HyperCube::new(rows, cols, bands, values)?;
    Ok(SynthCube { cube, labels, anomalies: spec.anomalies.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_halves(noise: f64) -> CubeSpec {
        CubeSpec {
            rows: 4,
            cols: 6,
            bands: 3,
            regions: vec![
                Region::new(Shape::Rect { row: 0, col: 0, rows: 4, cols: 3 }, vec![0.1, 0.2, 0.3]),
                Region::new(Shape::Rest, vec![0.5, 0.25, 0.75]),
            ],
            noise_sigma: noise,
            anomalies: vec![],
            seed: 11,
        }
    }

    #[test]
    fn zero_noise_reproduces_spectra() {
        let s = synth_cube(&two_halves(0.0)).unwrap();
        for r in 0..4 {
            for c in 0..6 {
                let want: Vec<f64> = if c < 3 { vec![0.1, 0.2, 0.3] } else { vec![0.5, 0.25, 0.75] };
                let got = s.cube.hyper_pixel(r, c);
                for (g, w) in got.iter().zip(&want) {
                    assert_eq!(*g, *w as f32 as f64);
                }
            }
        }
    }

    #[test]
    fn overlapping_regions_are_rejected() {
        let mut spec = two_halves(0.0);
        spec.regions[1].shape = Shape::Rect { row: 0, col: 2, rows: 4, cols: 4 };
        assert!(matches!(synth_cube(&spec), Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn uncovered_pixels_are_rejected() {
        let mut spec = two_halves(0.0);
        spec.regions[1].shape = Shape::Rect { row: 0, col: 3, rows: 3, cols: 3 };
        assert!(matches!(synth_cube(&spec), Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn polygon_triangle() {
        let tri = Shape::Polygon(vec![(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)]);
        assert!(tri.contains(0, 0));
        assert!(tri.contains(1, 1));
        assert!(!tri.contains(2, 2));
    }

    #[test]
    fn anomalies_are_listed_and_deterministic() {
        let mut spec = two_halves(0.05);
        spec.anomalies = (0..24).map(|i| Anomaly { row: i % 4, col: i % 6, spectrum: vec![1.0; 3] }).collect();
        let a = synth_cube(&spec).unwrap();
        let b = synth_cube(&spec).unwrap();
        assert_eq!(a.anomalies.len(), 24);
        assert_eq!(a.cube, b.cube);
    }
}
