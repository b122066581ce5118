use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::reduce::ReducedCube;

/// Integer colours in `1..=levels`, pixel-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedCube {
    pub rows: usize,
    pub cols: usize,
    pub colors: usize,
    pub levels: u16,
    pub values: Vec<u16>,
    pub support: Option<Vec<bool>>,
}

impl QuantizedCube {
    pub fn color(&self, pixel: usize) -> &[u16] {
        &self.values[pixel * self.colors..(pixel + 1) * self.colors]
    }

    pub fn in_support(&self, pixel: usize) -> bool {
        self.support.as_ref().is_none_or(|s| s[pixel])
    }
}

/// `q = floor(levels * g)` clamped into `1..=levels`.
pub fn quantize(ghat: &ReducedCube, levels: usize) -> Result<QuantizedCube> {
    if !(2..=u16::MAX as usize).contains(&levels) {
        return Err(Error::invalid(format!("levels must be in 2..=65535, got {levels}")));
    }
    let l = levels as f64;
    let values = ghat
        .values
        .iter()
        .map(|&g| (l * g).floor().clamp(1.0, l) as u16)
        .collect();
    Ok(QuantizedCube {
        rows: ghat.rows,
        cols: ghat.cols,
        colors: ghat.colors,
        levels: levels as u16,
        values,
        support: ghat.support.clone(),
    })
}

/// Sparse counts of colour tuples, keyed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorHistogram {
    pub colors: usize,
    pub counts: BTreeMap<Vec<u16>, u64>,
}

impl ColorHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Counts the colour tuple of every supported pixel.
pub fn build_histogram(q: &QuantizedCube) -> ColorHistogram {
    let mut counts = BTreeMap::new();
    for p in 0..q.rows * q.cols {
        if q.in_support(p) {
            *counts.entry(q.color(p).to_vec()).or_insert(0) += 1;
        }
    }
    ColorHistogram { colors: q.colors, counts }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Peak {
    pub color: Vec<u16>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub theta: usize,
    pub xi: u16,
    /// Fewer than `theta` peaks were found.
    pub shortfall: bool,
}

fn linf(a: &[u16], b: &[u16]) -> u16 {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}

/// Repeatedly takes the most frequent colour and clears its L-infinity
/// `xi`-neighbourhood, until `theta` peaks are found or the histogram is
/// empty. Equal counts go to the lexicographically smallest tuple.
pub fn peaks_finder(f: &ColorHistogram, theta: usize, xi: u16) -> Result<PeakSet> {
    if theta == 0 {
        return Err(Error::invalid("theta must be at least 1"));
    }
    let mut work: Vec<(&Vec<u16>, u64)> = f.counts.iter().map(|(k, v)| (k, *v)).collect();
    let mut peaks = Vec::new();
    while peaks.len() < theta {
        let mut best: Option<usize> = None;
        for (i, &(_, c)) in work.iter().enumerate() {
            if c > 0 && best.is_none_or(|b| c > work[b].1) {
                best = Some(i);
            }
        }
        let Some(b) = best else { break };
        let color = work[b].0.clone();
        peaks.push(Peak { color: color.clone(), count: work[b].1 });
        for entry in work.iter_mut() {
            if linf(entry.0, &color) <= xi {
                entry.1 = 0;
            }
        }
    }
    let shortfall = peaks.len() < theta;
    Ok(PeakSet { peaks, theta, xi, shortfall })
}

/// Fixed 16-colour palette cycled by label.
pub const PALETTE: [[u8; 3]; 16] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [170, 255, 195],
];

/// Colour of a label; label 0 (outside) is black.
pub fn palette_color(label: u32) -> [u8; 3] {
    if label == 0 {
        [0, 0, 0]
    } else {
        PALETTE[(label as usize - 1) % PALETTE.len()]
    }
}

/// Per-pixel labels `1..=|peaks|`, row-major; 0 marks pixels outside the
/// segmented subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationMap {
    pub rows: usize,
    pub cols: usize,
    pub labels: Vec<u32>,
    pub peaks: PeakSet,
}

impl SegmentationMap {
    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.cols + col]
    }

    /// Pixel count of each label `1..=|peaks|`.
    pub fn label_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.peaks.peaks.len()];
        for &l in &self.labels {
            if l > 0 {
                counts[l as usize - 1] += 1;
            }
        }
        counts
    }
}

/// Labels each supported pixel with its Euclidean-nearest peak; ties go to
/// the lower peak index.
pub fn segment_by_colors(q: &QuantizedCube, peaks: &PeakSet) -> Result<SegmentationMap> {
    if peaks.peaks.is_empty() {
        return Err(Error::invalid("no peaks to segment by"));
    }
    if peaks.peaks.iter().any(|p| p.color.len() != q.colors) {
        return Err(Error::invalid("peak colour length differs from the cube"));
    }
    let labels = (0..q.rows * q.cols)
        .map(|p| {
            if !q.in_support(p) {
                return 0;
            }
            let c = q.color(p);
            let mut best = (u64::MAX, 0u32);
            for (k, peak) in peaks.peaks.iter().enumerate() {
                let d: u64 = c.iter().zip(&peak.color).map(|(a, b)| (a.abs_diff(*b) as u64).pow(2)).sum();
                if d < best.0 {
                    best = (d, k as u32 + 1);
                }
            }
            best.1
        })
        .collect();
    Ok(SegmentationMap { rows: q.rows, cols: q.cols, labels, peaks: peaks.clone() })
}
