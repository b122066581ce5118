use crate::error::{Error, Result};

use super::cube::HyperCube;
use super::phase2::{build_histogram, peaks_finder, quantize, segment_by_colors, ColorHistogram, PeakSet, QuantizedCube, SegmentationMap};
use super::reduce::{normalize_layers, reduce_pixels, ReduceParams, ReducedCube};

/// Settings of the full segmentation pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WwgParams {
    pub reduce: ReduceParams,
    pub theta: usize,
    pub xi: u16,
    pub levels: usize,
    /// Discard the first diffusion-bases colour before quantization.
    pub drop_first_color: bool,
}

impl Default for WwgParams {
    fn default() -> Self {
        Self { reduce: ReduceParams::default(), theta: 8, xi: 7, levels: 32, drop_first_color: false }
    }
}

/// Every intermediate artifact of a segmentation run.
#[derive(Debug, Clone)]
pub struct WwgResult {
    pub reduced: ReducedCube,
    pub normalized: ReducedCube,
    pub quantized: QuantizedCube,
    pub histogram: ColorHistogram,
    pub peaks: PeakSet,
    pub segmentation: SegmentationMap,
}

/// Reduction followed by histogram-peak colour clustering.
pub fn wwg(cube: &HyperCube, params: &WwgParams) -> Result<WwgResult> {
    let all: Vec<usize> = (0..cube.pixels()).collect();
    run(cube, &all, params)
}

/// Second phase alone, starting from reduced colours.
pub fn segment_reduced(reduced: ReducedCube, params: &WwgParams) -> Result<WwgResult> {
    if params.theta == 0 {
        return Err(Error::invalid("theta must be at least 1"));
    }
    let used = if params.drop_first_color { reduced.drop_first()? } else { reduced.clone() };
    let normalized = normalize_layers(&used);
    let quantized = quantize(&normalized, params.levels)?;
    let histogram = build_histogram(&quantized);
    let peaks = peaks_finder(&histogram, params.theta, params.xi)?;
    let segmentation = segment_by_colors(&quantized, &peaks)?;
    Ok(WwgResult { reduced, normalized, quantized, histogram, peaks, segmentation })
}

fn run(cube: &HyperCube, select: &[usize], params: &WwgParams) -> Result<WwgResult> {
    if params.levels < 2 {
        return Err(Error::invalid(format!("levels must be at least 2, got {}", params.levels)));
    }
    let reduced = reduce_pixels(cube, select, &params.reduce)?;
    segment_reduced(reduced, params)
}

/// Re-segments the pixels carrying label `chi` on their own; every other
/// pixel gets label 0 in the result.
pub fn drill_down(cube: &HyperCube, seg: &SegmentationMap, chi: u32, params: &WwgParams) -> Result<WwgResult> {
    if (seg.rows, seg.cols) != (cube.rows(), cube.cols()) {
        return Err(Error::invalid("segmentation and cube shapes differ"));
    }
    let select: Vec<usize> = (0..seg.labels.len()).filter(|&p| seg.labels[p] == chi).collect();
    match select.len() {
        0 => Err(Error::EmptySelection(chi)),
        1 => Err(Error::TooFewPixels { label: chi, count: 1 }),
        _ => run(cube, &select, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::EpsilonChoice;

    #[test]
    fn one_material_is_one_segment() {
        let cube = HyperCube::from_fn(6, 6, 4, |_, _, b| 0.1 * b as f32 + 0.3).unwrap();
        let p = WwgParams { reduce: ReduceParams { epsilon: EpsilonChoice::Fixed(1.0), ..Default::default() }, ..Default::default() };
        let r = wwg(&cube, &p).unwrap();
        assert!(r.segmentation.labels.iter().all(|l| *l == 1));
    }

    #[test]
    fn missing_label_is_empty_selection() {
        let cube = HyperCube::from_fn(2, 2, 2, |r, c, b| (r + c + b) as f32).unwrap();
        let seg = SegmentationMap {
            rows: 2,
            cols: 2,
            labels: vec![1, 1, 1, 2],
            peaks: PeakSet { peaks: vec![], theta: 2, xi: 0, shortfall: true },
        };
        let p = WwgParams::default();
        assert!(matches!(drill_down(&cube, &seg, 3, &p), Err(Error::EmptySelection(3))));
        assert!(matches!(drill_down(&cube, &seg, 2, &p), Err(Error::TooFewPixels { .. })));
    }

    #[test]
    fn levels_one_is_rejected() {
        let cube = HyperCube::from_fn(2, 2, 2, |r, c, b| (r + c + b) as f32).unwrap();
        let p = WwgParams { levels: 1, ..Default::default() };
        assert!(wwg(&cube, &p).is_err());
    }
}
