//! Hyper-spectral segmentation: reduction, histogram-peak clustering,
//! drill-down and sub-pixel detection.

mod cube;
mod phase2;
mod reduce;
mod subpixel;
mod wwg;

pub use cube::{wav_image, HyperCube};
pub use phase2::{
    build_histogram, palette_color, peaks_finder, quantize, segment_by_colors, ColorHistogram, Peak, PeakSet,
    QuantizedCube, SegmentationMap, PALETTE,
};
pub use reduce::{normalize_layers, reduce_cube, ReduceParams, ReducedCube};
pub use subpixel::{detect_subpixel, SubPixelHit, SubPixelParams};
pub use wwg::{drill_down, segment_reduced, wwg, WwgParams, WwgResult};
