//! Background subtraction for video: static (sliding window) and dynamic
//! (trained) backgrounds, plus a block-parallel wrapper.

mod background;
mod blocks;
mod dbsdb;
mod frames;
mod sbsdb;
mod threshold;

pub use background::{
    capture_dynamic_background, capture_static_background, normalize_255, normalize_range, BackgroundModel, BackgroundParams,
    DynamicBackground, DynamicParams, SlidingKernel,
};
pub use blocks::{parallel_blocks, Block, BlockPartition, InnerAlgorithm};
pub use dbsdb::{dbsdb, dfs_combine, DbsdbOutput, DbsdbParams};
pub use frames::{BinaryMask, FrameSequence};
pub use sbsdb::{sbsdb, subtract_backgrounds, threshold_gray, SbsdbOutput, SbsdbParams, Subtracted};
pub use threshold::{
    argmax, bin_of, derivative, gray_threshold, histogram, rgb_threshold, smooth, GrayThreshold, Mu, RgbThreshold,
    ThresholdParams, BINS,
};
