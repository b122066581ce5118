//! Readers and writers for cubes, matrices, frames, masks and segmentations.

mod cube;
mod matrix;
mod pnm;
mod segmentation;

pub use cube::{default_data_path, load_cube, read_header, save_cube, CubeHeader};
pub use matrix::{format_f64, read_matrix_csv, write_epsilon_scan, write_matrix_csv};
pub use pnm::{read_frames, read_mask, read_pnm, read_video, write_frames, write_mask, write_masks, write_pnm, PnmImage};
pub use segmentation::{
    read_segment_table, read_segmentation_labels, write_label_grid, write_segmentation, write_subpixel_csv, SegmentRow,
};
