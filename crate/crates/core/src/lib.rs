//! Diffusion maps and diffusion bases for dimensionality reduction, with
//! hyper-spectral segmentation and video background subtraction built on top.

pub mod cli;
pub mod datagen;
pub mod diffusion;
pub mod error;
pub mod hyperspectral;
pub mod io;
pub mod video;

pub use error::{Error, Result};
