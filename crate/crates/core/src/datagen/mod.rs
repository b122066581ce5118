//! Seeded synthetic data with ground truth.

mod cube;
mod manifold;
pub mod presets;
mod rng;
mod video;

pub use cube::{synth_cube, Anomaly, CubeSpec, Ramp, Region, Shape, SynthCube, Wave};
pub use manifold::synth_manifold;
pub use rng::SeededRng;
pub use video::{synth_video, SquareSpec, SynthVideo, VideoMode, VideoSpec, PATCH};
