//! Fixed scenes used by the acceptance suite and `datagen --preset`.

use std::f64::consts::TAU;

use crate::error::Result;

use super::cube::{synth_cube, Anomaly, CubeSpec, Ramp, Region, Shape, SynthCube, Wave};
use super::video::{synth_video, SquareSpec, SynthVideo, VideoMode, VideoSpec};

/// Smooth spectrum: `base + height * exp(-(b - center)^2 / (2 width^2))`.
pub fn bump_spectrum(bands: usize, base: f64, center: f64, width: f64, height: f64) -> Vec<f64> {
    (0..bands)
        .map(|b| {
            let z = (b as f64 - center) / width;
            base + height * (-0.5 * z * z).exp()
        })
        .collect()
}

fn wave_spectrum(bands: usize, base: f64, amp: f64, cycles: f64, phase: f64) -> Vec<f64> {
    (0..bands).map(|b| base + amp * (TAU * cycles * b as f64 / bands as f64 + phase).sin()).collect()
}

/// 64x64x20, three materials (triangle, rectangle, remainder), noise 0.05.
pub fn three_materials(seed: u64) -> Result<SynthCube> {
    let bands = 20;
    synth_cube(&CubeSpec {
        rows: 64,
        cols: 64,
        bands,
        regions: vec![
            Region::new(Shape::Polygon(vec![(4.0, 6.0), (40.0, 6.0), (4.0, 38.0)]), bump_spectrum(bands, 0.2, 5.0, 3.0, 0.6)),
            Region::new(Shape::Rect { row: 30, col: 36, rows: 30, cols: 24 }, wave_spectrum(bands, 0.5, 0.3, 1.0, 0.0)),
            Region::new(Shape::Rest, bump_spectrum(bands, 0.3, 14.0, 4.0, 0.5)),
        ],
        noise_sigma: 0.05,
        anomalies: Vec::new(),
        seed,
    })
}

const LIFT: f64 = 0.06;
const WAVE: f64 = 0.04;
const NOISE: f64 = 0.001;

/// 100x100x20 smooth terrain: a gradient brightening towards the bottom
/// right in every band plus five slow plane waves with their own spectral
/// signatures, and 24 single-pixel anomalies on a 6x4 grid. Each anomaly is
/// the local background raised in one band group and lowered in another.
pub fn planted_anomalies(seed: u64) -> Result<SynthCube> {
    let (rows, cols, bands) = (100, 100, 20);
    let mut region = Region::new(Shape::Rest, bump_spectrum(bands, 0.3, 6.0, 4.0, 0.3));
    let end = region.spectrum.iter().zip(bump_spectrum(bands, 0.15, 13.0, 4.0, 0.1)).map(|(a, b)| a + b).collect();
    region.ramp = Some(Ramp { end, row_weight: 1.0, col_weight: 1.0 });
    let waves = [(2.0, 9.0, 0.6, 0.3, 0.0), (17.0, 6.0, 1.1, -0.4, 1.0), (9.0, 2.5, 0.2, 1.0, 2.0), (5.0, 3.0, -0.8, 0.7, 3.0), (14.0, 2.0, 0.9, 0.9, 4.0)];
    region.waves = waves
        .iter()
        .map(|&(center, width, row_cycles, col_cycles, phase)| Wave {
            spectrum: bump_spectrum(bands, 0.0, center, width, WAVE),
            row_cycles,
            col_cycles,
            phase,
        })
        .collect();
    let mut anomalies = Vec::new();
    for i in 0..4 {
        for j in 0..6 {
            let (row, col) = (12 + 25 * i, 9 + 16 * j);
            // Stay inside the background's range so per-band scaling is unaffected.
            let sign = if row + col < 100 { 1.0 } else { -1.0 };
            let spectrum = (0..bands)
                .map(|b| {
                    let lift = if (3..6).contains(&b) { LIFT } else if (14..17).contains(&b) { -LIFT } else { 0.0 };
                    region.value(row, col, rows, cols, b) + sign * lift
                })
                .collect();
            anomalies.push(Anomaly { row, col, spectrum });
        }
    }
    synth_cube(&CubeSpec { rows, cols, bands, regions: vec![region], noise_sigma: NOISE, anomalies, seed })
}

/// 64x64x20 scene with a background material, a second material, and a
/// square made of two close sub-materials. Labels: 1 and 2 are the
/// sub-materials, 3 the second material, 4 the background.
pub fn nested_materials(seed: u64) -> Result<SynthCube> {
    let bands = 20;
    let sub = bump_spectrum(bands, 0.5, 10.0, 3.0, 0.3);
    let sub2: Vec<f64> = sub.iter().enumerate().map(|(b, v)| v + if b < 10 { 0.06 } else { -0.06 }).collect();
    synth_cube(&CubeSpec {
        rows: 64,
        cols: 64,
        bands,
        regions: vec![
            Region::new(Shape::Rect { row: 8, col: 8, rows: 24, cols: 12 }, sub),
            Region::new(Shape::Rect { row: 8, col: 20, rows: 24, cols: 12 }, sub2),
            Region::new(Shape::Rect { row: 40, col: 30, rows: 18, cols: 28 }, wave_spectrum(bands, 0.4, 0.3, 1.5, 1.0)),
            Region::new(Shape::Rest, bump_spectrum(bands, 0.1, 3.0, 2.0, 0.2)),
        ],
        noise_sigma: 0.01,
        anomalies: Vec::new(),
        seed,
    })
}

const SQUARE: SquareSpec = SquareSpec { size: 8, start: (10.0, 6.0), velocity: (5.3, 6.9), intensity: [230.0, 210.0, 190.0] };

/// 60 gray 64x64 frames, static background, 8x8 square moving fast enough
/// to leave a 5-frame window's background nearly untouched.
pub fn static_scene(seed: u64) -> Result<SynthVideo> {
    synth_video(&VideoSpec {
        rows: 64,
        cols: 64,
        frames: 60,
        first_frame: 0,
        mode: VideoMode::Static,
        square: SQUARE,
        noise_sigma: 1.0,
        color: false,
        seed,
    })
}

pub const FLICKER: VideoMode = VideoMode::Flicker { amplitude: 8.0, period: 7.0 };

/// Training clip (40 RGB frames, no square) and test clip (the next 60
/// frames with the square) of a flickering background. Both clips share
/// the per-pixel flicker pattern because it is drawn from the same seed.
pub fn flicker_scene(seed: u64) -> Result<(SynthVideo, SynthVideo)> {
    let spec = |frames, first_frame, size| VideoSpec {
        rows: 64,
        cols: 64,
        frames,
        first_frame,
        mode: FLICKER,
        square: SquareSpec { size, ..SQUARE },
        noise_sigma: 0.5,
        color: true,
        seed,
    };
    Ok((synth_video(&spec(40, 0, 0))?, synth_video(&spec(60, 40, 8))?))
}
