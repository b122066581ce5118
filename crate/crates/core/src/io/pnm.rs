use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageDecoder};

use crate::error::{Error, Result};
use crate::video::{BinaryMask, FrameSequence};

use super::cube::{default_data_path, load_cube};

use super::matrix::create;

/// Decoded 8-bit PNM image; `channels` is 1 (P5) or 3 (P6).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnmImage {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// Interleaved samples, row-major.
    pub data: Vec<u8>,
}

fn image_err(path: &Path, e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(source) => Error::io(path, source),
        other => Error::Format(format!("{}: {other}", path.display())),
    }
}

/// Reads a binary PGM (P5) or PPM (P6) with maxval 255.
pub fn read_pnm(path: &Path) -> Result<PnmImage> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(|e| Error::io(path, e))?;
    if n < 2 || !(magic == *b"P5" || magic == *b"P6") {
        return Err(Error::BadMagic { path: path.into(), found: String::from_utf8_lossy(&magic[..n]).into_owned() });
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = PnmDecoder::new(BufReader::new(file)).map_err(|e| image_err(path, e))?;
    let (width, height) = decoder.dimensions();
    let channels = match decoder.color_type() {
        image::ColorType::L8 => 1,
        image::ColorType::Rgb8 => 3,
        other => return Err(Error::Format(format!("{}: unsupported sample type {other:?}", path.display()))),
    };
    let mut data = vec![0u8; decoder.total_bytes() as usize];
    decoder.read_image(&mut data).map_err(|e| image_err(path, e))?;
    Ok(PnmImage { width: width as usize, height: height as usize, channels, data })
}

/// Writes a binary PGM (`channels == 1`) or PPM (`channels == 3`).
pub fn write_pnm(img: &PnmImage, path: &Path) -> Result<()> {
    let (subtype, color) = match img.channels {
        1 => (PnmSubtype::Graymap(SampleEncoding::Binary), ExtendedColorType::L8),
        3 => (PnmSubtype::Pixmap(SampleEncoding::Binary), ExtendedColorType::Rgb8),
        c => return Err(Error::invalid(format!("PNM needs 1 or 3 channels, got {c}"))),
    };
    let mut out = BufWriter::new(create(path)?);
    PnmEncoder::new(&mut out)
        .with_subtype(subtype)
        .encode(img.data.as_slice(), img.width as u32, img.height as u32, color)
        .map_err(|e| image_err(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Mask as PGM: 0 for background, 255 for foreground.
pub fn write_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    let data = mask.values().iter().map(|v| v * 255).collect();
    write_pnm(&PnmImage { width: mask.cols(), height: mask.rows(), channels: 1, data }, path)
}

/// Reads a mask PGM; any non-zero sample is foreground.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = read_pnm(path)?;
    if img.channels != 1 {
        return Err(Error::Format(format!("{}: mask must be a PGM", path.display())));
    }
    BinaryMask::from_values(img.height, img.width, img.data.iter().map(|v| u8::from(*v > 0)).collect())
}

/// Writes `mask_0000.pgm`, `mask_0001.pgm`, ... into `dir`.
pub fn write_masks(masks: &[BinaryMask], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    masks
        .iter()
        .enumerate()
        .map(|(t, m)| {
            let p = dir.join(format!("mask_{t:04}.pgm"));
            write_mask(m, &p).map(|_| p)
        })
        .collect()
}

fn frame_number(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem.chars().rev().take_while(char::is_ascii_digit).collect::<Vec<_>>().into_iter().rev().collect();
    digits.parse().ok()
}

/// Reads numbered PGM or PPM frames from a directory, ordered by the number
/// at the end of each file stem.
pub fn read_frames(dir: &Path) -> Result<FrameSequence> {
    let mut files: Vec<(u64, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("pgm" | "ppm")) {
            let n = frame_number(&path)
                .ok_or_else(|| Error::Format(format!("{}: frame file name has no number", path.display())))?;
            files.push((n, path));
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::Format(format!("{}: no PGM/PPM frames", dir.display())));
    }
    let mut frames = Vec::with_capacity(files.len());
    let mut shape = None;
    for (_, path) in &files {
        let img = read_pnm(path)?;
        let s = (img.height, img.width, img.channels);
        if *shape.get_or_insert(s) != s {
            return Err(Error::Format(format!("{}: frame shape differs from the first frame", path.display())));
        }
        let n = img.width * img.height;
        let mut planar = vec![0.0; n * img.channels];
        for i in 0..n {
            for c in 0..img.channels {
                planar[c * n + i] = img.data[i * img.channels + c] as f64;
            }
        }
        frames.push(planar);
    }
    let (rows, cols, channels) = shape.expect("at least one frame");
    FrameSequence::new(rows, cols, channels, frames)
}

/// Video input: a directory of numbered frames, or a cube header whose
/// bands are gray frames.
pub fn read_video(path: &Path) -> Result<FrameSequence> {
    if path.is_dir() {
        return read_frames(path);
    }
    let cube = load_cube(path, &default_data_path(path))?;
    let frames = (0..cube.bands()).map(|b| cube.band(b).iter().map(|&v| v as f64).collect()).collect();
    FrameSequence::gray(cube.rows(), cube.cols(), frames)
}

/// Writes frames as `frame_0000.pgm` (gray) or `.ppm` (RGB), rounding and
/// clamping samples to `0..=255`.
pub fn write_frames(seq: &FrameSequence, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ext = if seq.channels() == 1 { "pgm" } else { "ppm" };
    let n = seq.pixels();
    (0..seq.len())
        .map(|t| {
            let f = seq.frame(t);
            let mut data = vec![0u8; n * seq.channels()];
            for i in 0..n {
                for c in 0..seq.channels() {
                    data[i * seq.channels() + c] = f[c * n + i].round().clamp(0.0, 255.0) as u8;
                }
            }
            let p = dir.join(format!("frame_{t:04}.{ext}"));
            write_pnm(&PnmImage { width: seq.cols(), height: seq.rows(), channels: seq.channels(), data }, &p)?;
            Ok(p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_mask() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pgm");
        write_mask(&BinaryMask::from_fn(1, 1, |_, _| true), &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P5"));
        assert_eq!(*bytes.last().unwrap(), 255);
        let header_end = bytes.len() - 1;
        assert!(bytes[..header_end].iter().all(|b| b.is_ascii()));
        assert_eq!(read_mask(&p).unwrap(), BinaryMask::from_fn(1, 1, |_, _| true));
    }

    #[test]
    fn bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.pgm");
        std::fs::write(&p, b"P2\n1 1\n255\n0\n").unwrap();
        assert!(matches!(read_pnm(&p), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn frames_round_trip_in_numeric_order() {
        let dir = tempfile::tempdir().unwrap();
        let frames: Vec<Vec<f64>> = (0..12).map(|t| (0..12).map(|i| ((t * 13 + i * 5) % 256) as f64).collect()).collect();
        let seq = FrameSequence::new(2, 2, 3, frames).unwrap();
        write_frames(&seq, dir.path()).unwrap();
        assert_eq!(read_frames(dir.path()).unwrap(), seq);
    }
}
