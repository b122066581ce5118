use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperspectral::HyperCube;

/// JSON sidecar describing a raw cube file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeHeader {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub dtype: String,
    pub order: String,
}

impl CubeHeader {
    pub fn for_cube(cube: &HyperCube) -> Self {
        Self { rows: cube.rows(), cols: cube.cols(), bands: cube.bands(), dtype: "f32".into(), order: "bsq".into() }
    }

    /// Expected payload size in bytes.
    pub fn byte_len(&self) -> Result<u64> {
        if self.dtype != "f32" {
            return Err(Error::HeaderMismatch(format!("unsupported dtype {:?}", self.dtype)));
        }
        if self.order != "bsq" {
            return Err(Error::HeaderMismatch(format!("unsupported order {:?}", self.order)));
        }
        if self.rows == 0 || self.cols == 0 || self.bands == 0 {
            return Err(Error::HeaderMismatch("dimensions must be positive".into()));
        }
        (self.rows as u64)
            .checked_mul(self.cols as u64)
            .and_then(|v| v.checked_mul(self.bands as u64))
            .and_then(|v| v.checked_mul(4))
            .filter(|v| usize::try_from(*v).is_ok())
            .ok_or_else(|| Error::HeaderMismatch(format!("{}x{}x{} overflows", self.rows, self.cols, self.bands)))
    }
}

pub fn read_header(path: &Path) -> Result<CubeHeader> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let start = text.trim_start();
    if !start.starts_with('{') {
        return Err(Error::BadMagic { path: path.into(), found: start.chars().take(8).collect() });
    }
    serde_json::from_str(&text).map_err(|e| Error::HeaderMismatch(format!("{}: {e}", path.display())))
}

/// Loads a little-endian `f32` band-sequential cube.
pub fn load_cube(header_path: &Path, data_path: &Path) -> Result<HyperCube> {
    let header = read_header(header_path)?;
    let expected = header.byte_len()?;
    let bytes = std::fs::read(data_path).map_err(|e| Error::io(data_path, e))?;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch { expected, actual: bytes.len() as u64 });
    }
    let values = bytes.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
    HyperCube::new(header.rows, header.cols, header.bands, values)
        .map_err(|e| Error::Format(format!("{}: {e}", data_path.display())))
}

pub fn save_cube(cube: &HyperCube, header_path: &Path, data_path: &Path) -> Result<()> {
    let header = serde_json::to_string(&CubeHeader::for_cube(cube)).expect("header serializes");
    std::fs::write(header_path, header + "\n").map_err(|e| Error::io(header_path, e))?;
    let bytes: Vec<u8> = cube.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    std::fs::write(data_path, bytes).map_err(|e| Error::io(data_path, e))
}

/// Data file next to a header: same stem, extension `bsq`.
pub fn default_data_path(header_path: &Path) -> std::path::PathBuf {
    header_path.with_extension("bsq")
}
