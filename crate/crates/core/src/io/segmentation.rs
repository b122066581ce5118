use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hyperspectral::{palette_color, SegmentationMap, SubPixelHit, PALETTE};

use super::matrix::create;
use super::pnm::{read_pnm, write_pnm, PnmImage};

/// One row of the segmentation table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentRow {
    pub label: u32,
    pub count: u64,
    pub peak_color: Vec<u16>,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Format(format!("{}: {e}", path.display()))
}

/// Writes the label image as PPM (palette colours, black outside) and the
/// table `label,count,peak_color_tuple`, where the tuple is `;`-separated.
pub fn write_segmentation(seg: &SegmentationMap, ppm_path: &Path, csv_path: &Path) -> Result<()> {
    let data = seg.labels.iter().flat_map(|&l| palette_color(l)).collect();
    write_pnm(&PnmImage { width: seg.cols, height: seg.rows, channels: 3, data }, ppm_path)?;

    let mut w = csv::Writer::from_writer(create(csv_path)?);
    w.write_record(["label", "count", "peak_color_tuple"]).map_err(|e| csv_err(csv_path, e))?;
    for (k, (peak, count)) in seg.peaks.peaks.iter().zip(seg.label_counts()).enumerate() {
        let tuple: Vec<String> = peak.color.iter().map(u16::to_string).collect();
        w.write_record([(k + 1).to_string(), count.to_string(), tuple.join(";")]).map_err(|e| csv_err(csv_path, e))?;
    }
    w.flush().map_err(|e| Error::io(csv_path, e))
}

/// Reads the table written by [`write_segmentation`].
pub fn read_segment_table(csv_path: &Path) -> Result<Vec<SegmentRow>> {
    let file = File::open(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let bad = |what: &str| Error::Format(format!("{}: bad {what}", csv_path.display()));
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| csv_err(csv_path, e))?;
            if rec.len() != 3 {
                return Err(bad("row length"));
            }
            let peak_color = rec[2]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| bad("colour tuple")))
                .collect::<Result<_>>()?;
            Ok(SegmentRow {
                label: rec[0].parse().map_err(|_| bad("label"))?,
                count: rec[1].parse().map_err(|_| bad("count"))?,
                peak_color,
            })
        })
        .collect()
}

/// Recovers labels from a segmentation PPM. Only unambiguous for at most
/// 16 labels; black pixels read as label 0.
pub fn read_segmentation_labels(ppm_path: &Path) -> Result<(usize, usize, Vec<u32>)> {
    let img = read_pnm(ppm_path)?;
    if img.channels != 3 {
        return Err(Error::Format(format!("{}: segmentation must be a PPM", ppm_path.display())));
    }
    let labels = img
        .data
        .chunks(3)
        .map(|px| {
            if px == [0, 0, 0] {
                return Ok(0);
            }
            PALETTE
                .iter()
                .position(|c| c == px)
                .map(|i| i as u32 + 1)
                .ok_or_else(|| Error::Format(format!("{}: colour {px:?} not in palette", ppm_path.display())))
        })
        .collect::<Result<_>>()?;
    Ok((img.height, img.width, labels))
}

/// Writes a label image as CSV integers, one image row per line, no header.
pub fn write_label_grid(labels: &[u32], cols: usize, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    for row in labels.chunks(cols.max(1)) {
        w.write_record(row.iter().map(u32::to_string)).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes sub-pixel detections as `row,col,layers_isolated`.
pub fn write_subpixel_csv(hits: &[SubPixelHit], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["row", "col", "layers_isolated"]).map_err(|e| csv_err(path, e))?;
    for h in hits {
        w.write_record([h.row.to_string(), h.col.to_string(), h.layers_isolated.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperspectral::{Peak, PeakSet};

    #[test]
    fn counts_survive_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (ppm, csv) = (dir.path().join("s.ppm"), dir.path().join("s.csv"));
        let peaks = PeakSet {
            peaks: vec![Peak { color: vec![3, 4], count: 3 }, Peak { color: vec![9, 1], count: 2 }],
            theta: 2,
            xi: 1,
            shortfall: false,
        };
        let seg = SegmentationMap { rows: 2, cols: 3, labels: vec![1, 1, 2, 0, 1, 2], peaks };
        write_segmentation(&seg, &ppm, &csv).unwrap();
        let table = read_segment_table(&csv).unwrap();
        let (_, _, labels) = read_segmentation_labels(&ppm).unwrap();
        assert_eq!(labels, seg.labels);
        for row in &table {
            let n = labels.iter().filter(|l| **l == row.label).count() as u64;
            assert_eq!(n, row.count);
        }
        assert_eq!(table[1].peak_color, vec![9, 1]);
    }
}
