use rayon::prelude::*;

use crate::error::{Error, Result};

use super::dbsdb::{dbsdb, DbsdbParams};
use super::frames::{BinaryMask, FrameSequence};
use super::sbsdb::{sbsdb, SbsdbParams};

/// Grid of overlapping blocks. Tiles split the frame evenly; each block
/// extends its tile by half the overlap on every interior side, so
/// neighbouring blocks share `overlap` rows or columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPartition {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub overlap: usize,
}

impl Default for BlockPartition {
    fn default() -> Self {
        Self { grid_rows: 1, grid_cols: 1, overlap: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub row: usize,
    pub col: usize,
    pub rows: usize,
    pub cols: usize,
}

fn spans(len: usize, parts: usize, overlap: usize) -> Vec<(usize, usize)> {
    (0..parts)
        .map(|k| {
            let start = k * len / parts;
            let end = (k + 1) * len / parts;
            let lo = if k == 0 { start } else { start.saturating_sub(overlap / 2) };
            let hi = if k + 1 == parts { end } else { (end + overlap - overlap / 2).min(len) };
            (lo, hi - lo)
        })
        .collect()
}

impl BlockPartition {
    /// Blocks in row-major grid order.
    pub fn blocks(&self, rows: usize, cols: usize) -> Result<Vec<Block>> {
        if self.grid_rows == 0 || self.grid_cols == 0 {
            return Err(Error::invalid("block grid must be at least 1x1"));
        }
        let tile_r = rows / self.grid_rows;
        let tile_c = cols / self.grid_cols;
        let need = |grid: usize| if grid > 1 { self.overlap.max(2) } else { 1 };
        if tile_r < need(self.grid_rows) || tile_c < need(self.grid_cols) {
            return Err(Error::BlockTooSmall { rows: tile_r, cols: tile_c, overlap: self.overlap });
        }
        let rs = spans(rows, self.grid_rows, self.overlap);
        let cs = spans(cols, self.grid_cols, self.overlap);
        Ok(rs
            .iter()
            .flat_map(|&(row, nr)| cs.iter().map(move |&(col, nc)| Block { row, col, rows: nr, cols: nc }))
            .collect())
    }
}

/// Algorithm run inside each block.
#[derive(Debug, Clone, Copy)]
pub enum InnerAlgorithm<'a> {
    Sbsdb(SbsdbParams),
    Dbsdb { bgd: &'a FrameSequence, params: DbsdbParams },
}

/// Runs `inner` on every block independently and ORs the block masks back
/// into full frames.
pub fn parallel_blocks(seq: &FrameSequence, partition: &BlockPartition, inner: InnerAlgorithm<'_>) -> Result<Vec<BinaryMask>> {
    let (rows, cols) = (seq.rows(), seq.cols());
    let blocks = partition.blocks(rows, cols)?;
    let results: Vec<Vec<BinaryMask>> = blocks
        .par_iter()
        .map(|b| {
            let part = seq.crop(b.row, b.col, b.rows, b.cols);
            match inner {
                InnerAlgorithm::Sbsdb(p) => Ok(sbsdb(&part, &p)?.masks),
                InnerAlgorithm::Dbsdb { bgd, params } => {
                    let train = bgd.crop(b.row, b.col, b.rows, b.cols);
                    Ok(dbsdb(&part, &train, &params)?.masks)
                }
            }
        })
        .collect::<Result<_>>()?;
    let mut out = vec![BinaryMask::zeros(rows, cols); seq.len()];
    for (b, masks) in blocks.iter().zip(&results) {
        for (full, m) in out.iter_mut().zip(masks) {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    if m.get(r, c) {
                        full.set(b.row + r, b.col + c, true);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_overlap() {
        let p = BlockPartition { grid_rows: 2, grid_cols: 2, overlap: 20 };
        let b = p.blocks(64, 64).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!((b[0].row, b[0].rows), (0, 42));
        assert_eq!((b[3].row, b[3].rows), (22, 42));
        // Shared rows between vertically adjacent blocks.
        assert_eq!(b[0].row + b[0].rows - b[2].row, 20);
    }

    #[test]
    fn single_block_is_whole_frame() {
        let b = BlockPartition::default().blocks(10, 7).unwrap();
        assert_eq!(b, vec![Block { row: 0, col: 0, rows: 10, cols: 7 }]);
    }

    #[test]
    fn tiny_tiles_are_rejected() {
        let p = BlockPartition { grid_rows: 4, grid_cols: 1, overlap: 20 };
        assert!(matches!(p.blocks(64, 64), Err(Error::BlockTooSmall { .. })));
    }
}
