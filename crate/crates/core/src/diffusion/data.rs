use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// N data points in R^n, one point per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a matrix after checking it is non-empty and finite.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::invalid("data matrix must have at least one row and one column"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % values.nrows(), pos / values.nrows());
            return Err(Error::invalid(format!("non-finite value at ({r}, {c})")));
        }
        Ok(Self { values })
    }

    pub fn from_row_slice(nrows: usize, ncols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::invalid(format!(
                "expected {} values for a {nrows}x{ncols} matrix, got {}",
                nrows * ncols,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(nrows, ncols, data))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::invalid("rows have different lengths"));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(rows.len(), ncols, &flat)
    }

    /// Number of points N.
    pub fn n_points(&self) -> usize {
        self.values.nrows()
    }

    /// Number of coordinates n.
    pub fn n_coords(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }

    /// Row-major copy of the values.
    pub fn to_row_major(&self) -> Vec<f64> {
        let (r, c) = self.values.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            out.extend(self.values.row(i).iter());
        }
        out
    }
}

/// The n coordinate vectors of the data: the transpose, one coordinate per row.
pub fn coordinate_vectors(data: &DataMatrix) -> DataMatrix {
    DataMatrix { values: data.values.transpose() }
}

/// Squared Euclidean distances between all pairs of rows.
///
/// The result is exactly symmetric with a zero diagonal.
pub fn pairwise_sq_dist(data: &DataMatrix) -> DMatrix<f64> {
    let n = data.n_points();
    let dim = data.n_coords();
    let flat = data.to_row_major();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = &flat[i * dim..(i + 1) * dim];
            (i + 1..n)
                .map(|j| {
                    let b = &flat[j * dim..(j + 1) * dim];
                    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
                })
                .collect()
        })
        .collect();
    let mut out = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            out[(i, j)] = d;
            out[(j, i)] = d;
        }
    }
    out
}
