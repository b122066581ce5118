use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::data::{pairwise_sq_dist, DataMatrix};
use super::spectral::spectral_decompose;

/// Eigenvalues below `floor * |mu_1|` are not used for extension.
pub const DEFAULT_FLOOR: f64 = 1e-10;

/// Eigen-decomposition of the extension kernel `exp(-|x - y|^2 / sigma^2)`
/// on a training set, used to extend functions to new points.
#[derive(Debug, Clone)]
pub struct NystromModel {
    training: DataMatrix,
    sigma: f64,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    floor: f64,
}

impl NystromModel {
    pub fn train(training: DataMatrix, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        let s2 = sigma * sigma;
        let k = pairwise_sq_dist(&training).map(|d| (-d / s2).exp());
        let eig = spectral_decompose(&k)?;
        Ok(Self { training, sigma, eigenvalues: eig.values, eigenvectors: eig.vectors, floor: DEFAULT_FLOOR })
    }

    /// Sets the relative eigenvalue floor.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors `phi_l` on the training set, as columns.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    fn floor_value(&self) -> f64 {
        self.floor * self.eigenvalues[0].abs()
    }

    /// Number of leading eigenpairs above the floor.
    pub fn usable(&self) -> usize {
        let floor = self.floor_value();
        self.eigenvalues.iter().take_while(|m| m.abs() >= floor).count()
    }

    fn kernel_row(&self, x: &[f64]) -> Result<DVector<f64>> {
        let dim = self.training.n_coords();
        if x.len() != dim {
            return Err(Error::invalid(format!("point has {} coordinates, training set has {dim}", x.len())));
        }
        let s2 = self.sigma * self.sigma;
        let t = self.training.values();
        Ok(DVector::from_iterator(
            t.nrows(),
            (0..t.nrows()).map(|i| {
                let d: f64 = (0..dim).map(|k| (t[(i, k)] - x[k]).powi(2)).sum();
                (-d / s2).exp()
            }),
        ))
    }

    /// `phi_l(x) = (1 / mu_l) sum_y k(x, y) phi_l(y)`.
    pub fn extend_eigenfunction(&self, l: usize, x: &[f64]) -> Result<f64> {
        if l >= self.eigenvalues.len() {
            return Err(Error::invalid(format!("eigenfunction index {l} out of range")));
        }
        let mu = self.eigenvalues[l];
        let floor = self.floor_value();
        if mu.abs() < floor {
            return Err(Error::SmallEigenvalue { index: l, value: mu, floor });
        }
        Ok(self.kernel_row(x)?.dot(&self.eigenvectors.column(l)) / mu)
    }

    /// Extends the training-set values `f` to `x` through the usable eigenpairs.
    pub fn extend(&self, f: &[f64], x: &[f64]) -> Result<f64> {
        Ok(self.extend_columns(&DMatrix::from_column_slice(f.len(), 1, f), x)?[0])
    }

    /// Extends each column of `f` to `x`.
    pub fn extend_columns(&self, f: &DMatrix<f64>, x: &[f64]) -> Result<DVector<f64>> {
        if f.nrows() != self.training.n_points() {
            return Err(Error::invalid(format!(
                "function has {} values, training set has {} points",
                f.nrows(),
                self.training.n_points()
            )));
        }
        let k = self.kernel_row(x)?;
        let mut out = DVector::zeros(f.ncols());
        for l in 0..self.usable() {
            let phi = self.eigenvectors.column(l);
            let ext = k.dot(&phi) / self.eigenvalues[l];
            let coeffs = f.transpose() * phi;
            out.axpy(ext, &coeffs, 1.0);
        }
        Ok(out)
    }
}

/// Extends `f` from a training set to `x` in one call.
pub fn nystrom_extend(training: &DataMatrix, sigma: f64, f: &[f64], x: &[f64]) -> Result<f64> {
    NystromModel::train(training.clone(), sigma)?.extend(f, x)
}
