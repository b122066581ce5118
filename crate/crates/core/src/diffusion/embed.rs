use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::data::{coordinate_vectors, pairwise_sq_dist, DataMatrix};
use super::kernel::{gaussian_affinity, KernelParams};
use super::spectral::SpectralModel;

/// Diffusion time and truncation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub time: u32,
    pub delta: f64,
    /// Fixed number of eigenpairs; overrides the `delta` search when set.
    pub eta: Option<usize>,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { time: 1, delta: 1e-3, eta: None }
    }
}

impl Truncation {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid(format!("delta must be positive, got {}", self.delta)));
        }
        if self.eta == Some(0) {
            return Err(Error::invalid("eta must be at least 1"));
        }
        Ok(())
    }

    fn resolve(&self, model: &SpectralModel) -> (usize, bool) {
        match self.eta {
            Some(eta) => (eta.min(model.len()), false),
            None => {
                let c = model.eta_for_delta(self.time, self.delta);
                (c.eta, c.saturated)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmVariant {
    /// Eigenvectors of `P` computed directly.
    Direct,
    /// Eigenvectors of `P` recovered from its symmetric conjugate.
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbVariant {
    /// Project onto the right eigenvectors `nu_k` of `P`.
    Plain,
    /// Project onto the orthonormal eigenvectors `theta_k` of the conjugate.
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    Dm,
    Mdm,
    Db,
    Mdb,
}

impl EmbeddingKind {
    pub fn label(&self) -> &'static str {
        match self {
            EmbeddingKind::Dm => "DM",
            EmbeddingKind::Mdm => "MDM",
            EmbeddingKind::Db => "DB",
            EmbeddingKind::Mdb => "MDB",
        }
    }
}

/// Low-dimensional coordinates of the data points, one point per row.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub kind: EmbeddingKind,
    pub coords: DMatrix<f64>,
    /// Full spectrum of the operator, sorted by decreasing magnitude.
    pub eigenvalues: DVector<f64>,
    pub eta: usize,
    /// True when `eta` hit the matrix size without meeting `delta`.
    pub eta_saturated: bool,
    pub epsilon: f64,
    pub time: u32,
}

/// Diffusion-maps embedding `x_i -> (lambda_k^t nu_k(i))_{k=2..eta}`.
pub fn dm_embed(data: &DataMatrix, kernel: KernelParams, trunc: Truncation, variant: DmVariant) -> Result<Embedding> {
    trunc.validate()?;
    let w = gaussian_affinity(&pairwise_sq_dist(data), kernel);
    let model = match variant {
        DmVariant::Direct => SpectralModel::from_affinity_direct(w)?,
        DmVariant::Modified => SpectralModel::from_affinity(w)?,
    };
    Ok(dm_embed_model(&model, trunc, kernel.epsilon()))
}

/// Diffusion-maps embedding of an already decomposed operator.
pub fn dm_embed_model(model: &SpectralModel, trunc: Truncation, epsilon: f64) -> Embedding {
    let (eta, eta_saturated) = trunc.resolve(model);
    let n = model.len();
    let cols = eta.saturating_sub(1);
    let mut coords = DMatrix::zeros(n, cols);
    for k in 1..eta {
        let lt = model.eigenvalues[k].powi(trunc.time as i32);
        coords.set_column(k - 1, &(model.nu.column(k) * lt));
    }
    let kind = match model.route {
        super::spectral::Route::Direct => EmbeddingKind::Dm,
        super::spectral::Route::Conjugate => EmbeddingKind::Mdm,
    };
    Embedding { kind, coords, eigenvalues: model.eigenvalues.clone(), eta, eta_saturated, epsilon, time: trunc.time }
}

/// Spectral model of the coordinate vectors, the operator behind diffusion bases.
pub fn coordinate_model(data: &DataMatrix, kernel: KernelParams) -> Result<SpectralModel> {
    let gamma = coordinate_vectors(data);
    SpectralModel::from_affinity(gaussian_affinity(&pairwise_sq_dist(&gamma), kernel))
}

/// The first `eta` basis vectors of `R^n`, as columns.
pub fn db_basis(model: &SpectralModel, eta: usize, variant: DbVariant) -> DMatrix<f64> {
    let src = match variant {
        DbVariant::Plain => &model.nu,
        DbVariant::Modified => &model.theta,
    };
    src.columns(0, eta.min(src.ncols())).into_owned()
}

/// Diffusion-bases embedding: each point projected onto the first `eta`
/// eigenvectors of the operator built over its coordinate vectors.
pub fn db_embed(data: &DataMatrix, kernel: KernelParams, trunc: Truncation, variant: DbVariant) -> Result<Embedding> {
    trunc.validate()?;
    let model = coordinate_model(data, kernel)?;
    Ok(db_embed_model(data, &model, trunc, variant, kernel.epsilon()))
}

pub fn db_embed_model(data: &DataMatrix, model: &SpectralModel, trunc: Truncation, variant: DbVariant, epsilon: f64) -> Embedding {
    let (eta, eta_saturated) = trunc.resolve(model);
    let basis = db_basis(model, eta, variant);
    let coords = data.values() * basis;
    let kind = match variant {
        DbVariant::Plain => EmbeddingKind::Db,
        DbVariant::Modified => EmbeddingKind::Mdb,
    };
    Embedding { kind, coords, eigenvalues: model.eigenvalues.clone(), eta, eta_saturated, epsilon, time: trunc.time }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coordinate_is_passed_through() {
        let x = DataMatrix::from_rows(&[vec![1.5], vec![-2.0], vec![3.0]]).unwrap();
        let k = KernelParams::new(1.0).unwrap();
        for v in [DbVariant::Plain, DbVariant::Modified] {
            let e = db_embed(&x, k, Truncation::default(), v).unwrap();
            assert_eq!(e.eta, 1);
            assert_eq!(e.coords.column(0).as_slice(), &[1.5, -2.0, 3.0]);
        }
    }

    #[test]
    fn eta_one_gives_empty_dm_embedding() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let k = KernelParams::new(1.0).unwrap();
        let e = dm_embed(&x, k, Truncation { eta: Some(1), ..Truncation::default() }, DmVariant::Modified).unwrap();
        assert_eq!(e.coords.shape(), (3, 0));
    }

    #[test]
    fn zero_delta_is_rejected() {
        let t = Truncation { delta: 0.0, ..Truncation::default() };
        assert!(t.validate().is_err());
    }
}
