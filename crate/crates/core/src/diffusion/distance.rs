use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::spectral::SpectralModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMethod {
    /// Weighted distance between rows of `P^t`.
    Definitional,
    /// Sum over the non-trivial eigenpairs.
    Spectral,
}

/// Squared diffusion distance `D_t(i, j)^2`.
pub fn diffusion_distance(model: &SpectralModel, t: u32, i: usize, j: usize, method: DistanceMethod) -> Result<f64> {
    let n = model.len();
    if i >= n || j >= n {
        return Err(Error::invalid(format!("point index out of range: ({i}, {j}) with N = {n}")));
    }
    Ok(match method {
        DistanceMethod::Definitional => {
            let pt = model.transition_power(t);
            definitional(&pt, model, i, j)
        }
        DistanceMethod::Spectral => spectral(model, t, i, j),
    })
}

/// All squared diffusion distances.
pub fn diffusion_distances(model: &SpectralModel, t: u32, method: DistanceMethod) -> DMatrix<f64> {
    let n = model.len();
    let pt = match method {
        DistanceMethod::Definitional => Some(model.transition_power(t)),
        DistanceMethod::Spectral => None,
    };
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = match &pt {
                Some(pt) => definitional(pt, model, i, j),
                None => spectral(model, t, i, j),
            };
            out[(i, j)] = d;
            out[(j, i)] = d;
        }
    }
    out
}

fn definitional(pt: &DMatrix<f64>, model: &SpectralModel, i: usize, j: usize) -> f64 {
    let pi = model.mu.column(0);
    (0..model.len()).map(|k| (pt[(i, k)] - pt[(j, k)]).powi(2) / pi[k]).sum()
}

fn spectral(model: &SpectralModel, t: u32, i: usize, j: usize) -> f64 {
    (1..model.len())
        .map(|k| model.eigenvalues[k].powi(2 * t as i32) * (model.nu[(i, k)] - model.nu[(j, k)]).powi(2))
        .sum()
}
