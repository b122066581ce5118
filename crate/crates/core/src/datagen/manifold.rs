use nalgebra::DMatrix;

use crate::diffusion::DataMatrix;
use crate::error::{Error, Result};

use super::rng::SeededRng;

/// `count` points drawn uniformly from the unit cube `[0, 1]^d`, mapped into
/// `R^n` by the first `d` columns of a random orthogonal matrix, plus
/// isotropic Gaussian noise of standard deviation `noise_sigma`.
///
/// When `d == n` the cube is used as is. Draw order: the `n x n` Gaussian
/// matrix for the rotation (row-major, only when `d < n`), then per point
/// `d` uniforms followed by `n` normals.
pub fn synth_manifold(d: usize, n: usize, count: usize, noise_sigma: f64, seed: u64) -> Result<DataMatrix> {
    if d == 0 || d > n {
        return Err(Error::invalid(format!("need 1 <= d <= n, got d = {d}, n = {n}")));
    }
    if count == 0 {
        return Err(Error::invalid("count must be positive"));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::invalid("noise_sigma must be non-negative"));
    }
    let mut rng = SeededRng::new(seed);
    let frame = if d < n {
        let g = DMatrix::from_row_iterator(n, n, (0..n * n).map(|_| rng.normal()));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for k in 0..n {
            if r[(k, k)] < 0.0 {
                q.column_mut(k).neg_mut();
            }
        }
        Some(q.columns(0, d).into_owned())
    } else {
        None
    };
    let mut out = DMatrix::zeros(count, n);
    for i in 0..count {
        let u: Vec<f64> = (0..d).map(|_| rng.uniform()).collect();
        for k in 0..n {
            let base = match &frame {
                Some(q) => (0..d).map(|j| q[(k, j)] * u[j]).sum(),
                None => u[k],
            };
            out[(i, k)] = base;
        }
        for k in 0..n {
            out[(i, k)] += noise_sigma * rng.normal();
        }
    }
    DataMatrix::new(out)
}
