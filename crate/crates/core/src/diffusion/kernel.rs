use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Scale of the Gaussian kernel `exp(-d^2 / (2 eps))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    epsilon: f64,
}

impl KernelParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon must be positive and finite, got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Gaussian affinities from squared distances.
pub fn gaussian_affinity(sq_dist: &DMatrix<f64>, params: KernelParams) -> DMatrix<f64> {
    let scale = 2.0 * params.epsilon;
    sq_dist.map(|d| (-d / scale).exp())
}

/// Row-normalizes `w` into the transition matrix `P = D^-1 W`.
///
/// Returns `P` and the degrees `d(i) = sum_j w(i, j)`.
pub fn markov_normalize(w: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    check_affinity(w)?;
    let degrees = row_degrees(w)?;
    let mut p = w.clone();
    for (i, mut row) in p.row_iter_mut().enumerate() {
        row /= degrees[i];
    }
    Ok((p, degrees))
}

/// Symmetric conjugate `A(i, j) = w(i, j) / sqrt(d(i) d(j))` of the transition matrix.
///
/// `w` must be symmetric up to rounding; the upper triangle is mirrored so
/// the result is exactly symmetric.
pub fn symmetric_conjugate(w: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    check_affinity(w)?;
    let n = w.nrows();
    let scale = w.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in i + 1..n {
            if (w[(i, j)] - w[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::invalid(format!("affinity is not symmetric at ({i}, {j})")));
            }
        }
    }
    let degrees = row_degrees(w)?;
    let sqrt_d = degrees.map(f64::sqrt);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = w[(i, j)] / (sqrt_d[i] * sqrt_d[j]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok((a, degrees))
}

fn check_affinity(w: &DMatrix<f64>) -> Result<()> {
    if w.nrows() != w.ncols() || w.nrows() == 0 {
        return Err(Error::invalid(format!("affinity must be square and non-empty, got {:?}", w.shape())));
    }
    if let Some(pos) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
        let (r, c) = (pos % w.nrows(), pos / w.nrows());
        return Err(Error::invalid(format!("affinity entry ({r}, {c}) is negative or non-finite")));
    }
    Ok(())
}

fn row_degrees(w: &DMatrix<f64>) -> Result<DVector<f64>> {
    let degrees = DVector::from_iterator(w.nrows(), w.row_iter().map(|r| r.sum()));
    if let Some(i) = degrees.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::ZeroDegree(i));
    }
    Ok(degrees)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affinity_of_zero_distance_is_one() {
        let sq = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]);
        let w = gaussian_affinity(&sq, KernelParams::new(1.0).unwrap());
        assert_eq!(w[(0, 0)], 1.0);
        assert!((w[(0, 1)] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(KernelParams::new(0.0).is_err());
        assert!(KernelParams::new(f64::NAN).is_err());
    }

    #[test]
    fn markov_of_small_matrix() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 2.0, 2.0]);
        let (p, d) = markov_normalize(&w).unwrap();
        assert_eq!(p, DMatrix::from_row_slice(2, 2, &[0.25, 0.75, 0.5, 0.5]));
        assert_eq!(d.as_slice(), &[4.0, 4.0]);
    }

    #[test]
    fn zero_row_is_reported() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(markov_normalize(&w), Err(Error::ZeroDegree(1))));
    }

    #[test]
    fn conjugate_of_small_matrix() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 3.0]);
        let (a, _) = symmetric_conjugate(&w).unwrap();
        let expect = [0.5, 1.0 / 8f64.sqrt(), 1.0 / 8f64.sqrt(), 0.75];
        for (x, y) in a.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
