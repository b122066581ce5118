use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

use super::kernel::{markov_normalize, symmetric_conjugate};

/// Relative residual allowed by [`spectral_decompose`].
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Smallest admissible magnitude of a lead eigenvector entry.
pub const LEAD_VECTOR_FLOOR: f64 = 1e-12;
/// Gap below which the lead eigenvalue counts as repeated.
pub const LEAD_GAP: f64 = 1e-8;

/// Eigenvalues sorted by decreasing magnitude, with matching eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Orthonormal eigendecomposition of a symmetric matrix.
///
/// Eigenpairs are ordered by decreasing `|lambda|` (ties keep solver order)
/// and each eigenvector has its largest-magnitude entry positive, the
/// lowest index winning ties. Fails with `ConvergenceFailure` when any
/// residual `|A v - lambda v|` exceeds `1e-8 |A|_F`.
pub fn spectral_decompose(a: &DMatrix<f64>) -> Result<Eigenpairs> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::invalid(format!("matrix must be square and non-empty, got {:?}", a.shape())));
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0).ok_or(Error::ConvergenceFailure {
        residual: f64::INFINITY,
        tolerance: RESIDUAL_TOLERANCE * a.norm(),
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].abs().total_cmp(&eig.eigenvalues[i].abs()));

    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        fix_sign(&mut v);
        vectors.set_column(k, &v);
    }

    let tolerance = RESIDUAL_TOLERANCE * a.norm();
    let residual = (0..n)
        .map(|k| (a * vectors.column(k) - vectors.column(k) * values[k]).norm())
        .fold(0.0, f64::max);
    if !(residual <= tolerance) {
        return Err(Error::ConvergenceFailure { residual, tolerance });
    }
    Ok(Eigenpairs { values, vectors })
}

/// Flips `v` so its largest-magnitude entry is positive; ties go to the lowest index.
pub fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Right and left eigenvectors of `P` from the eigenvectors of its conjugate.
///
/// Returns `(nu, mu)` with `nu_k = theta_k / theta_1` and `mu_k = theta_k * theta_1`
/// (element-wise).
pub fn recover_biorthogonal(theta: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if theta.ncols() == 0 {
        return Err(Error::invalid("no eigenvectors given"));
    }
    let lead = theta.column(0);
    for (index, &value) in lead.iter().enumerate() {
        if value.abs() < LEAD_VECTOR_FLOOR {
            return Err(Error::DegenerateLeadVector { index, value });
        }
    }
    let mut nu = theta.clone();
    let mut mu = theta.clone();
    for (i, &l) in lead.iter().enumerate() {
        nu.row_mut(i).unscale_mut(l);
        mu.row_mut(i).scale_mut(l);
    }
    Ok((nu, mu))
}

/// How the eigenvectors of `P` were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Through the symmetric conjugate `A`.
    Conjugate,
    /// Directly from the non-symmetric `P`.
    Direct,
}

/// Spectral data of a diffusion operator built from an affinity matrix.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub affinity: DMatrix<f64>,
    pub degrees: DVector<f64>,
    pub markov: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors of the conjugate, `nu_k * sqrt(pi)`.
    pub theta: DMatrix<f64>,
    /// Right eigenvectors of `P`; `nu_1` is constant one.
    pub nu: DMatrix<f64>,
    /// Left eigenvectors of `P`; `mu_1` is the stationary distribution.
    pub mu: DMatrix<f64>,
    pub route: Route,
}

impl SpectralModel {
    /// Builds the model through the symmetric conjugate.
    pub fn from_affinity(w: DMatrix<f64>) -> Result<Self> {
        let (markov, degrees) = markov_normalize(&w)?;
        let (a, _) = symmetric_conjugate(&w)?;
        let eig = spectral_decompose(&a)?;
        check_simple_lead(&eig.values)?;
        let (nu, mu) = recover_biorthogonal(&eig.vectors)?;
        Ok(Self { affinity: w, degrees, markov, eigenvalues: eig.values, theta: eig.vectors, nu, mu, route: Route::Conjugate })
    }

    /// Builds the model by eigensolving the transition matrix itself.
    ///
    /// Eigenvalues come from a real Schur form of `P`; each eigenspace is
    /// the null space of `P - lambda I`, found by SVD and orthonormalized in
    /// the stationary-weighted inner product. Cost grows as `N^4`, so this
    /// route is meant for small problems and cross-checks.
    pub fn from_affinity_direct(w: DMatrix<f64>) -> Result<Self> {
        let (markov, degrees) = markov_normalize(&w)?;
        let n = markov.nrows();

        let pi = stationary_distribution(&markov)?;
        let mut values: Vec<f64> = markov.clone().complex_eigenvalues().iter().map(|c| c.re).collect();
        values.sort_by(|a, b| b.abs().total_cmp(&a.abs()));

        let mut nu = DMatrix::zeros(n, n);
        let mut k = 0;
        while k < n {
            let lambda = values[k];
            let mut end = k + 1;
            while end < n && (values[end] - lambda).abs() <= 1e-8 * lambda.abs().max(1.0) {
                end += 1;
            }
            let group = end - k;
            let mean = values[k..end].iter().sum::<f64>() / group as f64;
            let shifted = &markov - DMatrix::identity(n, n) * mean;
            let svd = shifted.svd(false, true);
            let v_t = svd.v_t.ok_or(Error::ConvergenceFailure { residual: f64::INFINITY, tolerance: 0.0 })?;
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
            for (g, &row) in idx.iter().take(group).enumerate() {
                let mut v = v_t.row(row).transpose();
                for prev in k..k + g {
                    let proj = weighted_dot(&pi, &nu.column(prev).into_owned(), &v);
                    v -= nu.column(prev) * proj;
                }
                let norm = weighted_dot(&pi, &v, &v).sqrt();
                v /= norm;
                nu.set_column(k + g, &v);
            }
            k = end;
        }

        let sqrt_pi = pi.map(f64::sqrt);
        let mut theta = nu.clone();
        for mut col in theta.column_iter_mut() {
            col.component_mul_assign(&sqrt_pi);
            let mut owned = col.clone_owned();
            fix_sign(&mut owned);
            col.copy_from(&owned);
        }
        for (k, col) in theta.column_iter().enumerate() {
            let v = col.component_div(&sqrt_pi);
            nu.set_column(k, &v);
        }
        let mut mu = nu.clone();
        for mut col in mu.column_iter_mut() {
            col.component_mul_assign(&pi);
        }
        let eigenvalues = DVector::from_vec(values);
        check_simple_lead(&eigenvalues)?;
        for (index, &value) in theta.column(0).iter().enumerate() {
            if value.abs() < LEAD_VECTOR_FLOOR {
                return Err(Error::DegenerateLeadVector { index, value });
            }
        }
        Ok(Self { affinity: w, degrees, markov, eigenvalues, theta, nu, mu, route: Route::Direct })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Stationary distribution `mu_1`.
    pub fn stationary(&self) -> DVector<f64> {
        self.mu.column(0).into_owned()
    }

    /// `P^t` by repeated multiplication.
    pub fn transition_power(&self, t: u32) -> DMatrix<f64> {
        matrix_power(&self.markov, t)
    }

    /// Rank-`eta` spectral approximation `sum_{k<eta} lambda_k^t nu_k mu_k^T`.
    pub fn truncated_power(&self, t: u32, eta: usize) -> DMatrix<f64> {
        let n = self.len();
        let mut out = DMatrix::zeros(n, n);
        for k in 0..eta.min(n) {
            let lt = self.eigenvalues[k].powi(t as i32);
            out.ger(lt, &self.nu.column(k), &self.mu.column(k), 1.0);
        }
        out
    }

    /// Smallest `eta` whose truncation error in Frobenius norm is below `delta`.
    pub fn eta_for_delta(&self, t: u32, delta: f64) -> EtaChoice {
        let n = self.len();
        let mut residual = self.transition_power(t);
        for k in 0..n {
            let lt = self.eigenvalues[k].powi(t as i32);
            residual.ger(-lt, &self.nu.column(k), &self.mu.column(k), 1.0);
            if residual.norm() < delta {
                return EtaChoice { eta: k + 1, saturated: k + 1 == n };
            }
        }
        EtaChoice { eta: n, saturated: true }
    }
}

/// Result of the `eta(delta)` search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaChoice {
    pub eta: usize,
    /// True when no `eta < N` reached the target; `eta` is then `N`.
    pub saturated: bool,
}

pub(crate) fn matrix_power(m: &DMatrix<f64>, t: u32) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::identity(n, n);
    for _ in 0..t {
        out = &out * m;
    }
    out
}

fn check_simple_lead(values: &DVector<f64>) -> Result<()> {
    if values.len() > 1 && (values[0].abs() - values[1].abs()).abs() < LEAD_GAP {
        return Err(Error::DegenerateLeadVector { index: 1, value: values[1] });
    }
    Ok(())
}

fn weighted_dot(w: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    w.iter().zip(a.iter()).zip(b.iter()).map(|((w, a), b)| w * a * b).sum()
}

/// Left null vector of `P - I`, normalized to sum one.
fn stationary_distribution(p: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = p.nrows();
    let shifted = p.transpose() - DMatrix::identity(n, n);
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::ConvergenceFailure { residual: f64::INFINITY, tolerance: 0.0 })?;
    let smallest = svd.singular_values.imin();
    let mut pi = v_t.row(smallest).transpose();
    let total = pi.sum();
    pi /= total;
    if let Some((index, &value)) = pi.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::DegenerateLeadVector { index, value });
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_sorted_by_magnitude() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -2.0, 1.0]));
        let e = spectral_decompose(&a).unwrap();
        assert_eq!(e.values.as_slice(), &[-2.0, 1.0, 0.5]);
        assert_eq!(e.vectors.column(0).as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn sign_rule_prefers_lowest_index_on_ties() {
        let mut v = DVector::from_vec(vec![-0.5, 0.5, 0.1]);
        fix_sign(&mut v);
        assert_eq!(v.as_slice(), &[0.5, -0.5, -0.1]);
    }

    #[test]
    fn constant_lead_vector() {
        let theta = DMatrix::from_element(3, 2, 0.5);
        let (nu, mu) = recover_biorthogonal(&theta).unwrap();
        assert!(nu.iter().all(|v| *v == 1.0));
        assert!(mu.iter().all(|v| *v == 0.25));
    }

    #[test]
    fn zero_lead_entry_is_degenerate() {
        let theta = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        assert!(matches!(recover_biorthogonal(&theta), Err(Error::DegenerateLeadVector { index: 1, .. })));
    }

    #[test]
    fn identity_affinity_is_disconnected() {
        let w = DMatrix::identity(3, 3);
        assert!(matches!(SpectralModel::from_affinity(w), Err(Error::DegenerateLeadVector { .. })));
    }

    #[test]
    fn two_point_chain() {
        // P = [[a, 1-a], [1-a, a]] has eigenvalues 1 and 2a - 1.
        let w = DMatrix::from_row_slice(2, 2, &[0.8, 0.2, 0.2, 0.8]);
        let m = SpectralModel::from_affinity(w.clone()).unwrap();
        assert!((m.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((m.eigenvalues[1] - 0.6).abs() < 1e-14);
        let d = SpectralModel::from_affinity_direct(w).unwrap();
        assert!((d.eigenvalues[1] - 0.6).abs() < 1e-12);
        assert!((&d.nu - &m.nu).amax() < 1e-10);
    }

    #[test]
    fn eta_saturates_for_tiny_delta() {
        let w = DMatrix::from_row_slice(2, 2, &[0.8, 0.2, 0.2, 0.8]);
        let m = SpectralModel::from_affinity(w).unwrap();
        let c = m.eta_for_delta(1, 0.0);
        assert_eq!(c, EtaChoice { eta: 2, saturated: true });
        assert_eq!(m.eta_for_delta(1, 1e6).eta, 1);
    }
}
