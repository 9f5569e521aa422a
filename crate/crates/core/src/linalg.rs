//! Dense helpers shared by the algebra, state and representation modules.
//!
//! Everything here works on `DMatrix<Complex64>`; eigen-decompositions are
//! returned sorted ascending so that callers can cluster by adjacency.

use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    Ok(svd.singular_values.iter().cloned().fold(0.0, f64::max))
}

/// Spectral norm, falling back to the Frobenius norm (an upper bound) if the SVD fails.
pub(crate) fn norm_or_frobenius(m: &CMatrix) -> f64 {
    spectral_norm(m).unwrap_or_else(|_| m.norm())
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, ascending eigenvalues.
///
/// Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let h = hermitian_part(m);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigen-decomposition of a real symmetric matrix, ascending eigenvalues.
pub fn real_symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let h = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Groups sorted real values into runs whose consecutive gaps are below `tol`.
pub(crate) fn cluster_sorted(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(last) if v - values[*last.last().unwrap()] <= tol => last.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Unitary diagonalization of a normal matrix.
///
/// The Hermitian and anti-Hermitian parts of a normal matrix commute, so the
/// eigenspaces of the first are refined by diagonalizing the second inside
/// each cluster. Returns eigenvalues `v_k^* A v_k` and the unitary `V`.
pub fn normal_eigen(a: &CMatrix, cluster_tol: f64) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = a.nrows();
    let re = hermitian_part(a);
    let im = (a - a.adjoint()).scale(0.5) * Complex64::new(0.0, -1.0);
    let (vals, mut vecs) = hermitian_eigen(&re)?;
    for cluster in cluster_sorted(&vals, cluster_tol) {
        if cluster.len() < 2 {
            continue;
        }
        let w = CMatrix::from_fn(n, cluster.len(), |r, c| vecs[(r, cluster[c])]);
        let restricted = w.adjoint() * &im * &w;
        let (_, rot) = hermitian_eigen(&restricted)?;
        let refined = w * rot;
        for (c, &col) in cluster.iter().enumerate() {
            vecs.set_column(col, &refined.column(c));
        }
    }
    let eigenvalues = (0..n)
        .map(|k| {
            let v = vecs.column(k);
            (v.adjoint() * a * v)[(0, 0)]
        })
        .collect();
    Ok((eigenvalues, vecs))
}

/// Orthonormal basis (columns) of the right null space of `k`: right
/// singular vectors with singular value at most `threshold`.
pub(crate) fn null_space(k: &CMatrix, threshold: f64) -> Result<CMatrix> {
    let cols = k.ncols();
    let padded;
    let k = if k.nrows() < cols {
        padded = k.clone().resize_vertically(cols, ZERO);
        &padded
    } else {
        k
    };
    let svd = SVD::try_new(k.clone(), false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let vt = svd.v_t.expect("requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    Ok(CMatrix::from_fn(cols, keep.len(), |r, c| vt[(keep[c], r)].conj()))
}

/// Frobenius inner product `tr(a^* b)`.
pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `tr(a b)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Column-major vectorization.
pub(crate) fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().cloned())
}

pub(crate) fn unvec(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_iterator(rows, cols, v.iter().cloned())
}

/// Unitary polar factor `W (W^* W)^{-1/2}`; `None` if `w` is numerically singular.
pub(crate) fn unitary_polar(w: &CMatrix, rel_tol: f64) -> Result<Option<CMatrix>> {
    let svd = SVD::try_new(w.clone(), true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin <= rel_tol * smax {
        return Ok(None);
    }
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    Ok(Some(u * vt))
}

pub(crate) fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_eigen_resolves_degenerate_real_parts() {
        // diag(i, -i, 1): the Hermitian part is degenerate on the first two.
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![I, -I, ONE]));
        let (vals, v) = normal_eigen(&a, 1e-10).unwrap();
        let recon = &v * CMatrix::from_diagonal(&CVector::from_vec(vals.clone())) * v.adjoint();
        assert!((recon - a).norm() < 1e-12);
        let mut ims: Vec<f64> = vals.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && ims[1].abs() < 1e-12 && (ims[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_factor_of_scaled_unitary() {
        let w = CMatrix::from_row_slice(2, 2, &[ZERO, ONE * 3.0, ONE * 3.0, ZERO]);
        let u = unitary_polar(&w, 1e-12).unwrap().unwrap();
        assert!((u - w.scale(1.0 / 3.0)).norm() < 1e-12);
        assert!(unitary_polar(&CMatrix::zeros(2, 2), 1e-12).unwrap().is_none());
    }

    #[test]
    fn cluster_groups_adjacent_values() {
        let c = cluster_sorted(&[0.0, 1e-12, 1.0, 2.0, 2.0 + 1e-13], 1e-9);
        assert_eq!(c, vec![vec![0, 1], vec![2], vec![3, 4]]);
    }
}
