//! Small dense helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tolerance;

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| libm::fmax(acc, libm::fabs(*x)))
}

/// `max |A - A^T|`.
pub fn symmetry_residual(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// `max |Q^T Q - I|` for the columns of `q`.
pub fn gram_residual(q: &DMatrix<f64>) -> f64 {
    let g = q.transpose() * q;
    max_abs(&(g - DMatrix::identity(q.ncols(), q.ncols())))
}

/// Stack vectors as the columns of a matrix.
pub fn columns(vectors: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

fn orthogonalize_against(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    // two passes keep the loss of orthogonality at rounding level
    for _ in 0..2 {
        for b in basis {
            let proj = b.dot(v);
            v.axpy(-proj, b, 1.0);
        }
    }
}

/// Modified Gram-Schmidt with re-orthogonalization.
///
/// Fails with [`Error::DegenerateFrame`] as soon as a residual norm drops
/// below `1e-10 * max(1, |v|)`.
pub fn orthonormalize(vectors: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    let dim = vectors.first().map_or(0, |v| v.len());
    for (idx, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::Shape { expected: dim, found: v.len(), what: "frame vector" });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidVector(alloc::format!("vector {idx} has non-finite entries")));
        }
        let mut w = v.clone();
        orthogonalize_against(&mut w, &out);
        let norm = w.norm();
        if norm <= tolerance::PIVOT * libm::fmax(1.0, v.norm()) {
            return Err(Error::DegenerateFrame { pivot: idx, norm });
        }
        out.push(w / norm);
    }
    Ok(out)
}

/// Extends an orthonormal family to an orthonormal basis of `R^dim` by
/// sweeping the canonical basis in order and keeping every vector whose
/// residual is at least `1/2`.
///
/// A sweep of `dim` canonical vectors always completes the basis at that
/// threshold: the residual norms squared of the canonical vectors sum to the
/// codimension, and each accepted vector lowers the remaining ones.
pub fn complete_basis(frame: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = frame.to_vec();
    let mut added = Vec::with_capacity(dim.saturating_sub(frame.len()));
    let mut threshold = 0.5;
    while basis.len() < dim {
        for i in 0..dim {
            if basis.len() == dim {
                break;
            }
            let mut w = DVector::zeros(dim);
            w[i] = 1.0;
            orthogonalize_against(&mut w, &basis);
            let norm = w.norm();
            if norm >= threshold {
                let w = w / norm;
                basis.push(w.clone());
                added.push(w);
            }
        }
        // only reachable for badly non-orthonormal input frames
        threshold *= 0.5;
        if threshold < 1e-8 {
            break;
        }
    }
    added
}

/// Eigen-decomposition of a symmetric matrix with ascending eigenvalues.
///
/// Eigenvectors are the matching columns of the returned matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn standard_basis_is_unchanged() {
        let basis: Vec<_> = (0..4)
            .map(|i| {
                let mut e = DVector::zeros(4);
                e[i] = 1.0;
                e
            })
            .collect();
        let q = orthonormalize(&basis).unwrap();
        for (a, b) in q.iter().zip(&basis) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn skewed_pair_becomes_orthonormal() {
        let q = orthonormalize(&[v(&[1.0, 1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0, 0.0])]).unwrap();
        assert!(gram_residual(&columns(&q, 4)) <= 1e-12);
    }

    #[test]
    fn dependent_vectors_are_rejected() {
        let a = v(&[1.0, 2.0, 0.0, 1.0]);
        let b = v(&[0.0, 1.0, 3.0, 0.0]);
        let c = &a + &b;
        match orthonormalize(&[a, b, c]) {
            Err(Error::DegenerateFrame { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("expected degenerate frame, got {other:?}"),
        }
    }

    #[test]
    fn completion_of_leading_axes_is_canonical() {
        let frame: Vec<_> = (0..4)
            .map(|i| {
                let mut e = DVector::zeros(8);
                e[i] = 1.0;
                e
            })
            .collect();
        let normal = complete_basis(&frame, 8);
        assert_eq!(normal.len(), 4);
        for (k, w) in normal.iter().enumerate() {
            let mut e = DVector::zeros(8);
            e[4 + k] = 1.0;
            assert_eq!(w, &e);
        }
    }

    #[test]
    fn completion_of_generic_frame_is_orthonormal() {
        let frame = orthonormalize(&[
            v(&[0.3, -1.2, 0.5, 0.7, 0.1]),
            v(&[1.1, 0.4, -0.2, 0.0, 0.9]),
        ])
        .unwrap();
        let mut all = frame.clone();
        all.extend(complete_basis(&frame, 5));
        assert_eq!(all.len(), 5);
        assert!(gram_residual(&columns(&all, 5)) <= 1e-12);
    }

    #[test]
    fn eigenvalues_come_back_sorted() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, -1.0]);
        let (vals, vecs) = symmetric_eigen(&m);
        approx::assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(vals[2], 3.0, epsilon = 1e-12);
        let recon = &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals)) * vecs.transpose();
        assert!(max_abs(&(recon - m)) < 1e-12);
    }
}
