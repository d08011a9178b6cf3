//! Small dense linear-algebra helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is in the build graph
use num_traits::Float;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type Mat2 = Matrix2<Complex64>;

/// `e^{i x}`.
pub fn cis(x: f64) -> Complex64 {
    Complex64::new(x.cos(), x.sin())
}

/// Eigenvalues of a real symmetric matrix in increasing order.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix in increasing order. Only the lower
/// triangle is read.
pub fn hermitian_eigenvalues(m: CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

pub fn determinant(m: CMatrix) -> Complex64 {
    m.lu().determinant()
}

/// Singular values in decreasing order.
pub fn singular_values(m: CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_threshold` times the largest one.
pub fn numerical_rank(m: CMatrix, rel_threshold: f64) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else {
        return 0;
    };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_threshold * top).count()
}

/// Spectral norm of a 2x2 complex matrix in closed form.
pub fn op_norm2(m: &Mat2) -> f64 {
    let f = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let d = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm();
    let disc = (f * f - 4.0 * d * d).max(0.0).sqrt();
    (0.5 * (f + disc)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_of_diagonal() {
        let m = Mat2::new(
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -0.5),
        );
        assert!((op_norm2(&m) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn op_norm_matches_svd() {
        let m = Mat2::new(
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.3, 0.7),
            Complex64::new(2.5, -1.0),
            Complex64::new(0.1, 0.0),
        );
        let dm = CMatrix::from_iterator(2, 2, m.iter().copied());
        let sv = singular_values(dm);
        assert!((op_norm2(&m) - sv[0]).abs() < 1e-12);
    }

    #[test]
    fn rank_of_outer_product() {
        let u = CVector::from_vec(alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)]);
        let m = &u * u.adjoint();
        assert_eq!(numerical_rank(m, 1e-10), 1);
    }
}
