//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// General dense complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector (kets).
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn from_real(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| c(x, 0.0))
}

pub fn diag(entries: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(entries))
}

/// Standard basis ket `|k>` in dimension `d`.
pub fn basis(d: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[k] = ONE;
    v
}

pub fn ket(entries: &[Complex64]) -> ComplexVector {
    ComplexVector::from_column_slice(entries)
}

pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    a.dotc(b)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Frobenius deviation of `m^dagger m` from the identity.
pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    let d = m.ncols();
    frobenius(&(m.adjoint() * m - identity(d)))
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues are returned in
/// ascending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Unitary factor of the polar decomposition `A = U P`, i.e. the unitary
/// nearest to `A` in Frobenius norm, computed from the SVD `A = W S V^dagger`
/// as `U = W V^dagger`.
pub fn nearest_unitary(a: &ComplexMatrix) -> ComplexMatrix {
    let svd = a.clone().svd(true, true);
    let w = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    w * v_t
}

/// Inverse square root of a positive definite Hermitian matrix.
pub fn inverse_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    if values.iter().any(|&v| v <= 0.0) {
        return Err(Error::Internal(
            "inverse square root of a singular matrix".into(),
        ));
    }
    let scaled: Vec<Complex64> = values.iter().map(|&v| c(1.0 / v.sqrt(), 0.0)).collect();
    Ok(&vectors * diag(&scaled) * vectors.adjoint())
}

/// Gram matrix `G_mn = <v_m|v_n>` of a list of kets.
pub fn gram(states: &[ComplexVector]) -> ComplexMatrix {
    let n = states.len();
    ComplexMatrix::from_fn(n, n, |m, k| inner(&states[m], &states[k]))
}

/// Frobenius deviation of the Gram matrix from the identity.
pub fn gram_defect(states: &[ComplexVector]) -> f64 {
    frobenius(&(gram(states) - identity(states.len())))
}

/// Completes orthonormal columns to a full unitary by Gram-Schmidt against the
/// standard basis. Input columns are assumed orthonormal.
pub fn complete_unitary(columns: &[ComplexVector], d: usize) -> ComplexMatrix {
    let mut basis_vectors: Vec<ComplexVector> = columns.to_vec();
    for k in 0..d {
        if basis_vectors.len() == d {
            break;
        }
        let mut candidate = basis(d, k);
        // two passes keep the completion orthogonal to working precision
        for _ in 0..2 {
            for b in &basis_vectors {
                let proj = inner(b, &candidate);
                candidate -= b * proj;
            }
        }
        let norm = candidate.norm();
        if norm > 1e-8 {
            basis_vectors.push(candidate / c(norm, 0.0));
        }
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, col) in basis_vectors.iter().enumerate() {
        u.set_column(j, col);
    }
    u
}

/// Partial trace over the first tensor factor of a `(d1*d2)`-dimensional operator.
pub fn partial_trace_first(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d2, d2, |i, j| {
        (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
    })
}

/// Partial trace over the second tensor factor.
pub fn partial_trace_second(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d1, d1, |i, j| {
        (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
    })
}

/// Permutation matrix `P` with `P|j> = |perm[j]>`.
pub fn permutation_matrix(perm: &[usize]) -> ComplexMatrix {
    let d = perm.len();
    let mut p = ComplexMatrix::zeros(d, d);
    for (j, &i) in perm.iter().enumerate() {
        p[(i, j)] = ONE;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_unitary_of_unitary_is_itself() {
        let h = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
        )
        .scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(frobenius(&(nearest_unitary(&h) - &h)) < 1e-14);
    }

    #[test]
    fn nearest_unitary_of_scaled_identity() {
        let a = identity(3).scale(2.5);
        assert!(frobenius(&(nearest_unitary(&a) - identity(3))) < 1e-14);
    }

    #[test]
    fn completion_is_unitary() {
        let v = ket(&[c(0.6, 0.0), c(0.0, 0.8), ZERO]);
        let u = complete_unitary(std::slice::from_ref(&v), 3);
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((u.column(0) - v).norm() < 1e-15);
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let rebuilt = &vecs * diag(&[c(vals[0], 0.0), c(vals[1], 0.0)]) * vecs.adjoint();
        assert!(frobenius(&(rebuilt - m)) < 1e-12);
    }

    #[test]
    fn partial_traces_of_product() {
        let a = diag(&[c(0.25, 0.0), c(0.75, 0.0)]);
        let b = diag(&[c(0.5, 0.0), c(0.2, 0.0), c(0.3, 0.0)]);
        let ab = kron(&a, &b);
        assert!(frobenius(&(partial_trace_first(&ab, 2, 3) - &b)) < 1e-15);
        assert!(frobenius(&(partial_trace_second(&ab, 2, 3) - &a)) < 1e-15);
    }
}
