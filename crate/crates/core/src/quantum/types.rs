use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::tol;

/// A point of the probability simplex: the classical version of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates that entries are non-negative (up to clamping of tiny
    /// negatives) and sum to one.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("probability vector"));
        }
        let mut entries = entries;
        for x in entries.iter_mut() {
            if !x.is_finite() {
                return Err(Error::InvalidProbability("non-finite entry".into()));
            }
            if *x < -tol::NEG_CLAMP {
                return Err(Error::InvalidProbability(format!("negative entry {x}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > tol::SUM {
            return Err(Error::InvalidProbability(format!("entries sum to {sum}")));
        }
        Ok(Self(entries))
    }

    /// Rescales non-negative weights onto the simplex.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidProbability(
                "weights must be non-negative with positive sum".into(),
            ));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    /// Maximally mixed distribution.
    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Self::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// Positive, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let d = linalg::ensure_square(&m)?;
        if d == 0 {
            return Err(Error::Empty("density matrix"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let herm = linalg::hermiticity_defect(&m);
        if herm > tol::HERMITIAN {
            return Err(Error::InvalidDensity(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = linalg::trace(&m).re;
        if (tr - 1.0).abs() > tol::SUM {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&m)[0];
        if min < -tol::PSD {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is a state by construction (e.g. a channel output).
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn pure(psi: &linalg::ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("ket has norm {norm}")));
        }
        Ok(Self(linalg::projector(psi)))
    }

    /// Pure state from an unnormalized nonzero ket.
    pub fn pure_normalized(psi: &linalg::ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero ket".into()));
        }
        Ok(Self(linalg::projector(&(psi / linalg::c(norm, 0.0)))))
    }

    pub fn diagonal(p: &ProbabilityVector) -> Self {
        let entries: Vec<Complex64> = p.as_slice().iter().map(|&x| linalg::c(x, 0.0)).collect();
        Self(linalg::diag(&entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

/// Square matrix with `U^dagger U = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        linalg::ensure_square(&m)?;
        let deviation = linalg::unitarity_defect(&m);
        if !(deviation < tol::UNITARY) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity(d: usize) -> Self {
        Self(linalg::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// The unistochastic matrix `U o conj(U)`.
    pub fn unistochastic(&self) -> StochasticMatrix {
        StochasticMatrix(self.0.map(|z| z.norm_sqr()))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }
}

/// Column-stochastic matrix: `T_kl >= 0` and `sum_k T_kl = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(DMatrix<f64>);

impl StochasticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty("stochastic matrix"));
        }
        let mut m = m;
        for x in m.iter_mut() {
            if !x.is_finite() || *x < -tol::NEG_CLAMP {
                return Err(Error::NotStochastic(format!("entry {x}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        for (l, col) in m.column_iter().enumerate() {
            let s: f64 = col.iter().sum();
            if (s - 1.0).abs() > tol::SUM {
                return Err(Error::NotStochastic(format!("column {l} sums to {s}")));
            }
        }
        Ok(Self(m))
    }

    pub fn from_rows(d: usize, rows: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(d, d, rows))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    /// The van der Waerden matrix with all entries `1/d`.
    pub fn van_der_waerden(d: usize) -> Self {
        Self(DMatrix::from_element(d, d, 1.0 / d as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn column(&self, l: usize) -> Vec<f64> {
        self.0.column(l).iter().copied().collect()
    }

    /// Largest deviation of a row sum from one.
    pub fn row_sum_defect(&self) -> f64 {
        self.0
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_bistochastic(&self) -> bool {
        self.row_sum_defect() <= tol::SUM
    }

    /// Largest entrywise difference to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.0 - &other.0).abs().max()
    }
}

impl std::ops::Index<(usize, usize)> for StochasticMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}
