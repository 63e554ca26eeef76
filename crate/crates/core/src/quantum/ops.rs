use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cis, ComplexMatrix, ComplexVector};
use crate::quantum::types::{DensityMatrix, ProbabilityVector, StochasticMatrix, UnitaryMatrix};

/// Fourier matrix `F_kl = exp(2 pi i k l / d) / sqrt(d)` (0-based indices).
pub fn fourier_matrix(d: usize) -> UnitaryMatrix {
    assert!(d >= 1, "dimension must be positive");
    let norm = 1.0 / (d as f64).sqrt();
    let m = ComplexMatrix::from_fn(d, d, |k, l| {
        // reduce k*l mod d before scaling so large products keep full precision
        let phase = 2.0 * PI * ((k * l) % d) as f64 / d as f64;
        cis(phase) * norm
    });
    UnitaryMatrix::new(m).expect("Fourier matrix is unitary")
}

/// Diagonal unitary whose diagonal is the `k`-th row (equivalently column) of
/// the Fourier matrix scaled by `sqrt(d)`; `k` is 0-based.
pub fn diagonal_unitary(d: usize, k: usize) -> Result<UnitaryMatrix> {
    if k >= d {
        return Err(Error::IndexOutOfRange { index: k, dim: d });
    }
    let entries: Vec<_> = (0..d)
        .map(|l| cis(2.0 * PI * ((k * l) % d) as f64 / d as f64))
        .collect();
    UnitaryMatrix::new(linalg::diag(&entries))
}

/// Row-wise vectorization `|M>> = (M (x) 1)|Omega>`, so entry `(i, j)` lands at
/// position `i * d + j`.
pub fn vectorize(m: &ComplexMatrix) -> Result<ComplexVector> {
    let d = linalg::ensure_square(m)?;
    Ok(ComplexVector::from_fn(d * d, |idx, _| m[(idx / d, idx % d)]))
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &ComplexVector) -> Result<ComplexMatrix> {
    let n = v.len();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::InvalidParameter(format!(
            "vector length {n} is not a perfect square"
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j]))
}

/// Unnormalized maximally entangled ket `|Omega> = sum_k |kk>`.
pub fn omega(d: usize) -> ComplexVector {
    vectorize(&linalg::identity(d)).expect("identity is square")
}

/// `|Omega> / sqrt(d)`.
pub fn maximally_entangled(d: usize) -> ComplexVector {
    omega(d).scale(1.0 / (d as f64).sqrt())
}

/// Zeroes the off-diagonal entries.
pub fn decohere_state(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let m = rho.matrix();
    DensityMatrix::from_trusted(ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            c(m[(i, i)].re, 0.0)
        } else {
            linalg::ZERO
        }
    }))
}

/// The diagonal `p_k = <k|rho|k>`.
pub fn classical_version(rho: &DensityMatrix) -> ProbabilityVector {
    let entries: Vec<f64> = rho.matrix().diagonal().iter().map(|z| z.re.max(0.0)).collect();
    let sum: f64 = entries.iter().sum();
    ProbabilityVector::new(entries.iter().map(|x| x / sum).collect())
        .expect("diagonal of a density matrix is a distribution")
}

/// Classical version of a (normalized) ket.
pub fn ket_classical_version(psi: &ComplexVector) -> Vec<f64> {
    psi.iter().map(|z| z.norm_sqr()).collect()
}

/// Half the l1 distance between two distributions.
pub fn total_variation(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(tv_slices(p.as_slice(), q.as_slice()))
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Half the trace norm of `rho - sigma`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let sum: f64 = linalg::hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum();
    Ok((0.5 * sum).min(1.0))
}

/// Optimal success probability of telling two classical channels apart with
/// a single classical input: `max_k (1 + delta(T1_k, T2_k)) / 2`.
pub fn classical_channel_distinguish_prob(
    t1: &StochasticMatrix,
    t2: &StochasticMatrix,
) -> Result<f64> {
    if t1.dim() != t2.dim() {
        return Err(Error::DimensionMismatch {
            expected: t1.dim(),
            found: t2.dim(),
        });
    }
    let best = (0..t1.dim())
        .map(|k| tv_slices(&t1.column(k), &t2.column(k)))
        .fold(0.0, f64::max);
    Ok((1.0 + best) / 2.0)
}

/// `|<a|b>|^2` for normalized kets.
pub fn fidelity_pure(a: &ComplexVector, b: &ComplexVector) -> f64 {
    linalg::inner(a, b).norm_sqr()
}

/// Input state used to certify distinguishability.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// `true` when the state lives on `d (x) d` and channels act on the first factor.
    pub entangled: bool,
    pub state: ComplexVector,
}

impl Witness {
    pub fn product(state: ComplexVector) -> Self {
        Self {
            entangled: false,
            state,
        }
    }

    pub fn entangled(state: ComplexVector) -> Self {
        Self {
            entangled: true,
            state,
        }
    }
}

/// Verdict of a perfect-distinguishability check.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishabilityReport {
    pub verdict: bool,
    /// `max_{m != n} ||rho_m rho_n||_F`.
    pub max_pairwise_residual: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
}

/// States are perfectly distinguishable iff `rho_m rho_n = 0` for all `m != n`.
pub fn mutually_orthogonal(states: &[DensityMatrix], tol: f64) -> Result<DistinguishabilityReport> {
    let first = states.first().ok_or(Error::Empty("state list"))?;
    let d = first.dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let mut worst = 0.0_f64;
    for m in 0..states.len() {
        for n in (m + 1)..states.len() {
            let prod = states[m].matrix() * states[n].matrix();
            worst = worst.max(linalg::frobenius(&prod));
        }
    }
    Ok(DistinguishabilityReport {
        verdict: worst < tol,
        max_pairwise_residual: worst,
        tolerance: tol,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> ComplexVector {
        linalg::ket(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
    }
    fn minus() -> ComplexVector {
        linalg::ket(&[c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)])
    }

    #[test]
    fn fourier_small_cases() {
        assert!((fourier_matrix(1).matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        let f2 = fourier_matrix(2);
        let expected = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
        )
        .scale(FRAC_1_SQRT_2);
        assert!(linalg::frobenius(&(f2.matrix() - expected)) < 1e-15);
        let f4 = fourier_matrix(4);
        let prod = f4.matrix() * f4.matrix().adjoint();
        assert!(linalg::frobenius(&(prod - linalg::identity(4))) < 1e-14);
    }

    #[test]
    fn fourier_unitary_and_flat_up_to_32() {
        for d in 1..=32 {
            let f = fourier_matrix(d);
            assert!(linalg::unitarity_defect(f.matrix()) < 1e-12, "d={d}");
            for z in f.matrix().iter() {
                assert!((z.norm_sqr() - 1.0 / d as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_unitaries() {
        let d1 = diagonal_unitary(2, 0).unwrap();
        assert!(linalg::frobenius(&(d1.matrix() - linalg::identity(2))) < 1e-15);
        let d2 = diagonal_unitary(2, 1).unwrap();
        assert!((d2.matrix()[(1, 1)] - c(-1.0, 0.0)).norm() < 1e-15);
        let d3 = diagonal_unitary(3, 1).unwrap();
        let w = cis(2.0 * PI / 3.0);
        assert!((d3.matrix()[(1, 1)] - w).norm() < 1e-15);
        assert!((d3.matrix()[(2, 2)] - w * w).norm() < 1e-15);
        assert!(matches!(
            diagonal_unitary(3, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn vectorization_is_row_wise() {
        let v = vectorize(&linalg::identity(2)).unwrap();
        let expect = [1.0, 0.0, 0.0, 1.0];
        for (z, e) in v.iter().zip(expect) {
            assert_eq!(*z, c(e, 0.0));
        }
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        );
        let v = vectorize(&m).unwrap();
        assert_eq!(v[1], c(2.0, 0.0));
        assert_eq!(v[2], c(3.0, 0.0));
        assert_eq!(unvectorize(&v).unwrap(), m);
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(vectorize(&rect).is_err());
    }

    #[test]
    fn decoherence_of_plus() {
        let rho = DensityMatrix::pure(&plus()).unwrap();
        let dec = decohere_state(&rho);
        let expect = linalg::diag(&[c(0.5, 0.0), c(0.5, 0.0)]);
        assert!(linalg::frobenius(&(dec.matrix() - expect)) < 1e-15);
        assert_eq!(decohere_state(&dec), dec);
    }

    #[test]
    fn classical_versions() {
        let zero = DensityMatrix::pure(&linalg::basis(3, 0)).unwrap();
        assert_eq!(classical_version(&zero).as_slice(), &[1.0, 0.0, 0.0]);
        let f = fourier_matrix(3);
        let col = f.matrix().column(0).into_owned();
        let p = classical_version(&DensityMatrix::pure(&col).unwrap());
        for x in p.as_slice() {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn distances() {
        let p = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        let q = ProbabilityVector::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(total_variation(&p, &q).unwrap(), 1.0);
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        let a = ProbabilityVector::new(vec![0.7, 0.3]).unwrap();
        let b = ProbabilityVector::new(vec![0.4, 0.6]).unwrap();
        assert!((total_variation(&a, &b).unwrap() - 0.3).abs() < 1e-15);

        let zero = DensityMatrix::pure(&linalg::basis(2, 0)).unwrap();
        let one = DensityMatrix::pure(&linalg::basis(2, 1)).unwrap();
        let plus = DensityMatrix::pure(&plus()).unwrap();
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-14);
        assert!((trace_distance(&zero, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn classical_channel_probabilities() {
        let id = StochasticMatrix::identity(2);
        let not = StochasticMatrix::from_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let w = StochasticMatrix::van_der_waerden(2);
        assert_eq!(classical_channel_distinguish_prob(&id, &id).unwrap(), 0.5);
        assert_eq!(classical_channel_distinguish_prob(&id, &not).unwrap(), 1.0);
        assert!((classical_channel_distinguish_prob(&id, &w).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn orthogonality_reports() {
        let basis: Vec<_> = (0..3)
            .map(|k| DensityMatrix::pure(&linalg::basis(3, k)).unwrap())
            .collect();
        assert!(mutually_orthogonal(&basis, tol::ORTHOGONAL).unwrap().verdict);

        let pm = [
            DensityMatrix::pure(&plus()).unwrap(),
            DensityMatrix::pure(&minus()).unwrap(),
        ];
        assert!(mutually_orthogonal(&pm, tol::ORTHOGONAL).unwrap().verdict);

        let zp = [
            DensityMatrix::pure(&linalg::basis(2, 0)).unwrap(),
            DensityMatrix::pure(&plus()).unwrap(),
        ];
        let rep = mutually_orthogonal(&zp, tol::ORTHOGONAL).unwrap();
        assert!(!rep.verdict);
        // ||P0 P+||_F = |<0|+>| = 1/sqrt(2)
        assert!((rep.max_pairwise_residual - FRAC_1_SQRT_2).abs() < 1e-14);

        assert!(matches!(
            mutually_orthogonal(&[], tol::ORTHOGONAL),
            Err(Error::Empty(_))
        ));
    }
}
