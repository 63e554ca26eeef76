use crate::channels::family::ChannelFamily;
use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector};
use crate::quantum::{
    diagonal_unitary, ProbabilityVector, QuantumChannel, StochasticMatrix, Witness,
};
use crate::states::{pairwise_residual, PhaseAssignment};
use crate::tol;

/// `rho -> rho o X` for a correlation matrix `X` (positive, unit diagonal).
///
/// Kraus operators are `sqrt(mu_i) diag(v_i)` from `X = sum mu_i v_i v_i^dagger`.
pub fn schur_channel(x: &ComplexMatrix) -> Result<QuantumChannel> {
    let d = linalg::ensure_square(x)?;
    let herm = linalg::hermiticity_defect(x);
    if herm > tol::HERMITIAN {
        return Err(Error::NotCorrelation(format!("not Hermitian (defect {herm:.3e})")));
    }
    if let Some(k) = (0..d).find(|&k| (x[(k, k)] - c(1.0, 0.0)).norm() > tol::SUM) {
        return Err(Error::NotCorrelation(format!("diagonal entry {k} is {}", x[(k, k)])));
    }
    let (vals, vecs) = linalg::hermitian_eigen(x);
    if vals[0] < -tol::PSD {
        return Err(Error::NotCorrelation(format!("negative eigenvalue {:.3e}", vals[0])));
    }
    let kraus: Vec<ComplexMatrix> = vals
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > tol::KRAUS_EIG)
        .map(|(i, &mu)| {
            let col: Vec<_> = vecs.column(i).iter().map(|z| z * mu.sqrt()).collect();
            linalg::diag(&col)
        })
        .collect();
    QuantumChannel::new(kraus)
}

fn shift(d: usize, alpha: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + alpha) % d {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `sum_alpha lambda_alpha X^alpha` with `X|k> = |k+1 mod d>`.
pub fn circulant(lambda: &ProbabilityVector) -> StochasticMatrix {
    let d = lambda.dim();
    StochasticMatrix::new(nalgebra::DMatrix::from_fn(d, d, |i, j| lambda[(i + d - j) % d]))
        .expect("convex combination of permutations")
}

/// `d` channels with Kraus operators `sqrt(lambda_alpha) X^alpha D^(n)`, i.e.
/// Jamiolkowski states `sum_alpha lambda_alpha |psi_alpha^n><psi_alpha^n|` with
/// `|psi_alpha^n> = (1/sqrt d) sum_k w^{nk} |k + alpha, k>`. All share the
/// circulant action and map `|+>` to the Fourier basis.
pub fn circulant_family(lambda: &ProbabilityVector) -> Result<ChannelFamily> {
    let d = lambda.dim();
    let members = (0..d)
        .map(|n| {
            let dn = diagonal_unitary(d, n)?;
            let kraus = (0..d)
                .filter(|&a| lambda[a] > 0.0)
                .map(|a| (shift(d, a) * dn.matrix()).scale(lambda[a].sqrt()))
                .collect();
            QuantumChannel::new(kraus)
        })
        .collect::<Result<Vec<_>>>()?;
    let plus = ComplexVector::from_element(d, c(1.0 / (d as f64).sqrt(), 0.0));
    ChannelFamily::new(members, circulant(lambda), Some(Witness::product(plus)))
}

/// Index of the first column whose largest entry is at most half its sum.
pub fn triangle_column(t: &StochasticMatrix) -> Option<usize> {
    (0..t.dim()).find(|&l| t.column(l).iter().fold(0.0f64, |m, &x| m.max(x)) <= 0.5 + tol::BOUNDARY)
}

/// Channels with Kraus operators `|psi_j^(n)><j|`, `psi_j^(n) = sum_k
/// sqrt(T_kj) e^{i phi_k^(n)} |k>`, using one phase row per member for every
/// column. Input `|l>` separates them when the phases orthogonalize column `l`.
pub fn column_family(t: &StochasticMatrix, l: usize, phases: &PhaseAssignment) -> Result<ChannelFamily> {
    let d = t.dim();
    if l >= d {
        return Err(Error::IndexOutOfRange { index: l, dim: d });
    }
    if phases.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: phases.d(),
        });
    }
    let columns: Vec<ProbabilityVector> = (0..d)
        .map(|j| ProbabilityVector::new(t.column(j)))
        .collect::<Result<_>>()?;
    let residual = pairwise_residual(&phases.states(&columns[l])?);
    if !(residual < tol::ORTHOGONAL) {
        return Err(Error::NotOrthogonal { residual });
    }
    let members = (0..phases.m())
        .map(|n| {
            let mut k = ComplexMatrix::zeros(d, d);
            for (j, col) in columns.iter().enumerate() {
                for i in 0..d {
                    k[(i, j)] = linalg::cis(phases.phase(n, i)) * col[i].sqrt();
                }
            }
            // one Kraus operator |psi_j><j| per column
            let kraus = (0..d)
                .map(|j| {
                    let mut kj = ComplexMatrix::zeros(d, d);
                    kj.set_column(j, &k.column(j));
                    kj
                })
                .collect();
            QuantumChannel::new(kraus)
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(members, t.clone(), Some(Witness::product(linalg::basis(d, l))))
}
