use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector};
use crate::quantum::ops::vectorize;
use crate::quantum::types::{DensityMatrix, StochasticMatrix, UnitaryMatrix};
use crate::tol;

/// CPTP map on `d x d` matrices held as a Kraus list, with its
/// Jamiolkowski state cached.
///
/// Tensor ordering throughout is `output (x) reference`, so
/// `J = (1/d) sum_k |K_k>><<K_k|` with row-wise vectorization.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::Empty("Kraus list"))?;
        let d = linalg::ensure_square(first)?;
        if d == 0 {
            return Err(Error::Empty("Kraus operator"));
        }
        for k in &kraus {
            if linalg::ensure_square(k)? != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.nrows(),
                });
            }
        }
        let deviation = completeness_defect(&kraus, d);
        if !(deviation < tol::UNITARY) {
            return Err(Error::KrausIncomplete { deviation });
        }
        let choi = choi_from_kraus(&kraus, d);
        Ok(Self {
            dim: d,
            kraus,
            choi,
        })
    }

    /// Rebuilds a channel from a Jamiolkowski state (trace one, `tr_1 J = 1/d`).
    ///
    /// Eigenvalues of `d J` below `1e-12` are dropped, and the remaining
    /// operators are re-normalized so that `sum K^dagger K = 1` holds exactly.
    /// The reconstruction must reproduce `J` within `1e-10`.
    pub fn from_choi(choi: &ComplexMatrix) -> Result<Self> {
        let n = linalg::ensure_square(choi)?;
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n || d == 0 {
            return Err(Error::InvalidParameter(format!(
                "Choi matrix of size {n} is not d^2 x d^2"
            )));
        }
        let herm = linalg::hermiticity_defect(choi);
        if herm > tol::UNITARY {
            return Err(Error::InvalidDensity(format!(
                "Choi matrix not Hermitian ({herm:.3e})"
            )));
        }
        let reduced = linalg::partial_trace_first(choi, d, d);
        let tp = linalg::frobenius(&(reduced - linalg::identity(d).scale(1.0 / d as f64)));
        if tp > tol::UNITARY {
            return Err(Error::KrausIncomplete { deviation: tp });
        }
        let scaled = choi.scale(d as f64);
        let (values, vectors) = linalg::hermitian_eigen(&scaled);
        if values[0] < -tol::PSD {
            return Err(Error::Internal(format!(
                "Jamiolkowski state has negative eigenvalue {:.3e}",
                values[0]
            )));
        }
        let mut kraus = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v < tol::KRAUS_EIG {
                continue;
            }
            let col = vectors.column(i).into_owned() * c(v.sqrt(), 0.0);
            kraus.push(ComplexMatrix::from_fn(d, d, |a, b| col[a * d + b]));
        }
        if kraus.is_empty() {
            return Err(Error::Internal("Choi matrix has no support".into()));
        }
        let sum = completeness_sum(&kraus, d);
        let fix = linalg::inverse_sqrt_psd(&sum)?;
        let kraus: Vec<_> = kraus.into_iter().map(|k| k * &fix).collect();
        let channel = Self::new(kraus)?;
        let err = linalg::frobenius(&(channel.jamiolkowski() - choi));
        if err > tol::UNITARY {
            return Err(Error::Internal(format!(
                "Kraus reconstruction misses the Choi matrix by {err:.3e}"
            )));
        }
        Ok(channel)
    }

    pub fn unitary(u: &UnitaryMatrix) -> Self {
        Self::new(vec![u.matrix().clone()]).expect("unitary channel is CPTP")
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(&UnitaryMatrix::identity(d))
    }

    /// The map zeroing all off-diagonal entries.
    pub fn completely_decohering(d: usize) -> Self {
        let kraus = (0..d).map(|k| linalg::projector(&linalg::basis(d, k))).collect();
        Self::new(kraus).expect("projective measurement is CPTP")
    }

    /// Classical channel with Kraus operators `sqrt(T_ij) |i><j|`.
    pub fn classical(t: &StochasticMatrix) -> Self {
        let d = t.dim();
        let mut kraus = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                if t[(i, j)] > 0.0 {
                    let mut k = ComplexMatrix::zeros(d, d);
                    k[(i, j)] = c(t[(i, j)].sqrt(), 0.0);
                    kraus.push(k);
                }
            }
        }
        Self::new(kraus).expect("stochastic matrix defines a channel")
    }

    /// `rho -> after . Phi(before rho before^dagger) . after^dagger`.
    pub fn conjugated(&self, before: &ComplexMatrix, after: &ComplexMatrix) -> Result<Self> {
        Self::new(self.kraus.iter().map(|k| after * k * before).collect())
    }

    /// Composition `next . self`.
    pub fn then(&self, next: &QuantumChannel) -> Result<Self> {
        if next.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: next.dim,
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Self::new(kraus)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `J = (1/d) (Phi (x) I)|Omega><Omega|`.
    pub fn jamiolkowski(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// `T_kl = <k|Phi(|l><l|)|k> = sum_i |K_i[k, l]|^2`.
    pub fn classical_action(&self) -> StochasticMatrix {
        let d = self.dim;
        let mut t = DMatrix::zeros(d, d);
        for k in &self.kraus {
            t += k.map(|z| z.norm_sqr());
        }
        StochasticMatrix::new(t).expect("Kraus completeness implies column-stochastic action")
    }

    /// The classical channel `D . Phi . D`.
    pub fn decohere(&self) -> Self {
        Self::classical(&self.classical_action())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.matrix())))
    }

    pub(crate) fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }

    /// `(Phi (x) I)(|psi><psi|)` for a normalized bipartite ket on `d (x) d`;
    /// the channel acts on the first factor.
    pub fn apply_extended(&self, psi: &ComplexVector) -> Result<DensityMatrix> {
        let d = self.dim;
        if psi.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: psi.len(),
            });
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("bipartite ket has norm {norm}")));
        }
        let id = linalg::identity(d);
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.kraus {
            let v = linalg::kron(k, &id) * psi;
            out += linalg::projector(&v);
        }
        Ok(DensityMatrix::from_trusted(out))
    }
}

fn completeness_sum(kraus: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let mut sum = ComplexMatrix::zeros(d, d);
    for k in kraus {
        sum += k.adjoint() * k;
    }
    sum
}

fn completeness_defect(kraus: &[ComplexMatrix], d: usize) -> f64 {
    linalg::frobenius(&(completeness_sum(kraus, d) - linalg::identity(d)))
}

fn choi_from_kraus(kraus: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(d * d, d * d);
    for k in kraus {
        let v = vectorize(k).expect("Kraus operators are square");
        j += linalg::projector(&v);
    }
    j.scale(1.0 / d as f64)
}

/// `(Phi (x) I)(|psi><psi|) = (1 (x) [psi]^T) d J (1 (x) [psi]^T)^dagger`
/// where `[psi]` reshapes `|jk> -> |j><k|`.
pub fn extended_output_from_choi(choi: &ComplexMatrix, psi: &ComplexVector) -> Result<ComplexMatrix> {
    let n = linalg::ensure_square(choi)?;
    let d = (n as f64).sqrt().round() as usize;
    if psi.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: psi.len(),
        });
    }
    let shaped = ComplexMatrix::from_fn(d, d, |j, k| psi[j * d + k]);
    let op = linalg::kron(&linalg::identity(d), &shaped.transpose());
    Ok(&op * choi.scale(d as f64) * op.adjoint())
}
