//! JSON interchange: complex matrices as nested `[re, im]` pairs.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channels::ChannelFamily;
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, ComplexVector};
use crate::quantum::{DistinguishabilityReport, QuantumChannel, StochasticMatrix, Witness};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;
pub type VectorJson = Vec<[f64; 2]>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if n == 0 || cols == 0 {
        return Err(Error::Empty("matrix"));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            found: bad.len(),
        });
    }
    Ok(ComplexMatrix::from_fn(n, cols, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_to_json(v: &ComplexVector) -> VectorJson {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(v: &VectorJson) -> Result<ComplexVector> {
    if v.is_empty() {
        return Err(Error::Empty("vector"));
    }
    Ok(ComplexVector::from_iterator(v.len(), v.iter().map(|p| c(p[0], p[1]))))
}

/// Real matrix given either as plain numbers or as `[re, im]` pairs with zero
/// imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealMatrixJson {
    Real(Vec<Vec<f64>>),
    Complex(MatrixJson),
}

impl RealMatrixJson {
    pub fn to_real(&self) -> Result<DMatrix<f64>> {
        let rows: Vec<Vec<f64>> = match self {
            Self::Real(r) => r.clone(),
            Self::Complex(m) => m
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&[re, im]| {
                            if im.abs() > 1e-15 {
                                Err(Error::NotStochastic(format!("complex entry {re}+{im}i")))
                            } else {
                                Ok(re)
                            }
                        })
                        .collect()
                })
                .collect::<Result<_>>()?,
        };
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if n == 0 || cols == 0 {
            return Err(Error::Empty("matrix"));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
    }

    pub fn to_stochastic(&self) -> Result<StochasticMatrix> {
        StochasticMatrix::new(self.to_real()?)
    }
}

pub fn real_matrix_to_json(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            dim: ch.dim(),
            kraus: ch.kraus().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let kraus = self.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        let ch = QuantumChannel::new(kraus)?;
        if ch.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: ch.dim(),
            });
        }
        Ok(ch)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub entangled: bool,
    pub state: VectorJson,
}

impl WitnessJson {
    pub fn from_witness(w: &Witness) -> Self {
        Self {
            entangled: w.entangled,
            state: vector_to_json(&w.state),
        }
    }

    pub fn to_witness(&self) -> Result<Witness> {
        Ok(Witness {
            entangled: self.entangled,
            state: vector_from_json(&self.state)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dim: usize,
    pub action: RealMatrixJson,
    pub members: Vec<ChannelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

impl FamilyJson {
    pub fn from_family(f: &ChannelFamily) -> Self {
        Self {
            dim: f.dim(),
            action: RealMatrixJson::Real(real_matrix_to_json(f.shared_action().matrix())),
            members: f.members().iter().map(ChannelJson::from_channel).collect(),
            witness: f.witness().map(WitnessJson::from_witness),
        }
    }

    pub fn to_family(&self) -> Result<ChannelFamily> {
        let members = self.members.iter().map(ChannelJson::to_channel).collect::<Result<Vec<_>>>()?;
        let action = self.action.to_stochastic()?;
        if action.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: action.dim(),
            });
        }
        let witness = self.witness.as_ref().map(WitnessJson::to_witness).transpose()?;
        ChannelFamily::new(members, action, witness)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub verdict: bool,
    pub max_pairwise_residual: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

impl From<&DistinguishabilityReport> for ReportJson {
    fn from(r: &DistinguishabilityReport) -> Self {
        Self {
            verdict: r.verdict,
            max_pairwise_residual: r.max_pairwise_residual,
            tolerance: r.tolerance,
            witness: r.witness.as_ref().map(WitnessJson::from_witness),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{qubit_pair, w_family, QubitAction};

    #[test]
    fn matrix_roundtrip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64 - 0.5));
        let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
        assert_eq!(m, back);
        assert!(matrix_from_json(&vec![vec![[1.0, 0.0]], vec![]]).is_err());
    }

    #[test]
    fn family_roundtrip_through_text() {
        for fam in [w_family(2).unwrap(), qubit_pair(&QubitAction::new(0.7, 0.4).unwrap()).unwrap()] {
            let text = serde_json::to_string(&FamilyJson::from_family(&fam)).unwrap();
            let back: FamilyJson = serde_json::from_str(&text).unwrap();
            let fam2 = back.to_family().unwrap();
            assert_eq!(fam2.len(), fam.len());
            assert!(fam2.verify(1e-10).unwrap().verdict);
        }
    }

    #[test]
    fn stochastic_accepts_real_or_complex() {
        let real: RealMatrixJson = serde_json::from_str("[[0.5, 1.0], [0.5, 0.0]]").unwrap();
        let cplx: RealMatrixJson =
            serde_json::from_str("[[[0.5, 0], [1.0, 0]], [[0.5, 0], [0.0, 0]]]").unwrap();
        assert_eq!(real.to_stochastic().unwrap(), cplx.to_stochastic().unwrap());
        let bad: RealMatrixJson = serde_json::from_str("[[[0.5, 0.1], [1.0, 0]], [[0.5, 0], [0.0, 0]]]").unwrap();
        assert!(bad.to_stochastic().is_err());
    }

    #[test]
    fn channel_json_shape() {
        let v = serde_json::to_value(ChannelJson::from_channel(&QuantumChannel::identity(2))).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["kraus"][0][1][1], serde_json::json!([1.0, 0.0]));
    }
}
