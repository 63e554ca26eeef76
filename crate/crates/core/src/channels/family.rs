use crate::error::{Error, Result};
use crate::linalg::ComplexVector;
use crate::quantum::{
    mutually_orthogonal, DensityMatrix, DistinguishabilityReport, QuantumChannel, StochasticMatrix,
    Witness,
};
use crate::tol;

/// Channels sharing one classical action, optionally with an input that
/// distinguishes them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFamily {
    dim: usize,
    members: Vec<QuantumChannel>,
    shared_action: StochasticMatrix,
    witness: Option<Witness>,
}

impl ChannelFamily {
    /// Every member's classical action must match `shared_action` entrywise
    /// within `1e-10`.
    pub fn new(
        members: Vec<QuantumChannel>,
        shared_action: StochasticMatrix,
        witness: Option<Witness>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("channel family"));
        }
        let d = shared_action.dim();
        for ch in &members {
            if ch.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: ch.dim(),
                });
            }
            let deviation = ch.classical_action().max_abs_diff(&shared_action);
            if !(deviation < tol::ACTION) {
                return Err(Error::ActionMismatch { deviation });
            }
        }
        if let Some(w) = &witness {
            let expected = if w.entangled { d * d } else { d };
            if w.state.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: w.state.len(),
                });
            }
        }
        Ok(Self {
            dim: d,
            members,
            shared_action,
            witness,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[QuantumChannel] {
        &self.members
    }

    pub fn shared_action(&self) -> &StochasticMatrix {
        &self.shared_action
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    /// Outputs of every member on `input`.
    pub fn outputs(&self, input: &ComplexVector, entangled: bool) -> Result<Vec<DensityMatrix>> {
        let expected = if entangled { self.dim * self.dim } else { self.dim };
        if input.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: input.len(),
            });
        }
        if entangled {
            self.members.iter().map(|m| m.apply_extended(input)).collect()
        } else {
            let rho = DensityMatrix::pure(input)?;
            self.members.iter().map(|m| m.apply(&rho)).collect()
        }
    }

    /// Runs [`verify_family`] with the stored witness.
    pub fn verify(&self, tol: f64) -> Result<DistinguishabilityReport> {
        let w = self
            .witness
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("family has no witness".into()))?;
        verify_family(self, &w.state, w.entangled, tol)
    }
}

/// Applies every member to `input` (on `d`, or on `d (x) d` with the channel on
/// the first factor) and checks the outputs for pairwise orthogonality.
pub fn verify_family(
    family: &ChannelFamily,
    input: &ComplexVector,
    entangled: bool,
    tol: f64,
) -> Result<DistinguishabilityReport> {
    for ch in &family.members {
        let deviation = ch.classical_action().max_abs_diff(&family.shared_action);
        if !(deviation < tol::ACTION) {
            return Err(Error::ActionMismatch { deviation });
        }
    }
    let outputs = family.outputs(input, entangled)?;
    let mut report = if outputs.len() == 1 {
        DistinguishabilityReport {
            verdict: true,
            max_pairwise_residual: 0.0,
            tolerance: tol,
            witness: None,
        }
    } else {
        mutually_orthogonal(&outputs, tol)?
    };
    report.witness = Some(Witness {
        entangled,
        state: input.clone(),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn classical_members_with_sharp_input_fail() {
        let t = StochasticMatrix::from_rows(2, &[0.7, 0.4, 0.3, 0.6]).unwrap();
        let ch = QuantumChannel::classical(&t);
        let fam = ChannelFamily::new(vec![ch.clone(), ch], t, None).unwrap();
        let r = verify_family(&fam, &linalg::basis(2, 0), false, 1e-10).unwrap();
        assert!(!r.verdict);
        assert!(r.max_pairwise_residual > 0.1);
    }

    #[test]
    fn mismatched_actions_rejected() {
        let t = StochasticMatrix::identity(2);
        let flip = StochasticMatrix::from_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let err = ChannelFamily::new(
            vec![QuantumChannel::identity(2), QuantumChannel::classical(&flip)],
            t,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ActionMismatch { .. }));
    }

    #[test]
    fn wrong_input_dimension() {
        let fam = ChannelFamily::new(
            vec![QuantumChannel::identity(2)],
            StochasticMatrix::identity(2),
            None,
        )
        .unwrap();
        assert!(verify_family(&fam, &linalg::basis(3, 0), false, 1e-10).is_err());
        assert!(verify_family(&fam, &linalg::basis(2, 0), true, 1e-10).is_err());
    }
}
