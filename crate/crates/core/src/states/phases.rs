use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cis, ComplexVector};
use crate::quantum::ProbabilityVector;

/// `M x d` phases `phi_k^(n)` of candidate pure states
/// `|psi^(n)> = sum_k sqrt(p_k) e^{i phi_k^(n)} |k>`, with row 0 and column 0
/// fixed to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseAssignment {
    m: usize,
    d: usize,
    phases: Vec<Vec<f64>>,
}

impl PhaseAssignment {
    /// Checks shape and gauge.
    pub fn new(phases: Vec<Vec<f64>>) -> Result<Self> {
        let m = phases.len();
        if m == 0 {
            return Err(Error::Empty("phase assignment"));
        }
        let d = phases[0].len();
        if d == 0 || phases.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidParameter("ragged phase matrix".into()));
        }
        let gauge_ok = phases[0].iter().all(|&x| x == 0.0) && phases.iter().all(|r| r[0] == 0.0);
        if !gauge_ok {
            return Err(Error::InvalidParameter(
                "phases must vanish on the first row and column".into(),
            ));
        }
        if phases.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite phase".into()));
        }
        Ok(Self { m, d, phases })
    }

    /// Brings arbitrary phases into the gauge by subtracting row 0 from every
    /// row and then column 0 from each row, and wraps into `[0, 2 pi)`.
    pub fn gauge_fixed(raw: &DMatrix<f64>) -> Self {
        let (m, d) = raw.shape();
        let tau = std::f64::consts::TAU;
        let phases = (0..m)
            .map(|n| {
                (0..d)
                    .map(|k| {
                        let x = raw[(n, k)] - raw[(0, k)] - raw[(n, 0)] + raw[(0, 0)];
                        let w = x.rem_euclid(tau);
                        if n == 0 || k == 0 || w == tau {
                            0.0
                        } else {
                            w
                        }
                    })
                    .collect()
            })
            .collect();
        Self { m, d, phases }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.phases
    }

    pub fn phase(&self, n: usize, k: usize) -> f64 {
        self.phases[n][k]
    }

    pub fn states(&self, p: &ProbabilityVector) -> Result<Vec<ComplexVector>> {
        if p.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: p.dim(),
            });
        }
        Ok(self
            .phases
            .iter()
            .map(|row| {
                ComplexVector::from_fn(self.d, |k, _| c(p[k].sqrt(), 0.0) * cis(row[k]))
            })
            .collect())
    }

    /// `sqrt(sum_{m<n} |<psi^(m)|psi^(n)>|^2)`.
    pub fn residual(&self, p: &ProbabilityVector) -> Result<f64> {
        let states = self.states(p)?;
        Ok(pairwise_residual(&states))
    }
}

/// Root of the summed squared off-diagonal overlaps.
pub fn pairwise_residual(states: &[ComplexVector]) -> f64 {
    let mut acc = 0.0;
    for m in 0..states.len() {
        for n in m + 1..states.len() {
            acc += linalg::inner(&states[m], &states[n]).norm_sqr();
        }
    }
    acc.sqrt()
}
