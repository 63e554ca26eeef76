use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, c, cis, ComplexMatrix};
use crate::quantum::{StochasticMatrix, UnitaryMatrix};
use crate::random::task_rng;
use crate::states::phase_search::SearchOptions;

const BATCH: usize = 8;
const STALL_WINDOW: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct UnistochasticCertificate {
    pub unitary: UnitaryMatrix,
    /// `||U o conj(U) - B||_F`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnistochasticOutcome {
    Certified(UnistochasticCertificate),
    Unknown { residual: f64, restarts_used: usize },
}

impl UnistochasticOutcome {
    pub fn residual(&self) -> f64 {
        match self {
            Self::Certified(c) => c.residual,
            Self::Unknown { residual, .. } => *residual,
        }
    }

    pub fn certificate(&self) -> Option<&UnistochasticCertificate> {
        match self {
            Self::Certified(c) => Some(c),
            Self::Unknown { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnistochasticVerdict {
    Certified,
    Unknown,
}

impl From<&UnistochasticOutcome> for UnistochasticVerdict {
    fn from(o: &UnistochasticOutcome) -> Self {
        match o {
            UnistochasticOutcome::Certified(_) => Self::Certified,
            UnistochasticOutcome::Unknown { .. } => Self::Unknown,
        }
    }
}

/// One-sided unistochasticity oracle by alternating projections: impose the
/// moduli `sqrt(B)`, project onto the unitaries (polar factor), keep the phases.
pub fn is_unistochastic(b: &StochasticMatrix, opts: &SearchOptions) -> Result<UnistochasticOutcome> {
    let d = b.dim();
    let moduli = b.matrix().map(f64::sqrt);
    let mut best: Option<(f64, ComplexMatrix)> = None;
    let mut used = 0;
    let mut start = 0;
    let restarts = opts.restarts.max(1);
    while start < restarts {
        let end = (start + BATCH).min(restarts);
        let runs: Vec<(f64, ComplexMatrix)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = task_rng(opts.seed, i as u64);
                let theta = DMatrix::from_fn(d, d, |_, _| rng.random_range(0.0..std::f64::consts::TAU));
                iterate(b.matrix(), &moduli, theta, opts)
            })
            .collect();
        let mut done = false;
        for (offset, (res, u)) in runs.into_iter().enumerate() {
            used = start + offset + 1;
            if best.as_ref().is_none_or(|(r, _)| res < *r) {
                best = Some((res, u));
            }
            if res < opts.tol_success {
                done = true;
                break;
            }
        }
        if done {
            break;
        }
        start = end;
    }
    let (residual, u) = best.expect("at least one restart");
    if residual < opts.tol_success {
        if let Ok(unitary) = UnitaryMatrix::new(u) {
            return Ok(UnistochasticOutcome::Certified(UnistochasticCertificate { unitary, residual }));
        }
    }
    Ok(UnistochasticOutcome::Unknown {
        residual,
        restarts_used: used,
    })
}

fn mismatch(u: &ComplexMatrix, b: &DMatrix<f64>) -> f64 {
    (u.map(|z| z.norm_sqr()) - b).norm()
}

fn iterate(
    b: &DMatrix<f64>,
    moduli: &DMatrix<f64>,
    mut theta: DMatrix<f64>,
    opts: &SearchOptions,
) -> (f64, ComplexMatrix) {
    let d = b.nrows();
    let mut best = (f64::INFINITY, linalg::identity(d));
    let mut window_start = f64::INFINITY;
    for it in 0..opts.max_iter.max(1) {
        let a = ComplexMatrix::from_fn(d, d, |i, j| c(moduli[(i, j)], 0.0) * cis(theta[(i, j)]));
        let u = linalg::nearest_unitary(&a);
        let res = mismatch(&u, b);
        theta = u.map(|z| z.arg());
        if res < best.0 {
            best = (res, u);
        }
        if best.0 < opts.tol_success * 1e-2 {
            break;
        }
        if it % STALL_WINDOW == 0 {
            // linear convergence towards a non-zero fixed point: give up
            if best.0 > opts.tol_success && best.0 > 0.999 * window_start {
                break;
            }
            window_start = best.0;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::fourier_matrix;

    #[test]
    fn van_der_waerden_is_certified() {
        for d in [2, 3, 4, 5] {
            let out = is_unistochastic(&StochasticMatrix::van_der_waerden(d), &SearchOptions::default()).unwrap();
            let cert = out.certificate().expect("certified");
            assert!(cert.residual < 1e-10);
            assert!(linalg::unitarity_defect(cert.unitary.matrix()) < 1e-10);
        }
        let f = fourier_matrix(4).unistochastic();
        assert!(f.max_abs_diff(&StochasticMatrix::van_der_waerden(4)) < 1e-15);
    }

    #[test]
    fn two_by_two_bistochastic_certified() {
        for a in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
            let t = StochasticMatrix::from_rows(2, &[a, 1.0 - a, 1.0 - a, a]).unwrap();
            let out = is_unistochastic(&t, &SearchOptions::default()).unwrap();
            assert!(out.certificate().is_some(), "a = {a}: {}", out.residual());
        }
    }

    #[test]
    fn zero_diagonal_three_is_unknown() {
        let t = StochasticMatrix::from_rows(3, &[0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]).unwrap();
        let opts = SearchOptions {
            restarts: 10,
            ..Default::default()
        };
        let out = is_unistochastic(&t, &opts).unwrap();
        assert!(out.certificate().is_none());
        assert!(out.residual() > 1e-3);
    }
}
