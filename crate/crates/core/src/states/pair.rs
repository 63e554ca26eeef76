use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cis, ComplexVector};
use crate::quantum::{fourier_matrix, ProbabilityVector, UnitaryMatrix};
use crate::states::permutohedron::CoarseGraining;
use crate::states::phase_search::{phase_search, SearchOptions};
use crate::states::phases::PhaseAssignment;
use crate::tol;

/// Two orthogonal pure states with classical version `p`, from a closed
/// polygon with sides `p_k`.
///
/// Entries are packed into three groups (longest-processing-time greedy);
/// the group sums close a triangle whose angles fix the group phases.
pub fn construct_pair(p: &ProbabilityVector) -> Result<PhaseAssignment> {
    let max = p.max();
    if max > 0.5 + tol::BOUNDARY {
        return Err(Error::PermutohedronViolation { max, m: 2 });
    }
    let d = p.dim();
    if d < 2 {
        return Err(Error::PermutohedronViolation { max, m: 2 });
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    let mut sums = [0.0f64; 3];
    let mut group = vec![0usize; d];
    for &k in &order {
        let g = (0..3)
            .min_by(|&a, &b| sums[a].total_cmp(&sums[b]).then(a.cmp(&b)))
            .expect("three bins");
        sums[g] += p[k];
        group[k] = g;
    }
    if sums.iter().any(|&s| s > 0.5 + tol::BOUNDARY) {
        return fallback(p);
    }
    let mut bins = [0usize, 1, 2];
    bins.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
    let (l1, l2, l3) = (sums[bins[0]], sums[bins[1]], sums[bins[2]]);
    let mut angle = [0.0f64; 3];
    if l3 <= 0.0 {
        angle[bins[1]] = PI;
    } else {
        let cos_beta = ((l3 * l3 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0);
        let beta = cos_beta.acos();
        let closing = -(c(l1, 0.0) + cis(beta) * l2) / l3;
        angle[bins[1]] = beta;
        angle[bins[2]] = closing.arg();
    }
    let raw = DMatrix::from_fn(2, d, |n, k| if n == 0 { 0.0 } else { angle[group[k]] });
    let phases = PhaseAssignment::gauge_fixed(&raw);
    let residual = phases.residual(p)?;
    if residual >= tol::ORTHOGONAL {
        return fallback(p);
    }
    Ok(phases)
}

fn fallback(p: &ProbabilityVector) -> Result<PhaseAssignment> {
    let r = phase_search(p, 2, &SearchOptions::default())?;
    if !r.found() {
        return Err(Error::NotOrthogonal { residual: r.residual });
    }
    Ok(r.phases)
}

/// The columns `F|k>` of the Fourier matrix.
pub fn construct_fourier_set(d: usize) -> Vec<ComplexVector> {
    let f = fourier_matrix(d);
    (0..d).map(|k| f.matrix().column(k).into_owned()).collect()
}

/// Unitary whose first columns are the given orthonormal states.
pub fn states_to_unitary(states: &[ComplexVector]) -> Result<UnitaryMatrix> {
    let first = states.first().ok_or(Error::Empty("state list"))?;
    let d = first.len();
    if let Some(bad) = states.iter().find(|s| s.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    if states.len() > d {
        return Err(Error::InvalidParameter(format!(
            "{} states cannot be orthonormal in dimension {d}",
            states.len()
        )));
    }
    let residual = linalg::gram_defect(states);
    if !(residual < tol::ORTHOGONAL) {
        return Err(Error::NotOrthogonal { residual });
    }
    UnitaryMatrix::new(linalg::complete_unitary(states, d))
}

/// Lifts orthogonal states for the coarse-grained `q = G p` back to `p`: entry
/// `k` inherits the phase of the row of `G` it is merged into.
pub fn lift_coarse_grained(
    p: &ProbabilityVector,
    g: &CoarseGraining,
    phases: &PhaseAssignment,
) -> Result<Vec<ComplexVector>> {
    let q = g.apply(p)?;
    if phases.d() != g.rows() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            found: phases.d(),
        });
    }
    let residual = phases.residual(&q)?;
    if !(residual < tol::ORTHOGONAL) {
        return Err(Error::NotOrthogonal { residual });
    }
    Ok(phases
        .rows()
        .iter()
        .map(|row| {
            ComplexVector::from_fn(p.dim(), |k, _| {
                c(p[k].sqrt(), 0.0) * cis(row[g.target()[k]])
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::ket_classical_version;
    use crate::states::phases::pairwise_residual;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    fn close_phase(a: f64, b: f64) -> bool {
        let d = (a - b).rem_euclid(std::f64::consts::TAU);
        d < 1e-12 || std::f64::consts::TAU - d < 1e-12
    }

    #[test]
    fn two_halves() {
        let ph = construct_pair(&pv(&[0.5, 0.5])).unwrap();
        assert!(close_phase(ph.phase(1, 0), 0.0) && close_phase(ph.phase(1, 1), PI));
        assert!(ph.residual(&pv(&[0.5, 0.5])).unwrap() < 1e-15);
    }

    #[test]
    fn degenerate_polygon() {
        let p = pv(&[0.5, 0.25, 0.25]);
        let ph = construct_pair(&p).unwrap();
        assert!(close_phase(ph.phase(1, 1), PI) && close_phase(ph.phase(1, 2), PI));
        assert!(ph.residual(&p).unwrap() < 1e-15);
    }

    #[test]
    fn states_keep_classical_version() {
        let p = pv(&[0.1, 0.2, 0.3, 0.15, 0.25]);
        let ph = construct_pair(&p).unwrap();
        for s in ph.states(&p).unwrap() {
            for (x, y) in ket_classical_version(&s).iter().zip(p.as_slice()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn violation_rejected() {
        assert!(matches!(
            construct_pair(&pv(&[0.6, 0.4])),
            Err(Error::PermutohedronViolation { .. })
        ));
    }

    #[test]
    fn fourier_sets() {
        assert_eq!(construct_fourier_set(1).len(), 1);
        let two = construct_fourier_set(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((two[0][1].re - h).abs() < 1e-15 && (two[1][1].re + h).abs() < 1e-15);
        assert!(linalg::gram_defect(&construct_fourier_set(5)) < 1e-12);
    }

    #[test]
    fn unitary_completion() {
        let u = states_to_unitary(&[linalg::basis(3, 0)]).unwrap();
        assert!((u.matrix().column(0) - linalg::basis(3, 0)).norm() < 1e-15);
        let p = pv(&[0.4, 0.3, 0.2, 0.1]);
        let states = construct_pair(&p).unwrap().states(&p).unwrap();
        let u = states_to_unitary(&states).unwrap();
        let b = u.unistochastic();
        for l in 0..2 {
            for k in 0..4 {
                assert!((b[(k, l)] - p[k]).abs() < 1e-10);
            }
        }
        let bad = [linalg::basis(2, 0), linalg::basis(2, 0)];
        assert!(matches!(states_to_unitary(&bad), Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn lift_uniform_to_pair() {
        let p = ProbabilityVector::uniform(4);
        let g = CoarseGraining::new(2, vec![0, 0, 1, 1]).unwrap();
        let q = g.apply(&p).unwrap();
        let ph = construct_pair(&q).unwrap();
        let lifted = lift_coarse_grained(&p, &g, &ph).unwrap();
        assert!(pairwise_residual(&lifted) < 1e-12);
        let id = CoarseGraining::new(4, vec![0, 1, 2, 3]).unwrap();
        let p4 = pv(&[0.4, 0.3, 0.2, 0.1]);
        let ph4 = construct_pair(&p4).unwrap();
        assert_eq!(lift_coarse_grained(&p4, &id, &ph4).unwrap(), ph4.states(&p4).unwrap());
    }
}
