use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::channels::family::ChannelFamily;
use crate::error::{Error, Result};
use crate::linalg::{self, c, cis, ComplexMatrix, ComplexVector};
use crate::quantum::{
    diagonal_unitary, fourier_matrix, maximally_entangled, QuantumChannel, StochasticMatrix,
    UnitaryMatrix, Witness,
};
use crate::states::{is_unistochastic, SearchOptions, UnistochasticOutcome};

fn unitary_family(
    unitaries: Vec<ComplexMatrix>,
    action: StochasticMatrix,
    witness: Witness,
) -> Result<ChannelFamily> {
    let members = unitaries
        .into_iter()
        .map(|u| Ok(QuantumChannel::unitary(&UnitaryMatrix::new(u)?)))
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(members, action, Some(witness))
}

/// The `d` unitaries `D^(k) U` with the input `U^dagger |+>`; member `k` maps it
/// to the `k`-th Fourier vector.
pub fn unistochastic_family(u: &UnitaryMatrix) -> Result<ChannelFamily> {
    let d = u.dim();
    let plus = ComplexVector::from_element(d, c(1.0 / (d as f64).sqrt(), 0.0));
    let witness = u.matrix().adjoint() * plus;
    let unitaries = (0..d)
        .map(|k| Ok(diagonal_unitary(d, k)?.matrix() * u.matrix()))
        .collect::<Result<Vec<_>>>()?;
    unitary_family(unitaries, u.unistochastic(), Witness::product(witness))
}

/// The `d^2` unitaries `D^(k) F D^(l)^dagger`, ordered `k`-major, all with
/// action `W`; distinguished by `|Omega>/sqrt(d)`.
pub fn w_family(d: usize) -> Result<ChannelFamily> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let f = fourier_matrix(d);
    let mut unitaries = Vec::with_capacity(d * d);
    for k in 0..d {
        let dk = diagonal_unitary(d, k)?;
        for l in 0..d {
            let dl = diagonal_unitary(d, l)?;
            unitaries.push(dk.matrix() * f.matrix() * dl.matrix().adjoint());
        }
    }
    unitary_family(
        unitaries,
        StochasticMatrix::van_der_waerden(d),
        Witness::entangled(maximally_entangled(d)),
    )
}

/// How left and right phase lists combine into family members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Every `(left m, right n)` combination, `m`-major.
    Product,
    /// `left[i]` with `right[i]`.
    Zipped,
}

fn member_phases<'a>(
    left: &'a [Vec<f64>],
    right: &'a [Vec<f64>],
    pairing: Pairing,
) -> Result<Vec<(&'a [f64], &'a [f64])>> {
    match pairing {
        Pairing::Product => Ok(left
            .iter()
            .flat_map(|l| right.iter().map(move |r| (l.as_slice(), r.as_slice())))
            .collect()),
        Pairing::Zipped => {
            if left.len() != right.len() {
                return Err(Error::DimensionMismatch {
                    expected: left.len(),
                    found: right.len(),
                });
            }
            Ok(left.iter().zip(right).map(|(l, r)| (l.as_slice(), r.as_slice())).collect())
        }
    }
}

fn check_phase_lengths(d: usize, members: &[(&[f64], &[f64])]) -> Result<()> {
    for (l, r) in members {
        for v in [l, r] {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
        }
    }
    if members.is_empty() {
        return Err(Error::Empty("phase lists"));
    }
    Ok(())
}

/// `G_ab = tr(V_a^dagger V_b)` for `V = L U R` with diagonal phase unitaries
/// `L = diag(e^{i l_k})`, `R = diag(e^{i r_j})`, evaluated from `T = U o conj(U)`
/// alone:
/// `G_ab = sum_{kj} T_kj conj(L_a,k) L_b,k R_b,j conj(R_a,j)`.
///
/// Vanishing off-diagonal entries mean the unitaries are perfectly
/// distinguishable with input `|Omega>/sqrt(d)`.
pub fn unitary_family_gram(
    t: &StochasticMatrix,
    left: &[Vec<f64>],
    right: &[Vec<f64>],
    pairing: Pairing,
) -> Result<ComplexMatrix> {
    let d = t.dim();
    let members = member_phases(left, right, pairing)?;
    check_phase_lengths(d, &members)?;
    let n = members.len();
    let lv: Vec<Vec<_>> = members.iter().map(|(l, _)| l.iter().map(|&x| cis(x)).collect()).collect();
    let rv: Vec<Vec<_>> = members.iter().map(|(_, r)| r.iter().map(|&x| cis(x)).collect()).collect();
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        let mut s = c(0.0, 0.0);
        for k in 0..d {
            let lk = lv[a][k].conj() * lv[b][k];
            for j in 0..d {
                s += lk * rv[b][j] * rv[a][j].conj() * t[(k, j)];
            }
        }
        s
    }))
}

/// The unitaries `L U R` described by the phase lists.
pub fn phased_unitaries(
    u: &UnitaryMatrix,
    left: &[Vec<f64>],
    right: &[Vec<f64>],
    pairing: Pairing,
) -> Result<Vec<UnitaryMatrix>> {
    let d = u.dim();
    let members = member_phases(left, right, pairing)?;
    check_phase_lengths(d, &members)?;
    members
        .iter()
        .map(|(l, r)| {
            let lm = linalg::diag(&l.iter().map(|&x| cis(x)).collect::<Vec<_>>());
            let rm = linalg::diag(&r.iter().map(|&x| cis(x)).collect::<Vec<_>>());
            UnitaryMatrix::new(lm * u.matrix() * rm)
        })
        .collect()
}

/// Largest modulus among off-diagonal entries.
pub fn max_off_diagonal(g: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..g.nrows() {
        for b in 0..g.ncols() {
            if a != b {
                worst = worst.max(g[(a, b)].norm());
            }
        }
    }
    worst
}

pub fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// `T_kl = (1 + delta_kl) / p` in dimension `p - 1`.
pub fn dplus1_action(p: usize) -> Result<StochasticMatrix> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p = {p} must be at least 2")));
    }
    let d = p - 1;
    StochasticMatrix::new(nalgebra::DMatrix::from_fn(d, d, |k, l| {
        if k == l {
            2.0 / p as f64
        } else {
            1.0 / p as f64
        }
    }))
}

/// Phases `2 pi j k / p` of `E^(k)`, `j = 0..p-1`.
pub fn dplus1_phases(p: usize) -> Vec<Vec<f64>> {
    (0..p)
        .map(|k| (0..p - 1).map(|j| 2.0 * PI * ((j * k) % p) as f64 / p as f64).collect())
        .collect()
}

/// `p` unitaries `E^(k) U E^(k)` in dimension `d = p - 1`, where `U` is a
/// certified unistochastic preimage of [`dplus1_action`].
///
/// For `p = 2` the dimension is one and only a single channel exists.
pub fn dplus1_family(p: usize, opts: &SearchOptions) -> Result<ChannelFamily> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    let d = p - 1;
    let t = dplus1_action(p)?;
    if d == 1 {
        return unitary_family(
            vec![linalg::identity(1)],
            t,
            Witness::entangled(maximally_entangled(1)),
        );
    }
    let u = match is_unistochastic(&t, opts)? {
        UnistochasticOutcome::Certified(cert) => cert.unitary,
        UnistochasticOutcome::Unknown { residual, restarts_used } => {
            return Err(Error::NotCertified(format!(
                "T = (J + 1)/{p} not certified unistochastic (residual {residual:.3e} after {restarts_used} restarts)"
            )))
        }
    };
    let phases = dplus1_phases(p);
    let unitaries = phased_unitaries(&u, &phases, &phases, Pairing::Zipped)?
        .into_iter()
        .map(UnitaryMatrix::into_matrix)
        .collect();
    // the certificate matches T only to the oracle tolerance
    unitary_family(unitaries, u.unistochastic(), Witness::entangled(maximally_entangled(d)))
}

/// `Y = (1/sqrt 2) [[1, 1], [-1, 1]]`.
pub fn outlook_y() -> UnitaryMatrix {
    let s = FRAC_1_SQRT_2;
    UnitaryMatrix::new(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(s, 0.0), c(s, 0.0), c(-s, 0.0), c(s, 0.0)],
    ))
    .expect("Y is unitary")
}

/// `D(Y . Y^dagger)` and `D(Y^dagger . Y)`: both have action `W_2`
/// and are told apart by `|+>`.
pub fn outlook_pair() -> ChannelFamily {
    let y = outlook_y();
    let members = [y.matrix().clone(), y.matrix().adjoint()]
        .iter()
        .map(|m| {
            let kraus = (0..2).map(|k| linalg::projector(&linalg::basis(2, k)) * m).collect();
            QuantumChannel::new(kraus).expect("dephased unitary is CPTP")
        })
        .collect();
    let plus = linalg::ket(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
    ChannelFamily::new(members, StochasticMatrix::van_der_waerden(2), Some(Witness::product(plus)))
        .expect("both members have action W_2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::family::verify_family;
    use crate::quantum::{fidelity_pure, trace_distance, vectorize};
    use crate::random::{haar_unitary, task_rng};

    #[test]
    fn identity_gives_schur_channels() {
        let fam = unistochastic_family(&UnitaryMatrix::identity(3)).unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.shared_action().max_abs_diff(&StochasticMatrix::identity(3)) < 1e-15);
        assert!(fam.verify(1e-12).unwrap().verdict);
    }

    #[test]
    fn random_unistochastic_family_outputs_fourier() {
        let mut rng = task_rng(3, 0);
        for d in 2..=6 {
            let u = haar_unitary(&mut rng, d);
            let fam = unistochastic_family(&u).unwrap();
            assert!(fam.verify(1e-12).unwrap().verdict);
            let w = fam.witness().unwrap().state.clone();
            let f = fourier_matrix(d);
            for (k, ch) in fam.members().iter().enumerate() {
                let out = ch.kraus()[0].clone() * &w;
                let fk = f.matrix().column(k).into_owned();
                assert!(fidelity_pure(&out, &fk) > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn w_family_vectorizations_orthonormal() {
        for d in 1..=3 {
            let fam = w_family(d).unwrap();
            assert_eq!(fam.len(), d * d);
            let vecs: Vec<_> = fam
                .members()
                .iter()
                .map(|m| vectorize(&m.kraus()[0]).unwrap() / c((d as f64).sqrt(), 0.0))
                .collect();
            assert!(linalg::gram_defect(&vecs) < 1e-12);
            assert!(fam.verify(1e-10).unwrap().verdict);
        }
    }

    #[test]
    fn gram_formula_matches_direct_traces() {
        let mut rng = task_rng(5, 1);
        let u = haar_unitary(&mut rng, 3);
        let left = vec![vec![0.0, 0.3, 1.1], vec![2.0, -0.4, 0.7]];
        let right = vec![vec![0.5, 0.0, -1.0], vec![0.1, 0.2, 0.3]];
        for pairing in [Pairing::Product, Pairing::Zipped] {
            let g = unitary_family_gram(&u.unistochastic(), &left, &right, pairing).unwrap();
            let us = phased_unitaries(&u, &left, &right, pairing).unwrap();
            for a in 0..us.len() {
                for b in 0..us.len() {
                    let direct = linalg::trace(&(us[a].matrix().adjoint() * us[b].matrix()));
                    assert!((direct - g[(a, b)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_member_gram_is_dimension() {
        let t = StochasticMatrix::van_der_waerden(4);
        let g = unitary_family_gram(&t, &[vec![0.0; 4]], &[vec![0.0; 4]], Pairing::Zipped).unwrap();
        assert!((g[(0, 0)] - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn w_phase_choice_orthogonal() {
        let d = 3;
        let phases: Vec<Vec<f64>> = (0..d)
            .map(|k| (0..d).map(|j| 2.0 * PI * (j * k) as f64 / d as f64).collect())
            .collect();
        let neg: Vec<Vec<f64>> = phases.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        let g = unitary_family_gram(&StochasticMatrix::van_der_waerden(d), &phases, &neg, Pairing::Product)
            .unwrap();
        assert!(max_off_diagonal(&g) < 1e-12);
    }

    #[test]
    fn dplus1_phase_choice_orthogonal_from_action() {
        for p in [3, 5, 7, 11] {
            let phases = dplus1_phases(p);
            let g = unitary_family_gram(&dplus1_action(p).unwrap(), &phases, &phases, Pairing::Zipped).unwrap();
            assert!(max_off_diagonal(&g) < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn dplus1_p3() {
        let fam = dplus1_family(3, &SearchOptions::default()).unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.verify(1e-10).unwrap().verdict);
        let us: Vec<_> = fam.members().iter().map(|m| m.kraus()[0].clone()).collect();
        for a in 0..3 {
            for b in (a + 1)..3 {
                assert!(linalg::trace(&(us[a].adjoint() * &us[b])).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn dplus1_rejects_composite_and_handles_two() {
        assert!(dplus1_family(4, &SearchOptions::default()).is_err());
        assert_eq!(dplus1_family(2, &SearchOptions::default()).unwrap().len(), 1);
    }

    #[test]
    fn primes() {
        let ps: Vec<usize> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn outlook_outputs_are_basis_states() {
        let fam = outlook_pair();
        let w = fam.witness().unwrap().state.clone();
        let outs = fam.outputs(&w, false).unwrap();
        assert!((outs[0].matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((outs[1].matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!((trace_distance(&outs[0], &outs[1]).unwrap() - 1.0).abs() < 1e-12);
        assert!(verify_family(&fam, &w, false, 1e-12).unwrap().verdict);
    }
}
