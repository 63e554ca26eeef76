use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::channels::family::ChannelFamily;
use crate::error::{Error, Result};
use crate::linalg::{self, c, cis, ComplexMatrix};
use crate::quantum::{maximally_entangled, QuantumChannel, StochasticMatrix, UnitaryMatrix, Witness};

/// Qubit classical action `[[a, 1 - b], [1 - a, b]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitAction {
    pub a: f64,
    pub b: f64,
}

impl QubitAction {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(Self { a, b })
    }

    pub fn delta(&self) -> f64 {
        (self.a - self.b).abs()
    }

    pub fn matrix(&self) -> StochasticMatrix {
        StochasticMatrix::from_rows(2, &[self.a, 1.0 - self.b, 1.0 - self.a, self.b])
            .expect("entries in [0, 1]")
    }

    /// Reads `a = T_00`, `b = T_11` from a qubit stochastic matrix.
    pub fn from_matrix(t: &StochasticMatrix) -> Result<Self> {
        if t.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: t.dim(),
            });
        }
        Self::new(t[(0, 0)].clamp(0.0, 1.0), t[(1, 1)].clamp(0.0, 1.0))
    }
}

/// Distinguishability numbers of a qubit action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitClassification {
    /// Without entangled inputs.
    pub m_restricted: usize,
    /// With entangled inputs.
    pub m_full: usize,
    /// `true` for `a = b` outside `[1/3, 2/3]`, where the value 2 follows from
    /// the argument rather than from the stated case list.
    pub inferred: bool,
}

const CLASSIFY_TOL: f64 = 1e-12;

pub fn qubit_classify(action: &QubitAction) -> QubitClassification {
    let delta = action.delta();
    if delta > 0.5 + CLASSIFY_TOL {
        return QubitClassification {
            m_restricted: 1,
            m_full: 1,
            inferred: false,
        };
    }
    let (m_full, inferred) = if delta > CLASSIFY_TOL {
        (2, false)
    } else if (action.a - 0.5).abs() <= CLASSIFY_TOL {
        (4, false)
    } else if action.a >= 1.0 / 3.0 - CLASSIFY_TOL && action.a <= 2.0 / 3.0 + CLASSIFY_TOL {
        (3, false)
    } else {
        (2, true)
    };
    QubitClassification {
        m_restricted: 2,
        m_full,
        inferred,
    }
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

/// Two channels `Psi^(+-)(U . U^dagger)`, with `Psi^(+-)` given by their
/// Jamiolkowski states, mapping `U^dagger |psi>` to `|+>` and `|->`.
///
/// Requires `|a - b| <= 1/2`; for `a < b` the construction for `(b, a)` is
/// conjugated by `X`.
pub fn qubit_pair(action: &QubitAction) -> Result<ChannelFamily> {
    let delta = action.delta();
    if delta > 0.5 + CLASSIFY_TOL {
        return Err(Error::InvalidParameter(format!("|a - b| = {delta} exceeds 1/2")));
    }
    if action.a < action.b {
        let flipped = qubit_pair(&QubitAction::new(action.b, action.a)?)?;
        let x = pauli_x();
        let members = flipped
            .members()
            .iter()
            .map(|m| m.conjugated(&x, &x))
            .collect::<Result<Vec<_>>>()?;
        let w = flipped.witness().expect("pair carries a witness");
        return ChannelFamily::new(members, action.matrix(), Some(Witness::product(&x * &w.state)));
    }
    let (a, b) = (action.a, action.b);
    let s = (1.0 - 2.0 * delta).max(0.0).sqrt();
    let norm = 1.0 / (1.0 - delta).sqrt();
    let u = UnitaryMatrix::new(
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                c((1.0 - a).sqrt(), 0.0),
                c(-b.sqrt(), 0.0),
                c(b.sqrt(), 0.0),
                c((1.0 - a).sqrt(), 0.0),
            ],
        )
        .scale(norm),
    )?;
    let mut members = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let r = |x: f64| c(x * 0.5, 0.0);
        #[rustfmt::skip]
        let j = ComplexMatrix::from_row_slice(4, 4, &[
            r(delta),        r(0.0),      r(sign * delta), r(0.0),
            r(0.0),          r(1.0),      r(sign * s),     r(0.0),
            r(sign * delta), r(sign * s), r(1.0 - delta),  r(0.0),
            r(0.0),          r(0.0),      r(0.0),          r(0.0),
        ]);
        let psi = QuantumChannel::from_choi(&j).map_err(|e| Error::Internal(e.to_string()))?;
        members.push(psi.conjugated(u.matrix(), &linalg::identity(2))?);
    }
    let psi = linalg::ket(&[c(1.0, 0.0), c(s, 0.0)]).scale(1.0 / (2.0 * (1.0 - delta)).sqrt());
    let witness = u.matrix().adjoint() * psi;
    ChannelFamily::new(members, action.matrix(), Some(Witness::product(witness)))
}

/// Three unitaries with action `[[a, 1-a], [1-a, a]]`, pairwise
/// trace-orthogonal for `a` in `[1/3, 2/3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitTriple {
    pub family: ChannelFamily,
    pub phi: f64,
    pub theta: f64,
    /// `max_{i<j} |tr(U_i^dagger U_j)|`.
    pub residual: f64,
}

fn triple_unitaries(a: f64, phi: f64, theta: f64) -> [ComplexMatrix; 3] {
    let (sa, sb) = (a.sqrt(), (1.0 - a).sqrt());
    let build = |p: f64, t: f64| {
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(sa, 0.0), cis(t) * sb, cis(p) * sb, -cis(p + t) * sa],
        )
    };
    [build(0.0, 0.0), build(phi, theta), build(2.0 * phi, 2.0 * theta)]
}

fn trace_overlap(us: &[ComplexMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..us.len() {
        for j in (i + 1)..us.len() {
            worst = worst.max(linalg::trace(&(us[i].adjoint() * &us[j])).norm());
        }
    }
    worst
}

/// Candidate `(phi, theta)` from the two cotangent relations.
///
/// With `u = cot^2(phi/2)` the first relation squares to
/// `u^2 + (3k - 1) u + k = 0`, `k = (2a - 1)^2`, and the sign of `cot(phi/2)`
/// is that of `2a - 1`; the second gives `cot^2(theta/2)` directly.
fn triple_candidates(a: f64) -> Vec<(f64, f64)> {
    let k = (2.0 * a - 1.0).powi(2);
    let disc_sq = (3.0 * k - 1.0).powi(2) - 4.0 * k;
    // near the endpoints the double root is ill-conditioned; also try it exactly
    let mut discs = Vec::new();
    if disc_sq.abs() < 1e-12 {
        discs.push(0.0);
    }
    discs.push(disc_sq.max(0.0).sqrt());
    let roots = discs
        .iter()
        .flat_map(|&disc| [(1.0 - 3.0 * k + disc) / 2.0, (1.0 - 3.0 * k - disc) / 2.0]);
    let mut out = Vec::new();
    for u in roots {
        if !(-1e-12..=1.0 + 1e-12).contains(&u) {
            continue;
        }
        let u = u.clamp(0.0, 1.0);
        let signs: &[f64] = if 2.0 * a - 1.0 > 0.0 {
            &[1.0]
        } else if 2.0 * a - 1.0 < 0.0 {
            &[-1.0]
        } else {
            &[1.0, -1.0]
        };
        let v = ((1.0 - u) / (1.0 + 3.0 * u)).max(0.0).sqrt();
        for &sign in signs {
            let phi = 2.0 * f64::atan2(1.0, sign * u.sqrt());
            for ts in [1.0, -1.0] {
                out.push((phi, 2.0 * f64::atan2(1.0, ts * v)));
            }
        }
    }
    out
}

pub fn qubit_triple(a: f64) -> Result<QubitTriple> {
    if !(1.0 / 3.0 - CLASSIFY_TOL..=2.0 / 3.0 + CLASSIFY_TOL).contains(&a) {
        return Err(Error::InvalidParameter(format!("a = {a} outside [1/3, 2/3]")));
    }
    let a = a.clamp(1.0 / 3.0, 2.0 / 3.0);
    let mut best: Option<(f64, f64, f64)> = None;
    for (phi, theta) in triple_candidates(a) {
        let r = trace_overlap(&triple_unitaries(a, phi, theta));
        if best.is_none_or(|(br, _, _)| r < br - 1e-14) {
            best = Some((r, phi, theta));
        }
    }
    let (residual, phi, theta) = best.ok_or_else(|| Error::RootFinding("no real root".into()))?;
    if !(residual < 1e-10) {
        return Err(Error::RootFinding(format!("orthogonality residual {residual:.3e}")));
    }
    let members = triple_unitaries(a, phi, theta)
        .into_iter()
        .map(|u| Ok(QuantumChannel::unitary(&UnitaryMatrix::new(u)?)))
        .collect::<Result<Vec<_>>>()?;
    let action = QubitAction::new(a, a)?.matrix();
    let family = ChannelFamily::new(members, action, Some(Witness::entangled(maximally_entangled(2))))?;
    Ok(QubitTriple {
        family,
        phi,
        theta,
        residual,
    })
}

/// The four sign patterns of `(1/sqrt 2) [[+-1, +-1], [+-1, +-1]]` with action `W_2`.
pub fn quadruple_unitaries() -> [ComplexMatrix; 4] {
    let m = |e: [f64; 4]| {
        ComplexMatrix::from_row_slice(2, 2, &e.map(|x| c(x * FRAC_1_SQRT_2, 0.0)))
    };
    [
        m([-1.0, 1.0, 1.0, 1.0]),
        m([1.0, -1.0, 1.0, 1.0]),
        m([1.0, 1.0, -1.0, 1.0]),
        m([1.0, 1.0, 1.0, -1.0]),
    ]
}

pub fn qubit_quadruple() -> ChannelFamily {
    let members = quadruple_unitaries()
        .into_iter()
        .map(|u| QuantumChannel::unitary(&UnitaryMatrix::new(u).expect("printed matrices are unitary")))
        .collect();
    ChannelFamily::new(
        members,
        StochasticMatrix::van_der_waerden(2),
        Some(Witness::entangled(maximally_entangled(2))),
    )
    .expect("all four have action W_2")
}

/// Standard qubit damping channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Damping {
    Phase { lambda: f64 },
    Amplitude { gamma: f64 },
    Generalized { p: f64, gamma: f64 },
}

impl Damping {
    fn check(&self) -> Result<()> {
        let params: &[(&str, f64)] = match self {
            Damping::Phase { lambda } => &[("lambda", *lambda)],
            Damping::Amplitude { gamma } => &[("gamma", *gamma)],
            Damping::Generalized { p, gamma } => &[("p", *p), ("gamma", *gamma)],
        };
        for &(name, v) in params {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn real2(e: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &e.map(|x| c(x, 0.0)))
}

pub fn damping_kraus(kind: &Damping) -> Result<Vec<ComplexMatrix>> {
    kind.check()?;
    Ok(match *kind {
        Damping::Phase { lambda } => vec![
            real2([1.0, 0.0, 0.0, (1.0 - lambda).sqrt()]),
            real2([0.0, 0.0, 0.0, lambda.sqrt()]),
        ],
        Damping::Amplitude { gamma } => vec![
            real2([1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]),
            real2([0.0, gamma.sqrt(), 0.0, 0.0]),
        ],
        Damping::Generalized { p, gamma } => {
            let ad = damping_kraus(&Damping::Amplitude { gamma })?;
            let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
            vec![
                ad[0].scale(sp),
                ad[1].scale(sp),
                real2([(1.0 - gamma).sqrt(), 0.0, 0.0, 1.0]).scale(sq),
                ad[1].adjoint().scale(sq),
            ]
        }
    })
}

pub fn damping_channel(kind: &Damping) -> Result<QuantumChannel> {
    QuantumChannel::new(damping_kraus(kind)?)
}

/// Closed-form classical action of a damping channel.
pub fn damping_action(kind: &Damping) -> Result<QubitAction> {
    kind.check()?;
    match *kind {
        Damping::Phase { .. } => QubitAction::new(1.0, 1.0),
        Damping::Amplitude { gamma } => QubitAction::new(1.0, 1.0 - gamma),
        Damping::Generalized { p, gamma } => {
            QubitAction::new(p + (1.0 - p) * (1.0 - gamma), 1.0 - p + p * (1.0 - gamma))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::vectorize;
    use std::f64::consts::PI;

    fn classify(a: f64, b: f64) -> (usize, usize) {
        let r = qubit_classify(&QubitAction::new(a, b).unwrap());
        (r.m_restricted, r.m_full)
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(0.5, 0.5), (2, 4));
        assert_eq!(classify(1.0, 0.0), (1, 1));
        assert_eq!(classify(0.4, 0.4), (2, 3));
        assert_eq!(classify(0.9, 0.4), (2, 2));
        assert_eq!(classify(1.0, 0.5), (2, 2));
        assert_eq!(classify(0.2, 0.2), (2, 2));
        assert!(qubit_classify(&QubitAction::new(0.2, 0.2).unwrap()).inferred);
        assert_eq!(classify(1.0 / 3.0, 1.0 / 3.0), (2, 3));
        assert!(QubitAction::new(1.2, 0.0).is_err());
    }

    #[test]
    fn qubit_pair_examples() {
        for (a, b) in [(0.5, 0.5), (1.0, 0.5), (0.5, 0.0), (0.8, 0.5), (0.3, 0.6), (0.1, 0.1), (0.0, 0.5)] {
            let action = QubitAction::new(a, b).unwrap();
            let fam = qubit_pair(&action).unwrap();
            assert!(fam.shared_action().max_abs_diff(&action.matrix()) < 1e-12);
            let r = fam.verify(1e-10).unwrap();
            assert!(r.verdict, "({a}, {b}): {}", r.max_pairwise_residual);
        }
        assert!(qubit_pair(&QubitAction::new(0.9, 0.1).unwrap()).is_err());
    }

    #[test]
    fn qubit_pair_outputs_plus_minus() {
        let fam = qubit_pair(&QubitAction::new(0.7, 0.4).unwrap()).unwrap();
        let outs = fam.outputs(&fam.witness().unwrap().state, false).unwrap();
        let h = 0.5;
        for (out, sign) in outs.iter().zip([1.0, -1.0]) {
            let expected = real2([h, sign * h, sign * h, h]);
            assert!(linalg::frobenius(&(out.matrix() - expected)) < 1e-12);
        }
    }

    #[test]
    fn triple_at_endpoint_matches_caption() {
        let t = qubit_triple(2.0 / 3.0).unwrap();
        assert!((t.phi - 2.0 * PI / 3.0).abs() < 1e-8);
        assert!((t.theta - 2.0 * PI / 3.0).abs() < 1e-8);
        let low = qubit_triple(1.0 / 3.0).unwrap();
        assert!((low.phi - 4.0 * PI / 3.0).abs() < 1e-8);
    }

    #[test]
    fn triple_orthogonal_across_range() {
        for i in 0..=40 {
            let a = 1.0 / 3.0 + i as f64 / 120.0;
            let t = qubit_triple(a.min(2.0 / 3.0)).unwrap();
            assert!(t.residual < 1e-10);
            assert!(t.family.verify(1e-10).unwrap().verdict);
        }
        assert!(qubit_triple(0.2).is_err());
    }

    #[test]
    fn triple_satisfies_cot_relations() {
        for a in [0.4, 0.45, 0.6] {
            let t = qubit_triple(a).unwrap();
            let cp = 1.0 / (t.phi / 2.0).tan();
            let rhs = cp * ((1.0 - cp * cp) / (1.0 + 3.0 * cp * cp)).sqrt();
            assert!((2.0 * a - 1.0 - rhs).abs() < 1e-10);
            let ct = 1.0 / (t.theta / 2.0).tan();
            assert!((ct * ct - (1.0 - cp * cp) / (1.0 + 3.0 * cp * cp)).abs() < 1e-10);
        }
    }

    #[test]
    fn quadruple_gram_identity() {
        let vecs: Vec<_> = quadruple_unitaries()
            .iter()
            .map(|u| vectorize(u).unwrap().scale(FRAC_1_SQRT_2))
            .collect();
        assert!(linalg::gram_defect(&vecs) < 1e-14);
        assert!(qubit_quadruple().verify(1e-12).unwrap().verdict);
    }

    #[test]
    fn damping_actions_match_kraus() {
        let cases = [
            Damping::Phase { lambda: 0.3 },
            Damping::Amplitude { gamma: 0.5 },
            Damping::Amplitude { gamma: 1.0 },
            Damping::Generalized { p: 0.5, gamma: 1.0 },
            Damping::Generalized { p: 0.2, gamma: 0.7 },
        ];
        for kind in cases {
            let closed = damping_action(&kind).unwrap().matrix();
            let direct = damping_channel(&kind).unwrap().classical_action();
            assert!(closed.max_abs_diff(&direct) < 1e-12, "{kind:?}");
        }
        let amp = damping_action(&Damping::Amplitude { gamma: 0.5 }).unwrap();
        assert_eq!((amp.a, amp.b), (1.0, 0.5));
        assert_eq!(classify(amp.a, amp.b), (2, 2));
        let g = damping_action(&Damping::Generalized { p: 0.5, gamma: 1.0 }).unwrap();
        assert_eq!((g.a, g.b), (0.5, 0.5));
        assert_eq!(classify(g.a, g.b), (2, 4));
        assert!(damping_action(&Damping::Phase { lambda: 1.5 }).is_err());
    }
}
