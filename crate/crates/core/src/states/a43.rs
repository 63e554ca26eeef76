//! The 3-distinguishability region in dimension 4.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, cis, ComplexVector};
use crate::quantum::{ProbabilityVector, StochasticMatrix};
use crate::states::phases::pairwise_residual;
use crate::tol;

const GRID: usize = 720;

/// Annulus traced by the overlap `<psi_1|psi_2>` as the free phases vary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: f64,
    pub outer: f64,
    pub inner: f64,
}

impl Annulus {
    /// `r <= |x| <= R`, i.e. the origin lies in the annulus.
    pub fn contains_origin(&self) -> bool {
        let slack = 1e-14;
        self.center.abs() <= self.outer + slack && self.center.abs() >= self.inner - slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLineStates {
    pub s: f64,
    pub t: f64,
    pub p: ProbabilityVector,
    /// `(alpha_2, alpha_3, alpha_4)`.
    pub alphas: [f64; 3],
    pub annulus: Annulus,
    pub states: Vec<ComplexVector>,
    pub residual: f64,
}

/// `p^(s,t) = 3(1/3 - t) eta + 3t p^(s)` with `p^(s) = (s, 1-s, 1, 1)/3`.
pub fn edge_line_point(s: f64, t: f64) -> Result<ProbabilityVector> {
    check_edge(s, t)?;
    ProbabilityVector::new(vec![
        (1.0 - 3.0 * t + 4.0 * t * s) / 4.0,
        (1.0 + t - 4.0 * t * s) / 4.0,
        (1.0 + t) / 4.0,
        (1.0 + t) / 4.0,
    ])
}

fn check_edge(s: f64, t: f64) -> Result<()> {
    let eps = 1e-15;
    if !(-eps..=0.5 + eps).contains(&s) || !(-eps..=1.0 / 3.0 + eps).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "edge-line parameters need s in [0, 1/2], t in [0, 1/3]; got ({s}, {t})"
        )));
    }
    Ok(())
}

pub fn edge_annulus(s: f64, t: f64) -> Annulus {
    let x4 = 1.0 + (4.0 * s - 3.0) * t;
    let a = (1.0 + t - 4.0 * s * t).abs();
    let b = 2.0 * c(t, t.sqrt()).norm();
    Annulus {
        center: x4 / 4.0,
        outer: (a + b) / 4.0,
        inner: (a - b).abs() / 4.0,
    }
}

/// Three orthogonal states with classical version `p^(s,t)`.
///
/// `psi_2` and `psi_3` differ by swapping the phases of the last two entries;
/// their overlap fixes `alpha_3 - alpha_4`, and the common overlap with
/// `psi_1` vanishes once `|c(alpha_4)|` matches the `alpha_2` term.
pub fn a43_edge_line_states(s: f64, t: f64) -> Result<EdgeLineStates> {
    let p = edge_line_point(s, t)?;
    let annulus = edge_annulus(s, t);
    let x4 = 1.0 + (4.0 * s - 3.0) * t;
    let target = (1.0 + t - 4.0 * s * t) / 4.0;
    let spin = c(t, t.sqrt()) * 2.0;
    let cval = |a4: f64| (c(x4, 0.0) + spin * cis(a4)) / 4.0;
    let g = |a4: f64| cval(a4).norm() - target;

    let a4 = solve_periodic(&g).ok_or_else(|| {
        Error::RootFinding(format!("no root of |c(alpha_4)| - target at (s, t) = ({s}, {t})"))
    })?;
    let beta = ((t - 1.0) / (t + 1.0)).clamp(-1.0, 1.0).acos();
    let a3 = beta + a4;
    let a2 = PI + cval(a4).arg();

    let x: Vec<f64> = p.as_slice().iter().map(|v| v.sqrt()).collect();
    let make = |ph: [f64; 4]| ComplexVector::from_fn(4, |k, _| cis(ph[k]) * x[k]);
    let states = vec![
        make([0.0; 4]),
        make([0.0, a2, a3, a4]),
        make([0.0, a2, a4, a3]),
    ];
    let residual = pairwise_residual(&states);
    if residual >= tol::ORTHOGONAL {
        return Err(Error::RootFinding(format!(
            "edge-line states at (s, t) = ({s}, {t}) miss orthogonality by {residual:.3e}"
        )));
    }
    let wrap = |a: f64| a.rem_euclid(TAU);
    Ok(EdgeLineStates {
        s,
        t,
        p,
        alphas: [wrap(a2), wrap(a3), wrap(a4)],
        annulus,
        states,
        residual,
    })
}

/// A zero of a `2 pi`-periodic function: a grid value that already vanishes,
/// a bisected sign change, or a golden-section minimum of `|g|` at a tangency.
fn solve_periodic(g: &dyn Fn(f64) -> f64) -> Option<f64> {
    let h = TAU / GRID as f64;
    let values: Vec<f64> = (0..=GRID).map(|i| g(i as f64 * h)).collect();
    let zero_tol = 1e-14;
    if let Some(i) = values.iter().position(|v| v.abs() <= zero_tol) {
        return Some(i as f64 * h);
    }
    for i in 0..GRID {
        if values[i].signum() != values[i + 1].signum() {
            let (mut lo, mut hi) = (i as f64 * h, (i + 1) as f64 * h);
            let mut glo = values[i];
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    return Some(mid);
                }
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            return Some(0.5 * (lo + hi));
        }
    }
    let (imin, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((imin as f64 - 1.0) * h, (imin as f64 + 1.0) * h);
    let f = |x: f64| g(x).abs();
    let mut x1 = b - invphi * (b - a);
    let mut x2 = a + invphi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (f(x) < 1e-11).then_some(x)
}

/// Interior face point `(1, r+s, q+s, q+r)/3`; provably outside the region.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePoint {
    pub barycentric: [f64; 3],
    pub p: ProbabilityVector,
    pub verdict: FaceVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceVerdict {
    Excluded,
}

pub fn a43_face_point(q: f64, r: f64, s: f64) -> Result<FacePoint> {
    if !(q > 0.0 && r > 0.0 && s > 0.0) || (q + r + s - 1.0).abs() > tol::SUM {
        return Err(Error::InvalidParameter(format!(
            "face point needs q, r, s > 0 summing to 1; got ({q}, {r}, {s})"
        )));
    }
    let p = ProbabilityVector::new(vec![1.0 / 3.0, (r + s) / 3.0, (q + s) / 3.0, (q + r) / 3.0])?;
    Ok(FacePoint {
        barycentric: [q, r, s],
        p,
        verdict: FaceVerdict::Excluded,
    })
}

/// Point `(1-3t, 1+t, 1+t, 1+t)/4` on the line from the centre to a face centre.
pub fn face_center_line_point(t: f64) -> Result<ProbabilityVector> {
    if !(-1.0 / 9.0 - 1e-15..=0.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t must lie in [-1/9, 0], got {t}")));
    }
    ProbabilityVector::new(vec![
        (1.0 - 3.0 * t) / 4.0,
        (1.0 + t) / 4.0,
        (1.0 + t) / 4.0,
        (1.0 + t) / 4.0,
    ])
}

/// Bistochastic completion of three identical columns `q`: the last column is `1 - 3q`.
pub fn three_column_matrix(q: &ProbabilityVector) -> Result<StochasticMatrix> {
    if q.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: q.dim(),
        });
    }
    StochasticMatrix::new(DMatrix::from_fn(4, 4, |k, l| {
        if l < 3 {
            q[k]
        } else {
            1.0 - 3.0 * q[k]
        }
    }))
}

/// Vertices `f^1, ..., f^4` of the 3-permutohedron in dimension 4; `f^i` has
/// its zero in position `i`.
pub fn vertices() -> [[f64; 4]; 4] {
    let t = 1.0 / 3.0;
    [[0.0, t, t, t], [t, 0.0, t, t], [t, t, 0.0, t], [t, t, t, 0.0]]
}

/// `ab f^1 + a(1-b) f^2 + (1-a) b f^3 + (1-a)(1-b) f^4`.
pub fn a43_conjecture_point(a: f64, b: f64) -> Result<ProbabilityVector> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::InvalidParameter(format!("a, b must lie in [0, 1]; got ({a}, {b})")));
    }
    let w = [a * b, a * (1.0 - b), (1.0 - a) * b, (1.0 - a) * (1.0 - b)];
    let f = vertices();
    let p = (0..4).map(|k| (0..4).map(|i| w[i] * f[i][k]).sum()).collect();
    ProbabilityVector::new(p)
}

/// Prediction of the conjectured form for a point of the 3-permutohedron.
///
/// With vertex weights `w = 1 - 3p`, the product surface is `w1 w4 = w2 w3`;
/// its images under relabelling give the other two determinants. The region
/// bounded by the three surfaces is where their product is non-negative.
pub fn conjecture_predicts_member(p: &ProbabilityVector) -> Result<bool> {
    if p.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: p.dim(),
        });
    }
    if p.max() > 1.0 / 3.0 + tol::BOUNDARY {
        return Ok(false);
    }
    let w: Vec<f64> = p.as_slice().iter().map(|x| 1.0 - 3.0 * x).collect();
    let d1 = w[0] * w[3] - w[1] * w[2];
    let d2 = w[0] * w[2] - w[1] * w[3];
    let d3 = w[0] * w[1] - w[2] * w[3];
    Ok(d1 * d2 * d3 >= -1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-14)
    }

    #[test]
    fn edge_endpoints() {
        let e = a43_edge_line_states(0.0, 1.0 / 3.0).unwrap();
        assert!(approx(e.p.as_slice(), &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]));
        assert!(e.residual < 1e-10);
        let centre = a43_edge_line_states(0.3, 0.0).unwrap();
        assert!(approx(centre.p.as_slice(), &[0.25; 4]));
        assert!(centre.residual < 1e-10);
    }

    #[test]
    fn edge_grid_is_orthogonal() {
        for i in 0..=10 {
            for j in 0..=10 {
                let (s, t) = (0.05 * i as f64, j as f64 / 30.0);
                let e = a43_edge_line_states(s, t).unwrap();
                assert!(e.residual < 1e-10, "({s}, {t}): {}", e.residual);
                assert!(e.annulus.contains_origin());
            }
        }
    }

    #[test]
    fn edge_rejects_out_of_range() {
        assert!(a43_edge_line_states(0.6, 0.1).is_err());
        assert!(a43_edge_line_states(0.1, 0.4).is_err());
    }

    #[test]
    fn face_points() {
        let f = a43_face_point(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        let two = 2.0 / 9.0;
        assert!(approx(f.p.as_slice(), &[1.0 / 3.0, two, two, two]));
        assert!(a43_face_point(0.0, 0.5, 0.5).is_err());
        assert!(!conjecture_predicts_member(&f.p).unwrap());
    }

    #[test]
    fn conjecture_points() {
        let f = vertices();
        assert!(approx(a43_conjecture_point(1.0, 1.0).unwrap().as_slice(), &f[0]));
        assert!(approx(a43_conjecture_point(1.0, 0.0).unwrap().as_slice(), &f[1]));
        assert!(approx(a43_conjecture_point(0.5, 0.5).unwrap().as_slice(), &[0.25; 4]));
        for i in 0..=10 {
            for j in 0..=10 {
                let p = a43_conjecture_point(i as f64 / 10.0, j as f64 / 10.0).unwrap();
                assert!(conjecture_predicts_member(&p).unwrap());
            }
        }
    }

    #[test]
    fn conjecture_agrees_with_proven_structure() {
        for i in 0..=10 {
            for j in 1..=10 {
                let p = edge_line_point(0.05 * i as f64, j as f64 / 30.0).unwrap();
                assert!(conjecture_predicts_member(&p).unwrap());
            }
        }
        for j in 1..=10 {
            let p = face_center_line_point(-(j as f64) / 90.0).unwrap();
            assert!(!conjecture_predicts_member(&p).unwrap());
        }
    }

    #[test]
    fn face_center_matrix_columns() {
        let q = face_center_line_point(-1.0 / 9.0).unwrap();
        let m = three_column_matrix(&q).unwrap();
        assert!(m.is_bistochastic());
        assert!((m[(0, 3)] - 0.0).abs() < 1e-15);
    }
}
