use crate::error::{Error, Result};
use crate::quantum::{ProbabilityVector, StochasticMatrix};
use crate::tol;

/// `v^M`: the first `m` entries equal `1/m`, the rest zero.
pub fn flat_vector(d: usize, m: usize) -> Result<ProbabilityVector> {
    if m == 0 || m > d {
        return Err(Error::InvalidParameter(format!("need 1 <= m <= d, got m={m}, d={d}")));
    }
    let mut v = vec![0.0; d];
    for x in v.iter_mut().take(m) {
        *x = 1.0 / m as f64;
    }
    ProbabilityVector::new(v)
}

/// Membership in the permutohedron spanned by permutations of `v^M`, which
/// reduces to `max_k p_k <= 1/M` (closed region).
pub fn permutohedron_contains(p: &ProbabilityVector, m: usize) -> Result<bool> {
    check_m(p.dim(), m)?;
    Ok(p.max() <= 1.0 / m as f64 + tol::BOUNDARY)
}

/// True when `max_k p_k = 1/M` within the boundary tolerance.
pub fn on_permutohedron_boundary(p: &ProbabilityVector, m: usize) -> bool {
    (p.max() - 1.0 / m as f64).abs() <= tol::BOUNDARY
}

pub(crate) fn check_m(d: usize, m: usize) -> Result<()> {
    if m == 0 || m > d {
        return Err(Error::InvalidParameter(format!("need 1 <= m <= d, got m={m}, d={d}")));
    }
    Ok(())
}

/// `(2/3, 2/3, 2/3, 1, ..., 1) / (d - 1)` for even `d > 2`: on the boundary of
/// the `(d-1)`-permutohedron but outside the distinguishability region.
pub fn appendix_b_vector(d: usize) -> Result<ProbabilityVector> {
    if d <= 2 || !d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("d must be even and > 2, got {d}")));
    }
    let n = (d - 1) as f64;
    let v = (0..d)
        .map(|k| if k < 3 { 2.0 / (3.0 * n) } else { 1.0 / n })
        .collect();
    ProbabilityVector::new(v)
}

/// A 0/1 column-stochastic matrix of shape `d' x d`, `d' <= d`, merging entries
/// of a `d`-dimensional distribution: column `k` has its single one in row
/// `target[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseGraining {
    rows: usize,
    target: Vec<usize>,
}

impl CoarseGraining {
    pub fn new(rows: usize, target: Vec<usize>) -> Result<Self> {
        if target.is_empty() || rows == 0 {
            return Err(Error::NotCoarseGraining("empty".into()));
        }
        if let Some(&bad) = target.iter().find(|&&r| r >= rows) {
            return Err(Error::NotCoarseGraining(format!("row {bad} out of range")));
        }
        Ok(Self { rows, target })
    }

    /// Reads a coarse graining off a square 0/1 stochastic matrix; rows that
    /// receive nothing are kept (they carry zero weight).
    pub fn from_matrix(g: &StochasticMatrix) -> Result<Self> {
        let d = g.dim();
        let mut target = Vec::with_capacity(d);
        for k in 0..d {
            let mut hit = None;
            for i in 0..d {
                let x = g[(i, k)];
                if x != 0.0 && x != 1.0 {
                    return Err(Error::NotCoarseGraining(format!("entry ({i},{k}) = {x}")));
                }
                if x == 1.0 {
                    hit = Some(i);
                }
            }
            target.push(hit.ok_or_else(|| Error::NotCoarseGraining(format!("column {k}")))?);
        }
        Self::new(d, target)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    /// `q = G p`.
    pub fn apply(&self, p: &ProbabilityVector) -> Result<ProbabilityVector> {
        if p.dim() != self.target.len() {
            return Err(Error::DimensionMismatch {
                expected: self.target.len(),
                found: p.dim(),
            });
        }
        let mut q = vec![0.0; self.rows];
        for (k, &r) in self.target.iter().enumerate() {
            q[r] += p[k];
        }
        ProbabilityVector::new(q)
    }
}
