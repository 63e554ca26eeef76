use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channels::constructions::{column_family, triangle_column};
use crate::channels::family::ChannelFamily;
use crate::channels::unitary::unistochastic_family;
use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector};
use crate::quantum::{ProbabilityVector, QuantumChannel, StochasticMatrix, UnitaryMatrix, Witness};
use crate::states::construct_pair;
use crate::tol;

/// Scale column `k` by `alpha`, then exchange the row-`j` entries of columns
/// `k` and `l` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapSpec {
    pub k: usize,
    pub l: usize,
    pub j: usize,
    pub alpha: f64,
}

impl SwapSpec {
    pub fn new(k: usize, l: usize, j: usize, alpha: f64) -> Result<Self> {
        if k == l {
            return Err(Error::InvalidParameter("swap columns must differ".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
        }
        Ok(Self { k, l, j, alpha })
    }

    fn check(&self, d: usize) -> Result<()> {
        Self::new(self.k, self.l, self.j, self.alpha)?;
        for index in [self.k, self.l, self.j] {
            if index >= d {
                return Err(Error::IndexOutOfRange { index, dim: d });
            }
        }
        Ok(())
    }
}

/// The matrix `T'` of the swap procedure; it need not be stochastic.
pub fn swap_procedure(t: &StochasticMatrix, spec: &SwapSpec) -> Result<DMatrix<f64>> {
    spec.check(t.dim())?;
    let mut m = t.matrix().clone();
    let mut col = m.column_mut(spec.k);
    col *= spec.alpha;
    m.swap((spec.j, spec.k), (spec.j, spec.l));
    Ok(m)
}

fn satisfies_triangle(v: &[f64]) -> bool {
    let sum: f64 = v.iter().sum();
    let max = v.iter().fold(0.0f64, |m, &x| m.max(x));
    sum > 0.0 && max <= 0.5 * sum + tol::BOUNDARY
}

/// Two orthogonal vectors with squared moduli `v` (not normalized).
fn scaled_pair(v: &[f64], column: usize) -> Result<[ComplexVector; 2]> {
    let sum: f64 = v.iter().sum();
    let p = ProbabilityVector::normalized(v.to_vec())
        .map_err(|_| Error::TriangleViolation { column })?;
    let phases = construct_pair(&p).map_err(|_| Error::TriangleViolation { column })?;
    let states = phases.states(&p)?;
    let s = c(sum.sqrt(), 0.0);
    Ok([&states[0] * s, &states[1] * s])
}

/// Two channels with action `T`, perfectly distinguishable with an entangled
/// input, built from orthogonal pairs for the two columns of
/// [`swap_procedure`]`(T, spec)`.
///
/// With `x` the unscaled column `l` and `y` the scaled column `k` of `T'`,
/// pairs `xi, xi'` and `eta, eta'` with moduli `x`, `y` are placed as
/// `xi^ = sum_{i != j} xi_i |i, l> + xi_j |j, k>` and
/// `eta^ = sum_{i != j} eta_i |i, k> + eta_j |j, l>` (output, input). The
/// Jamiolkowski state is
/// `(1/d)(|f><f| + |g><g| + sum_{i, m not in {k,l}} T_im |im><im|)` with
/// `f = (1 (x) S) xi^`, `g = (1 (x) S) eta^` and `S` scaling input `k` by
/// `1/sqrt(alpha)`. The witness is `(|l l> + sqrt(alpha) |k k>)/sqrt(1 + alpha)`.
pub fn transposition_family(t: &StochasticMatrix, spec: &SwapSpec) -> Result<ChannelFamily> {
    let d = t.dim();
    let tp = swap_procedure(t, spec)?;
    let x: Vec<f64> = tp.column(spec.l).iter().copied().collect();
    let y: Vec<f64> = tp.column(spec.k).iter().copied().collect();
    if !satisfies_triangle(&x) {
        return Err(Error::TriangleViolation { column: spec.l });
    }
    if !satisfies_triangle(&y) {
        return Err(Error::TriangleViolation { column: spec.k });
    }
    let xi = scaled_pair(&x, spec.l)?;
    let eta = scaled_pair(&y, spec.k)?;
    let inv = 1.0 / spec.alpha.sqrt();
    let (k, l, j) = (spec.k, spec.l, spec.j);

    let mut members = Vec::with_capacity(2);
    for n in 0..2 {
        // f and g as matrices with entry (out, in)
        let mut f = ComplexMatrix::zeros(d, d);
        let mut g = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            if i == j {
                f[(i, k)] = xi[n][i] * inv;
                g[(i, l)] = eta[n][i];
            } else {
                f[(i, l)] = xi[n][i];
                g[(i, k)] = eta[n][i] * inv;
            }
        }
        let norms = linalg::frobenius(&f).powi(2) + linalg::frobenius(&g).powi(2);
        if (norms - 2.0).abs() > 1e-10 {
            return Err(Error::Internal(format!("<f|f> + <g|g> = {norms}, expected 2")));
        }
        let mut kraus = vec![f, g];
        for m in (0..d).filter(|&m| m != k && m != l) {
            for i in 0..d {
                if t[(i, m)] > 0.0 {
                    let mut op = ComplexMatrix::zeros(d, d);
                    op[(i, m)] = c(t[(i, m)].sqrt(), 0.0);
                    kraus.push(op);
                }
            }
        }
        let ch = QuantumChannel::new(kraus).map_err(|e| Error::Internal(e.to_string()))?;
        members.push(ch);
    }
    let norm = 1.0 / (1.0 + spec.alpha).sqrt();
    let mut psi = ComplexVector::zeros(d * d);
    psi[l * d + l] = c(norm, 0.0);
    psi[k * d + k] = c(spec.alpha.sqrt() * norm, 0.0);
    ChannelFamily::new(members, t.clone(), Some(Witness::entangled(psi)))
}

/// How [`bistochastic_pair`] obtained its family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "path", rename_all = "kebab-case")]
pub enum PairDispatch {
    /// A column satisfies the triangle inequality.
    Column { column: usize },
    /// `T` is a permutation matrix `P`; the members are `P` and `Z P`.
    Permutation { perm: Vec<usize> },
    /// Relabelled matrix `T'' = Q P T Q^T` handled by the transposition
    /// construction; `row_perm[c]` is the row holding column `c`'s entry above
    /// `1/2` and `relabel[i]` is the new label of index `i`.
    Swap {
        row_perm: Vec<usize>,
        relabel: Vec<usize>,
        spec: SwapSpec,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BistochasticPair {
    pub family: ChannelFamily,
    pub dispatch: PairDispatch,
}

/// `P` with `P|i> = |perm[i]>`.
fn perm_matrix(perm: &[usize]) -> ComplexMatrix {
    let d = perm.len();
    ComplexMatrix::from_fn(d, d, |r, col| if perm[col] == r { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn as_permutation(t: &StochasticMatrix) -> Option<Vec<usize>> {
    (0..t.dim())
        .map(|col| (0..t.dim()).find(|&r| t[(r, col)] == 1.0))
        .collect()
}

/// Two perfectly distinguishable channels for any bistochastic `T` in
/// dimension at least two.
pub fn bistochastic_pair(t: &StochasticMatrix) -> Result<BistochasticPair> {
    if !t.is_bistochastic() {
        return Err(Error::NotBistochastic {
            deviation: t.row_sum_defect(),
        });
    }
    let d = t.dim();
    if d < 2 {
        return Err(Error::InvalidParameter("a single channel exists in dimension one".into()));
    }
    if let Some(l) = triangle_column(t) {
        let p = ProbabilityVector::new(t.column(l))?;
        let phases = construct_pair(&p)?;
        let family = column_family(t, l, &phases)?;
        return Ok(BistochasticPair {
            family,
            dispatch: PairDispatch::Column { column: l },
        });
    }

    if let Some(perm) = as_permutation(t) {
        let p = UnitaryMatrix::new(perm_matrix(&perm))?;
        let full = unistochastic_family(&p)?;
        let family = ChannelFamily::new(
            full.members()[..2].to_vec(),
            t.clone(),
            full.witness().cloned(),
        )?;
        return Ok(BistochasticPair {
            family,
            dispatch: PairDispatch::Permutation { perm },
        });
    }

    // every column has an entry above 1/2; bistochasticity makes their rows distinct
    let mut big_row = vec![usize::MAX; d];
    for (col, slot) in big_row.iter_mut().enumerate() {
        let column = t.column(col);
        let (r, _) = column
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty column");
        *slot = r;
    }
    let mut seen = vec![false; d];
    for &r in &big_row {
        if seen[r] {
            return Err(Error::Internal("entries above 1/2 share a row".into()));
        }
        seen[r] = true;
    }
    // row permutation sending row big_row[c] to c
    let mut to_diag = vec![0usize; d];
    for (col, &r) in big_row.iter().enumerate() {
        to_diag[r] = col;
    }
    let t1 = DMatrix::from_fn(d, d, |i, col| t[(big_row[i], col)]);

    let mut best = (1, 0);
    for i in 0..d {
        for col in 0..d {
            if i != col && t1[(i, col)] > t1[best] {
                best = (i, col);
            }
        }
    }
    // simultaneous relabel: column best.1 -> 0, row best.0 -> 1
    let mut order = vec![best.1, best.0];
    order.extend((0..d).filter(|&i| i != best.0 && i != best.1));
    let mut relabel = vec![0usize; d];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let t2 = StochasticMatrix::new(DMatrix::from_fn(d, d, |i, col| t1[(order[i], order[col])]))?;

    let alpha = if t2[(0, 0)] < t2[(1, 1)] {
        1.0
    } else {
        (2.0 * t2[(0, 0)] + t2[(1, 0)] - 1.0) / t2[(1, 1)]
    };
    let spec = SwapSpec::new(1, 0, 1, alpha)?;
    let inner = transposition_family(&t2, &spec)
        .map_err(|e| Error::Internal(format!("swap path failed on relabelled matrix: {e}")))?;

    // T = B T2 A with A = Q and B = P^T Q^T
    let q = perm_matrix(&relabel);
    let p = perm_matrix(&to_diag);
    let a = q.clone();
    let b = p.transpose() * q.transpose();
    let members = inner
        .members()
        .iter()
        .map(|m| m.conjugated(&a, &b))
        .collect::<Result<Vec<_>>>()?;
    let w = inner.witness().expect("transposition family carries a witness");
    let lift = linalg::kron(&a.adjoint(), &linalg::identity(d));
    let witness = Witness::entangled(lift * &w.state);
    let family = ChannelFamily::new(members, t.clone(), Some(witness))?;
    Ok(BistochasticPair {
        family,
        dispatch: PairDispatch::Swap {
            row_perm: big_row,
            relabel,
            spec,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{bistochastic, task_rng};

    fn t2(a: f64) -> StochasticMatrix {
        StochasticMatrix::from_rows(2, &[a, 1.0 - a, 1.0 - a, a]).unwrap()
    }

    #[test]
    fn swap_example() {
        let tp = swap_procedure(&t2(0.7), &SwapSpec::new(0, 1, 1, 1.0).unwrap()).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.7, 0.3, 0.7, 0.3]);
        assert!((tp - expected).abs().max() < 1e-15);
    }

    #[test]
    fn swap_identity_when_entries_equal() {
        let t = StochasticMatrix::van_der_waerden(3);
        let tp = swap_procedure(&t, &SwapSpec::new(0, 2, 1, 1.0).unwrap()).unwrap();
        assert_eq!(&tp, t.matrix());
    }

    #[test]
    fn swap_scales_then_exchanges() {
        let t = StochasticMatrix::from_rows(3, &[0.6, 0.1, 0.3, 0.3, 0.7, 0.0, 0.1, 0.2, 0.7]).unwrap();
        let tp = swap_procedure(&t, &SwapSpec::new(1, 0, 1, 0.5).unwrap()).unwrap();
        // column 1: 0.5 * (0.1, 0.7, 0.2) with row 1 replaced by T_10
        assert!((tp[(0, 1)] - 0.05).abs() < 1e-15);
        assert!((tp[(1, 1)] - 0.3).abs() < 1e-15);
        assert!((tp[(2, 1)] - 0.1).abs() < 1e-15);
        // column 0 keeps its entries except row 1, which receives 0.5 * T_11
        assert!((tp[(1, 0)] - 0.35).abs() < 1e-15);
        assert!((tp[(0, 0)] - 0.6).abs() < 1e-15);
        assert_eq!(tp.column(2), t.matrix().column(2));
    }

    #[test]
    fn zero_alpha_rejected() {
        assert!(SwapSpec::new(0, 1, 1, 0.0).is_err());
        assert!(SwapSpec::new(1, 1, 1, 1.0).is_err());
    }

    #[test]
    fn transposition_two_by_two() {
        for a in [0.7, 0.8, 0.95] {
            let fam = transposition_family(&t2(a), &SwapSpec::new(0, 1, 1, 1.0).unwrap()).unwrap();
            let r = fam.verify(1e-10).unwrap();
            assert!(r.verdict, "a = {a}: residual {}", r.max_pairwise_residual);
        }
    }

    #[test]
    fn transposition_rejects_triangle_failure() {
        let t = StochasticMatrix::from_rows(2, &[0.9, 0.3, 0.1, 0.7]).unwrap();
        let err = transposition_family(&t, &SwapSpec::new(0, 1, 1, 1.0).unwrap());
        assert!(matches!(err, Err(Error::TriangleViolation { .. })));
    }

    #[test]
    fn bistochastic_flat_uses_column() {
        let r = bistochastic_pair(&StochasticMatrix::van_der_waerden(3)).unwrap();
        assert_eq!(r.dispatch, PairDispatch::Column { column: 0 });
        assert!(r.family.verify(1e-10).unwrap().verdict);
    }

    #[test]
    fn bistochastic_qubit_swap_path() {
        let r = bistochastic_pair(&t2(0.8)).unwrap();
        match &r.dispatch {
            PairDispatch::Swap { spec, .. } => assert!((spec.alpha - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(r.family.verify(1e-10).unwrap().verdict);
        let r = bistochastic_pair(&t2(0.2)).unwrap();
        assert!(r.family.verify(1e-10).unwrap().verdict);
    }

    #[test]
    fn bistochastic_random() {
        for d in 2..=5 {
            for i in 0..100 {
                let mut rng = task_rng(d as u64, i);
                let t = bistochastic(&mut rng, d);
                let r = bistochastic_pair(&t).unwrap();
                let rep = r.family.verify(1e-10).unwrap();
                assert!(rep.verdict, "d={d} i={i}: {}", rep.max_pairwise_residual);
            }
        }
    }

    #[test]
    fn bistochastic_dominant_diagonal_needs_swap() {
        let t = StochasticMatrix::from_rows(
            3,
            &[0.6, 0.3, 0.1, 0.1, 0.6, 0.3, 0.3, 0.1, 0.6],
        )
        .unwrap();
        let r = bistochastic_pair(&t).unwrap();
        assert!(matches!(r.dispatch, PairDispatch::Swap { .. }));
        assert!(r.family.verify(1e-10).unwrap().verdict);
        // a permuted copy goes through the relabelling
        let tp = StochasticMatrix::new(DMatrix::from_fn(3, 3, |i, j| t[((i + 1) % 3, j)])).unwrap();
        assert!(bistochastic_pair(&tp).unwrap().family.verify(1e-10).unwrap().verdict);
    }

    #[test]
    fn permutations_use_phase_pair() {
        for perm in [vec![0, 1], vec![1, 0], vec![2, 0, 1]] {
            let t = StochasticMatrix::new(perm_matrix(&perm).map(|z| z.re)).unwrap();
            let r = bistochastic_pair(&t).unwrap();
            assert_eq!(r.dispatch, PairDispatch::Permutation { perm });
            assert_eq!(r.family.len(), 2);
            assert!(r.family.verify(1e-12).unwrap().verdict);
        }
    }

    #[test]
    fn not_bistochastic_rejected() {
        let t = StochasticMatrix::from_rows(2, &[0.9, 0.9, 0.1, 0.1]).unwrap();
        assert!(matches!(bistochastic_pair(&t), Err(Error::NotBistochastic { .. })));
    }
}
