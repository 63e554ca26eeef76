//! Seeded samplers for the test and scan harnesses.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{self, c, ComplexMatrix, ComplexVector};
use crate::quantum::{ProbabilityVector, QuantumChannel, StochasticMatrix, UnitaryMatrix};

pub type TaskRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for task `index` under a global `seed`; independent of scheduling.
pub fn task_rng(seed: u64, index: u64) -> TaskRng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed) ^ index))
}

/// Uniform point of the simplex (flat Dirichlet).
pub fn simplex<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ProbabilityVector {
    let w: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    ProbabilityVector::normalized(w).expect("exponential weights are positive")
}

/// Uniform simplex point conditioned on `max_k p_k <= bound` (rejection).
pub fn simplex_capped<R: Rng + ?Sized>(rng: &mut R, d: usize, bound: f64) -> ProbabilityVector {
    assert!(bound * d as f64 >= 1.0 - 1e-12, "cap excludes the whole simplex");
    if bound * d as f64 <= 1.0 + 1e-12 {
        // the cap leaves only the uniform distribution
        return ProbabilityVector::uniform(d);
    }
    loop {
        let p = simplex(rng, d);
        if p.max() <= bound {
            return p;
        }
    }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    })
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal pushed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> UnitaryMatrix {
    let g = complex_gaussian(rng, d, d);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { linalg::ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    UnitaryMatrix::new(q).expect("QR factor is unitary")
}

pub fn haar_ket<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexVector {
    let g = complex_gaussian(rng, d, 1).column(0).into_owned();
    let n = g.norm();
    g / c(n, 0.0)
}

/// Random channel with `rank` Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> QuantumChannel {
    let gs: Vec<ComplexMatrix> = (0..rank).map(|_| complex_gaussian(rng, d, d)).collect();
    let mut s = ComplexMatrix::zeros(d, d);
    for g in &gs {
        s += g.adjoint() * g;
    }
    let fix = linalg::inverse_sqrt_psd(&s).expect("Gaussian completeness sum is invertible");
    QuantumChannel::new(gs.into_iter().map(|g| g * &fix).collect())
        .expect("normalized Kraus list is complete")
}

/// Random rank-`rank` density matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let g = complex_gaussian(rng, d, rank);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    m.scale(1.0 / tr)
}

/// Random correlation matrix (positive, unit diagonal) as the Gram matrix of
/// `rank` dimensional random unit vectors.
pub fn correlation_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let vs: Vec<ComplexVector> = (0..d).map(|_| haar_ket(rng, rank)).collect();
    let g = linalg::gram(&vs);
    // pin the diagonal to exactly one
    ComplexMatrix::from_fn(d, d, |i, j| if i == j { linalg::ONE } else { g[(i, j)] })
}

pub fn permutation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(rng);
    p
}

/// Random column-stochastic matrix with flat-Dirichlet columns.
pub fn stochastic<R: Rng + ?Sized>(rng: &mut R, d: usize) -> StochasticMatrix {
    let mut m = DMatrix::zeros(d, d);
    for l in 0..d {
        let p = simplex(rng, d);
        for k in 0..d {
            m[(k, l)] = p[k];
        }
    }
    StochasticMatrix::new(m).expect("columns are probability vectors")
}

/// Random bistochastic matrix as a Birkhoff mixture of permutation matrices.
///
/// Half of the samples put weight above one half on a single permutation, so
/// that every column has an entry above one half.
pub fn bistochastic<R: Rng + ?Sized>(rng: &mut R, d: usize) -> StochasticMatrix {
    let terms = rng.random_range(1..=d + 2);
    let mut weights: Vec<f64> = simplex(rng, terms).into_vec();
    if rng.random_bool(0.5) {
        let lead = rng.random_range(0.51..0.99);
        for w in weights.iter_mut() {
            *w *= 1.0 - lead;
        }
        weights[0] += lead;
    }
    let mut m = DMatrix::zeros(d, d);
    for w in weights {
        let perm = permutation(rng, d);
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] += w;
        }
    }
    let m = sinkhorn(m);
    StochasticMatrix::new(m).expect("Birkhoff mixture is bistochastic")
}

/// Sinkhorn balancing; a few sweeps remove rounding drift in row sums.
fn sinkhorn(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for _ in 0..50 {
        for mut row in m.row_iter_mut() {
            let s: f64 = row.sum();
            row /= s;
        }
        for mut col in m.column_iter_mut() {
            let s: f64 = col.sum();
            col /= s;
        }
        let defect = m
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max);
        if defect < 1e-15 {
            break;
        }
    }
    m
}
