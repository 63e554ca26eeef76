use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::ProbabilityVector;
use crate::random::task_rng;
use crate::states::permutohedron::{check_m, on_permutohedron_boundary};
use crate::states::phases::PhaseAssignment;
use crate::tol;

/// Restarts are evaluated in fixed-size batches so the reported restart count
/// does not depend on the thread pool.
const BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol_success: f64,
    pub tol_fail: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 50,
            max_iter: 5000,
            tol_success: tol::SUCCESS,
            tol_fail: tol::FAIL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Found,
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSearchResult {
    pub status: SearchStatus,
    pub phases: PhaseAssignment,
    /// `sqrt(sum_{m<n} |<psi^(m)|psi^(n)>|^2)` of the best restart.
    pub residual: f64,
    pub restarts_used: usize,
    /// NotFound with the residual above the failure threshold.
    pub separated: bool,
    /// Found, or a point on the permutohedron boundary where pure states
    /// are the only candidates.
    pub conclusive: bool,
}

impl PhaseSearchResult {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::Found
    }
}

/// Multi-start search for `M` mutually orthogonal pure states with classical
/// version `p`, minimizing the summed squared pairwise overlaps over
/// gauge-fixed phases.
pub fn phase_search(p: &ProbabilityVector, m: usize, opts: &SearchOptions) -> Result<PhaseSearchResult> {
    let d = p.dim();
    check_m(d, m)?;
    if m < 2 {
        return Err(Error::InvalidParameter("phase search needs m >= 2".into()));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart".into()));
    }
    let problem = Problem { p: p.as_slice(), m, d };
    let boundary = on_permutohedron_boundary(p, m);

    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut used = 0;
    let mut start = 0;
    while start < opts.restarts {
        let end = (start + BATCH).min(opts.restarts);
        let runs: Vec<(f64, DVector<f64>)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = task_rng(opts.seed, i as u64);
                let x0 = DVector::from_fn(problem.nvars(), |_, _| {
                    rng.random_range(0.0..std::f64::consts::TAU)
                });
                let x = problem.minimize(x0, opts);
                (problem.objective(&x).sqrt(), x)
            })
            .collect();
        for (offset, (res, x)) in runs.into_iter().enumerate() {
            used = start + offset + 1;
            if best.as_ref().is_none_or(|(b, _)| res < *b) {
                best = Some((res, x));
            }
            if res < opts.tol_success {
                break;
            }
        }
        if best.as_ref().is_some_and(|(b, _)| *b < opts.tol_success) {
            break;
        }
        start = end;
    }
    let (_, x) = best.expect("at least one restart ran");
    let phases = PhaseAssignment::gauge_fixed(&problem.phase_matrix(&x));
    let residual = phases.residual(p)?;
    let found = residual < opts.tol_success;
    Ok(PhaseSearchResult {
        status: if found { SearchStatus::Found } else { SearchStatus::NotFound },
        phases,
        residual,
        restarts_used: used,
        separated: !found && residual > opts.tol_fail,
        conclusive: found || boundary,
    })
}

struct Problem<'a> {
    p: &'a [f64],
    m: usize,
    d: usize,
}

impl Problem<'_> {
    fn nvars(&self) -> usize {
        (self.m - 1) * (self.d - 1)
    }

    fn var(&self, n: usize, k: usize) -> Option<usize> {
        (n > 0 && k > 0).then(|| (n - 1) * (self.d - 1) + (k - 1))
    }

    fn phase_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.d, |n, k| self.var(n, k).map_or(0.0, |i| x[i]))
    }

    fn npairs(&self) -> usize {
        self.m * (self.m - 1) / 2
    }

    /// Real and imaginary parts of every overlap, pair by pair.
    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let phi = self.phase_matrix(x);
        let mut r = DVector::zeros(2 * self.npairs());
        let mut idx = 0;
        for a in 0..self.m {
            for b in a + 1..self.m {
                let (mut re, mut im) = (0.0, 0.0);
                for k in 0..self.d {
                    let delta = phi[(b, k)] - phi[(a, k)];
                    re += self.p[k] * delta.cos();
                    im += self.p[k] * delta.sin();
                }
                r[idx] = re;
                r[idx + 1] = im;
                idx += 2;
            }
        }
        r
    }

    fn objective(&self, x: &DVector<f64>) -> f64 {
        self.residuals(x).norm_squared()
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let phi = self.phase_matrix(x);
        let mut jac = DMatrix::zeros(2 * self.npairs(), self.nvars());
        let mut row = 0;
        for a in 0..self.m {
            for b in a + 1..self.m {
                for k in 0..self.d {
                    let delta = phi[(b, k)] - phi[(a, k)];
                    let dre = -self.p[k] * delta.sin();
                    let dim = self.p[k] * delta.cos();
                    if let Some(i) = self.var(b, k) {
                        jac[(row, i)] += dre;
                        jac[(row + 1, i)] += dim;
                    }
                    if let Some(i) = self.var(a, k) {
                        jac[(row, i)] -= dre;
                        jac[(row + 1, i)] -= dim;
                    }
                }
                row += 2;
            }
        }
        jac
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.jacobian(x).transpose() * self.residuals(x)) * 2.0
    }

    /// Gradient descent with Armijo backtracking, then a damped Gauss-Newton
    /// polish once the descent stalls.
    fn minimize(&self, mut x: DVector<f64>, opts: &SearchOptions) -> DVector<f64> {
        if self.nvars() == 0 {
            return x;
        }
        let target = (opts.tol_success * 1e-2).powi(2);
        let mut f = self.objective(&x);
        let mut step = 1.0;
        for _ in 0..opts.max_iter {
            if f < 1e-8 {
                break;
            }
            let g = self.gradient(&x);
            let gg = g.norm_squared();
            if gg < 1e-24 {
                break;
            }
            step *= 2.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial = &x - &g * step;
                let ft = self.objective(&trial);
                if ft <= f - 1e-4 * step * gg {
                    let improvement = f - ft;
                    x = trial;
                    accepted = true;
                    let stalled = improvement <= 1e-12 * f;
                    f = ft;
                    if stalled {
                        step = 0.0;
                    }
                    break;
                }
                step *= 0.5;
            }
            if !accepted || step == 0.0 {
                break;
            }
        }

        let mut mu = 1e-3;
        for _ in 0..200 {
            if f < target || mu > 1e12 {
                break;
            }
            let r = self.residuals(&x);
            let jac = self.jacobian(&x);
            let jt = jac.transpose();
            let mut h = &jt * &jac;
            let scale = h.diagonal().max().max(1e-12);
            for i in 0..h.nrows() {
                h[(i, i)] += mu * scale;
            }
            let rhs = -(&jt * &r);
            let Some(delta) = h.cholesky().map(|ch| ch.solve(&rhs)) else {
                mu *= 4.0;
                continue;
            };
            let trial = &x + &delta;
            let ft = self.objective(&trial);
            if ft < f {
                x = trial;
                f = ft;
                mu = (mu / 3.0).max(1e-15);
            } else {
                mu *= 4.0;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let problem = Problem { p: &p, m: 3, d: 4 };
        let mut rng = task_rng(5, 0);
        let x = DVector::from_fn(problem.nvars(), |_, _| rng.random_range(0.0..6.0));
        let g = problem.gradient(&x);
        let h = 1e-6;
        for i in 0..x.len() {
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            let fd = (problem.objective(&xp) - problem.objective(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8, "component {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn uniform_four_states() {
        let r = phase_search(&ProbabilityVector::uniform(4), 4, &SearchOptions::default()).unwrap();
        assert!(r.found() && r.conclusive);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn pair_of_unequal_weights() {
        let p = ProbabilityVector::new(vec![0.3, 0.3, 0.2, 0.2]).unwrap();
        let r = phase_search(&p, 2, &SearchOptions::default()).unwrap();
        assert!(r.found());
        assert_eq!(r.phases.rows()[0], vec![0.0; 4]);
    }

    #[test]
    fn outside_permutohedron_is_not_found() {
        let p = ProbabilityVector::new(vec![0.6, 0.2, 0.2]).unwrap();
        let opts = SearchOptions {
            restarts: 5,
            ..Default::default()
        };
        let r = phase_search(&p, 2, &opts).unwrap();
        assert!(!r.found() && r.separated);
        // the best achievable overlap is 0.6 - 0.4
        assert!((r.residual - 0.2).abs() < 1e-8);
    }

    #[test]
    fn bad_m_rejected() {
        let p = ProbabilityVector::uniform(3);
        assert!(phase_search(&p, 4, &SearchOptions::default()).is_err());
        assert!(phase_search(&p, 1, &SearchOptions::default()).is_err());
    }
}
