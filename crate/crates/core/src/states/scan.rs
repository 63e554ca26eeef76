use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quantum::ProbabilityVector;
use crate::random::task_rng;
use crate::states::a43::{
    a43_face_point, conjecture_predicts_member, edge_line_point, face_center_line_point,
};
use crate::states::permutohedron::{check_m, permutohedron_contains};
use crate::states::phase_search::{phase_search, PhaseSearchResult, SearchOptions, SearchStatus};

/// Seed for grid point `index`, so every point owns its generator.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    task_rng(seed, index as u64).next_u64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub index: usize,
    pub p: ProbabilityVector,
    pub permutohedron: bool,
    pub search: PhaseSearchResult,
    /// Prediction of the conjectured form, only for `d = 4, M = 3`.
    pub conjecture: Option<bool>,
}

/// Permutohedron verdict and oracle outcome for every grid point, in grid order.
pub fn scan_region(
    d: usize,
    m: usize,
    grid: &[ProbabilityVector],
    opts: &SearchOptions,
) -> Result<Vec<ScanRecord>> {
    check_m(d, m)?;
    grid.par_iter()
        .enumerate()
        .map(|(index, p)| {
            let local = SearchOptions {
                seed: point_seed(opts.seed, index),
                ..*opts
            };
            let search = phase_search(p, m, &local)?;
            let conjecture = if d == 4 && m == 3 {
                Some(conjecture_predicts_member(p)?)
            } else {
                None
            };
            Ok(ScanRecord {
                index,
                p: p.clone(),
                permutohedron: permutohedron_contains(p, m)?,
                search,
                conjecture,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarProbe {
    pub lambdas: Vec<f64>,
    pub results: Vec<PhaseSearchResult>,
    /// Indices `(i, j, k)` with Found at `i`, NotFound at `j`, Found at `k`,
    /// `i < j < k`; a candidate counterexample to star-shapedness.
    pub violation: Option<(usize, usize, usize)>,
}

/// Oracle along `lambda p + (1 - lambda) eta` for `lambda = 0, 1/steps, ..., 1`.
pub fn star_shape_probe(
    p: &ProbabilityVector,
    m: usize,
    steps: usize,
    opts: &SearchOptions,
) -> Result<StarProbe> {
    let steps = steps.max(1);
    let eta = ProbabilityVector::uniform(p.dim());
    let lambdas: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let points = lambdas
        .iter()
        .map(|&l| p.mix(&eta, l))
        .collect::<Result<Vec<_>>>()?;
    let records = scan_region(p.dim(), m, &points, opts)?;
    let results: Vec<PhaseSearchResult> = records.into_iter().map(|r| r.search).collect();
    let violation = find_gap(&results);
    Ok(StarProbe {
        lambdas,
        results,
        violation,
    })
}

fn find_gap(results: &[PhaseSearchResult]) -> Option<(usize, usize, usize)> {
    let first = results.iter().position(|r| r.status == SearchStatus::Found)?;
    let last = results.iter().rposition(|r| r.status == SearchStatus::Found)?;
    (first + 1..last)
        .find(|&j| results[j].status == SearchStatus::NotFound)
        .map(|j| (first, j, last))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkeletonKind {
    EdgeLine,
    Face,
    FaceCenterLine,
}

impl SkeletonKind {
    /// Membership settled by proof for this kind of point.
    pub fn proven_member(self) -> bool {
        matches!(self, Self::EdgeLine)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonPoint {
    pub kind: SkeletonKind,
    pub params: Vec<f64>,
    pub p: ProbabilityVector,
}

/// Points of the three proven families in the 3-permutohedron of dimension 4:
/// centre-to-edge segments (members), interior face points and centre-to-face
/// segments (non-members). Grids are closed at both ends where the family is.
pub fn a43_skeleton(step: f64) -> Result<Vec<SkeletonPoint>> {
    let n = (1.0 / step).round().max(1.0) as usize;
    let mut out = Vec::new();
    let ns = n.div_ceil(2).max(1);
    let nt = n.div_ceil(3).max(1);
    for i in 0..=ns {
        for j in 0..=nt {
            let (s, t) = (0.5 * i as f64 / ns as f64, j as f64 / (3.0 * nt as f64));
            out.push(SkeletonPoint {
                kind: SkeletonKind::EdgeLine,
                params: vec![s, t],
                p: edge_line_point(s, t)?,
            });
        }
    }
    for i in 1..n {
        for j in 1..n - i {
            let q = i as f64 / n as f64;
            let r = j as f64 / n as f64;
            let s = 1.0 - q - r;
            if s <= 0.0 {
                continue;
            }
            out.push(SkeletonPoint {
                kind: SkeletonKind::Face,
                params: vec![q, r, s],
                p: a43_face_point(q, r, s)?.p,
            });
        }
    }
    for t in face_center_ts(10) {
        out.push(SkeletonPoint {
            kind: SkeletonKind::FaceCenterLine,
            params: vec![t],
            p: face_center_line_point(t)?,
        });
    }
    Ok(out)
}

/// `count` values evenly spaced over `[-1/9, -0.005]`.
pub fn face_center_ts(count: usize) -> Vec<f64> {
    let (a, b) = (-1.0 / 9.0, -0.005);
    if count == 1 {
        return vec![a];
    }
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}
