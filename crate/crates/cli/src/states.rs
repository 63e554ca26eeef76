use std::path::PathBuf;

use clap::Subcommand;
use cohdist_core::config::RunConfig;
use cohdist_core::json::{matrix_to_json, vector_to_json, RealMatrixJson};
use cohdist_core::linalg::{gram_defect, inner, ComplexVector};
use cohdist_core::quantum::ProbabilityVector;
use cohdist_core::states::{
    a43_conjecture_point, a43_edge_line_states, a43_face_point, a43_skeleton, appendix_b_vector,
    conjecture_predicts_member, construct_fourier_set, construct_pair, is_unistochastic,
    pairwise_residual, permutohedron_contains, phase_search, point_seed, scan_region,
    star_shape_probe, PhaseSearchResult, SearchOptions, UnistochasticOutcome,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{f, join, read_json, unwrap_document, Output};
use crate::CliError;

#[derive(Debug, Subcommand)]
pub enum StatesCommand {
    /// Permutohedron membership and the numerical oracle for (p, M).
    Check {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long)]
        m: usize,
    },
    /// Two orthogonal states with classical version p (needs max p <= 1/2).
    Pair {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
    },
    /// The d Fourier vectors with uniform classical version.
    Fourier {
        #[arg(long)]
        d: usize,
    },
    /// Multi-start phase search for M orthogonal states.
    Search {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long)]
        m: usize,
    },
    /// Unistochasticity oracle on a column-stochastic matrix file (stdin if absent).
    Unistochastic { matrix: Option<PathBuf> },
    /// Points of the 3-permutohedron in dimension 4 with their classification.
    A43 {
        #[arg(long, group = "kind")]
        edge: bool,
        #[arg(long, group = "kind")]
        face: bool,
        #[arg(long, group = "kind")]
        conjecture: bool,
        #[arg(long, group = "kind")]
        skeleton: bool,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Boundary point of the (d-1)-permutohedron with no d-1 orthogonal pure states.
    AppendixB {
        #[arg(long, default_value_t = 4)]
        d: usize,
    },
    /// Oracle over the closed grid of the simplex with spacing 1/steps.
    Scan {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Oracle along the segment from the uniform vector to p.
    Star {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

fn prob(p: &[f64]) -> Result<ProbabilityVector, CliError> {
    Ok(ProbabilityVector::new(p.to_vec())?)
}

fn search_json(r: &PhaseSearchResult) -> Value {
    json!({
        "status": r.status,
        "residual": r.residual,
        "restarts_used": r.restarts_used,
        "separated": r.separated,
        "conclusive": r.conclusive,
        "phases": r.phases.rows(),
    })
}

fn status(r: &PhaseSearchResult) -> String {
    if r.found() { "Found" } else { "NotFound" }.into()
}

fn state_rows(states: &[ComplexVector]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (n, s) in states.iter().enumerate() {
        for (k, z) in s.iter().enumerate() {
            rows.push(vec![n.to_string(), k.to_string(), f(z.re), f(z.im)]);
        }
    }
    rows
}

pub fn run(cmd: &StatesCommand, cfg: &RunConfig) -> Result<Output, CliError> {
    let opts = cfg.search_options();
    match cmd {
        StatesCommand::Check { p, m } => {
            let p = prob(p)?;
            let inside = permutohedron_contains(&p, *m)?;
            let r = phase_search(&p, *m, &opts)?;
            let row = vec![join(p.as_slice()), m.to_string(), inside.to_string(), status(&r), f(r.residual)];
            Ok(Output::new(
                "states check",
                json!({"p": p.as_slice(), "m": m, "permutohedron": inside, "search": search_json(&r)}),
            )
            .table(vec!["p", "m", "permutohedron", "status", "residual"], vec![row]))
        }
        StatesCommand::Pair { p } => {
            let p = prob(p)?;
            let phases = construct_pair(&p)?;
            let states = phases.states(&p)?;
            let overlap = inner(&states[0], &states[1]).norm();
            Ok(Output::new(
                "states pair",
                json!({"p": p.as_slice(), "phases": phases.rows(), "overlap": overlap,
                    "states": states.iter().map(vector_to_json).collect::<Vec<_>>()}),
            )
            .table(vec!["state", "k", "re", "im"], state_rows(&states)))
        }
        StatesCommand::Fourier { d } => {
            if *d == 0 {
                return Err(CliError::input("d must be positive"));
            }
            let states = construct_fourier_set(*d);
            Ok(Output::new(
                "states fourier",
                json!({"d": d, "gram_deviation": gram_defect(&states),
                    "states": states.iter().map(vector_to_json).collect::<Vec<_>>()}),
            )
            .table(vec!["state", "k", "re", "im"], state_rows(&states)))
        }
        StatesCommand::Search { p, m } => {
            let p = prob(p)?;
            let r = phase_search(&p, *m, &opts)?;
            let states = r.phases.states(&p)?;
            Ok(Output::new(
                "states search",
                json!({"p": p.as_slice(), "m": m, "search": search_json(&r),
                    "pairwise_residual": pairwise_residual(&states)}),
            )
            .table(
                vec!["status", "residual", "restarts_used", "separated", "conclusive"],
                vec![vec![
                    status(&r),
                    f(r.residual),
                    r.restarts_used.to_string(),
                    r.separated.to_string(),
                    r.conclusive.to_string(),
                ]],
            ))
        }
        StatesCommand::Unistochastic { matrix } => {
            let v = unwrap_document(read_json(matrix.as_deref())?, "matrix");
            let m: RealMatrixJson =
                serde_json::from_value(v).map_err(|e| CliError::input(format!("matrix: {e}")))?;
            let t = m.to_stochastic()?;
            let out = is_unistochastic(&t, &opts)?;
            let (verdict, restarts, unitary) = match &out {
                UnistochasticOutcome::Certified(c) => ("Certified", None, Some(matrix_to_json(c.unitary.matrix()))),
                UnistochasticOutcome::Unknown { restarts_used, .. } => ("Unknown", Some(*restarts_used), None),
            };
            Ok(Output::new(
                "states unistochastic",
                json!({"verdict": verdict, "residual": out.residual(), "restarts_used": restarts, "unitary": unitary}),
            )
            .table(vec!["verdict", "residual"], vec![vec![verdict.into(), f(out.residual())]]))
        }
        StatesCommand::A43 {
            edge,
            face,
            conjecture,
            skeleton,
            step,
        } => a43(*edge, *face, *conjecture, *skeleton, *step, &opts),
        StatesCommand::AppendixB { d } => {
            let p = appendix_b_vector(*d)?;
            let m = d - 1;
            let inside = permutohedron_contains(&p, m)?;
            let r = phase_search(&p, m, &opts)?;
            let row = vec![join(p.as_slice()), m.to_string(), inside.to_string(), status(&r), f(r.residual)];
            Ok(Output::new(
                "states appendix-b",
                json!({"d": d, "m": m, "p": p.as_slice(), "permutohedron": inside, "search": search_json(&r)}),
            )
            .table(vec!["p", "m", "permutohedron", "status", "residual"], vec![row]))
        }
        StatesCommand::Scan { d, m, steps } => {
            let grid = simplex_grid(*d, *steps)?;
            let records = scan_region(*d, *m, &grid, &opts)?;
            let rows = records
                .iter()
                .map(|r| {
                    vec![
                        r.index.to_string(),
                        join(r.p.as_slice()),
                        r.permutohedron.to_string(),
                        status(&r.search),
                        f(r.search.residual),
                        r.conjecture.map(|c| c.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            let points: Vec<Value> = records
                .iter()
                .map(|r| {
                    json!({"index": r.index, "p": r.p.as_slice(), "permutohedron": r.permutohedron,
                        "status": r.search.status, "residual": r.search.residual, "conjecture": r.conjecture})
                })
                .collect();
            Ok(Output::new("states scan", json!({"d": d, "m": m, "steps": steps, "points": points}))
                .table(vec!["index", "p", "permutohedron", "status", "residual", "conjecture"], rows))
        }
        StatesCommand::Star { p, m, steps } => {
            let p = prob(p)?;
            let probe = star_shape_probe(&p, *m, *steps, &opts)?;
            let rows = probe
                .lambdas
                .iter()
                .zip(&probe.results)
                .map(|(l, r)| vec![f(*l), status(r), f(r.residual)])
                .collect();
            let points: Vec<Value> = probe
                .lambdas
                .iter()
                .zip(&probe.results)
                .map(|(l, r)| json!({"lambda": l, "status": r.status, "residual": r.residual}))
                .collect();
            Ok(Output::new(
                "states star",
                json!({"p": p.as_slice(), "m": m, "points": points, "violation": probe.violation}),
            )
            .table(vec!["lambda", "status", "residual"], rows))
        }
    }
}

/// All `p` with entries in `{0, 1/n, ..., 1}`, in lexicographic order.
fn simplex_grid(d: usize, n: usize) -> Result<Vec<ProbabilityVector>, CliError> {
    if d == 0 || n == 0 {
        return Err(CliError::input("d and steps must be positive"));
    }
    fn rec(d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(d, left - k, cur, out);
            cur.pop();
        }
    }
    let mut counts = Vec::new();
    rec(d, n, &mut Vec::new(), &mut counts);
    counts
        .into_iter()
        .map(|c| prob(&c.iter().map(|&k| k as f64 / n as f64).collect::<Vec<_>>()))
        .collect()
}

/// Closed grid `0, step, ..., hi` with the last point pinned to `hi`.
fn axis(hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::input("step must be positive"));
    }
    let n = (hi / step - 1e-9).ceil().max(1.0) as usize;
    Ok((0..=n).map(|i| if i == n { hi } else { i as f64 * step }).collect())
}

fn a43(edge: bool, face: bool, conjecture: bool, skeleton: bool, step: f64, opts: &SearchOptions) -> Result<Output, CliError> {
    let search = |p: &ProbabilityVector, index: usize| {
        phase_search(
            p,
            3,
            &SearchOptions {
                seed: point_seed(opts.seed, index),
                ..*opts
            },
        )
    };
    if edge {
        let pts: Vec<(f64, f64)> = {
            let (ss, ts) = (axis(0.5, step)?, axis(1.0 / 3.0, step)?);
            ss.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect()
        };
        let recs = pts
            .par_iter()
            .map(|&(s, t)| a43_edge_line_states(s, t))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = recs
            .iter()
            .map(|e| vec![f(e.s), f(e.t), join(e.p.as_slice()), f(e.residual), e.annulus.contains_origin().to_string()])
            .collect();
        let points: Vec<Value> = recs
            .iter()
            .map(|e| json!({"s": e.s, "t": e.t, "p": e.p.as_slice(), "residual": e.residual,
                "annulus": e.annulus, "alphas": e.alphas}))
            .collect();
        return Ok(Output::new("states a43 --edge", json!({"step": step, "points": points}))
            .table(vec!["s", "t", "p", "residual", "annulus_contains_origin"], rows));
    }
    if face {
        let n = (1.0 / step).round().max(2.0) as usize;
        let bary: Vec<[f64; 3]> = (1..n)
            .flat_map(|i| (1..n - i).map(move |j| [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64]))
            .collect();
        let recs = bary
            .par_iter()
            .enumerate()
            .map(|(i, q)| {
                let fp = a43_face_point(q[0], q[1], q[2])?;
                let r = search(&fp.p, i)?;
                Ok((fp, r))
            })
            .collect::<Result<Vec<_>, cohdist_core::Error>>()?;
        let rows = recs
            .iter()
            .map(|(fp, r)| vec![join(&fp.barycentric), join(fp.p.as_slice()), format!("{:?}", fp.verdict), status(r), f(r.residual)])
            .collect();
        let points: Vec<Value> = recs
            .iter()
            .map(|(fp, r)| json!({"barycentric": fp.barycentric, "p": fp.p.as_slice(), "verdict": fp.verdict,
                "status": r.status, "residual": r.residual}))
            .collect();
        return Ok(Output::new("states a43 --face", json!({"step": step, "points": points}))
            .table(vec!["barycentric", "p", "verdict", "status", "residual"], rows));
    }
    if conjecture {
        let ax = axis(1.0, step)?;
        let pts: Vec<(f64, f64)> = ax.iter().flat_map(|&a| ax.iter().map(move |&b| (a, b))).collect();
        let recs = pts
            .par_iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let p = a43_conjecture_point(a, b)?;
                let predicted = conjecture_predicts_member(&p)?;
                let r = search(&p, i)?;
                Ok((a, b, p, predicted, r))
            })
            .collect::<Result<Vec<_>, cohdist_core::Error>>()?;
        let rows = recs
            .iter()
            .map(|(a, b, p, pr, r)| vec![f(*a), f(*b), join(p.as_slice()), pr.to_string(), status(r), f(r.residual)])
            .collect();
        let points: Vec<Value> = recs
            .iter()
            .map(|(a, b, p, pr, r)| json!({"a": a, "b": b, "p": p.as_slice(), "predicted": pr,
                "status": r.status, "residual": r.residual, "separated": r.separated}))
            .collect();
        return Ok(Output::new("states a43 --conjecture", json!({"step": step, "points": points}))
            .table(vec!["a", "b", "p", "predicted", "status", "residual"], rows));
    }
    if !skeleton {
        return Err(CliError::input("choose one of --edge, --face, --conjecture, --skeleton"));
    }
    let pts = a43_skeleton(step)?;
    let recs = pts
        .par_iter()
        .enumerate()
        .map(|(i, sp)| search(&sp.p, i))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = pts
        .iter()
        .zip(&recs)
        .map(|(sp, r)| {
            vec![
                serde_json::to_value(sp.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                join(&sp.params),
                join(sp.p.as_slice()),
                sp.kind.proven_member().to_string(),
                status(r),
                f(r.residual),
            ]
        })
        .collect();
    let points: Vec<Value> = pts
        .iter()
        .zip(&recs)
        .map(|(sp, r)| json!({"kind": sp.kind, "params": sp.params, "p": sp.p.as_slice(),
            "member": sp.kind.proven_member(), "status": r.status, "residual": r.residual}))
        .collect();
    Ok(Output::new("states a43 --skeleton", json!({"step": step, "points": points}))
        .table(vec!["kind", "params", "p", "member", "status", "residual"], rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_grid_counts() {
        // C(n + d - 1, d - 1)
        assert_eq!(simplex_grid(3, 4).unwrap().len(), 15);
        assert_eq!(simplex_grid(2, 10).unwrap().len(), 11);
    }

    #[test]
    fn axis_closed() {
        let a = axis(1.0 / 3.0, 0.05).unwrap();
        assert_eq!(a.first(), Some(&0.0));
        assert_eq!(a.last(), Some(&(1.0 / 3.0)));
        assert_eq!(axis(1.0, 0.05).unwrap().len(), 21);
    }
}
