use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use cohdist_core::channels::{
    bistochastic_pair, circulant_family, column_family, damping_action, damping_channel, dplus1_action,
    dplus1_family, dplus1_phases, max_off_diagonal, qubit_classify, qubit_pair, qubit_quadruple, qubit_triple,
    transposition_family, triangle_column, unistochastic_family, unitary_family_gram, w_family, ChannelFamily,
    Damping, Pairing, QubitAction, SwapSpec,
};
use cohdist_core::config::RunConfig;
use cohdist_core::json::{
    matrix_from_json, real_matrix_to_json, vector_from_json, FamilyJson, MatrixJson, RealMatrixJson, ReportJson,
    VectorJson,
};
use cohdist_core::quantum::{ProbabilityVector, StochasticMatrix, UnitaryMatrix};
use cohdist_core::random::{haar_unitary, task_rng};
use cohdist_core::states::construct_pair;
use serde_json::{json, Value};

use crate::output::{f, read_json, unwrap_document, Output};
use crate::CliError;

#[derive(Debug, Subcommand)]
pub enum ChannelsCommand {
    /// Distinguishability numbers of the qubit action [[a, 1-b], [1-a, b]].
    ClassifyQubit {
        #[arg(long, requires = "b", conflicts_with = "grid")]
        a: Option<f64>,
        #[arg(long, requires = "a")]
        b: Option<f64>,
        /// Closed N x N grid over [0, 1]^2.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Builds a channel family and writes it in the interchange format.
    #[command(subcommand)]
    Construct(Construct),
    /// Checks that a family file produces mutually orthogonal outputs.
    Verify {
        /// Family file; standard input if absent or `-`.
        family: Option<PathBuf>,
        /// Input state replacing the stored witness, as `[[re, im], ...]`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Treat `--input` as a state on system and reference.
        #[arg(long, requires = "input")]
        entangled: bool,
    },
    /// Table of tr(V_a^dagger V_b) for phased unitaries, computed from T alone.
    Gram {
        #[command(subcommand)]
        preset: GramPreset,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// D^(k) U for a unitary file, or a seeded Haar unitary of dimension d.
    Unistochastic {
        #[arg(long, conflicts_with = "d")]
        u: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// The d^2 unitaries with the uniform action.
    W {
        #[arg(long)]
        d: usize,
    },
    /// Circulant action with first column lambda.
    Circulant {
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
    },
    /// Pair from one column satisfying the triangle inequality.
    Column {
        /// Stochastic matrix file.
        #[arg(long)]
        t: PathBuf,
        /// Column index; the first admissible column if absent.
        #[arg(long)]
        column: Option<usize>,
    },
    /// Pair for T after scaling column k by alpha and exchanging row j of columns k and l.
    Swap {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        alpha: f64,
    },
    /// Two channels for any bistochastic matrix.
    BistochasticPair {
        #[arg(long)]
        t: PathBuf,
    },
    QubitPair {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    QubitTriple {
        #[arg(long)]
        a: f64,
    },
    QubitQuadruple,
    /// p unitaries in dimension p - 1 for prime p.
    Dplus1 {
        #[arg(long)]
        p: usize,
    },
    /// Damping channel given as a single-member family.
    Damping {
        #[arg(long, value_parser = ["phase", "amplitude", "generalized"])]
        kind: String,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        prob: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GramPreset {
    /// Uniform action with phases D^(k) on the left and D^(l)^dagger on the right.
    W {
        #[arg(long)]
        d: usize,
    },
    /// T = (J + 1)/p with matching left and right phases 2 pi j k / p.
    Dplus1 {
        #[arg(long)]
        p: usize,
    },
    /// A stochastic matrix and phase lists read from files.
    Custom {
        #[arg(long)]
        t: PathBuf,
        /// JSON list of left phase vectors.
        #[arg(long)]
        left: PathBuf,
        /// JSON list of right phase vectors.
        #[arg(long)]
        right: PathBuf,
        #[arg(long, value_parser = ["product", "zipped"], default_value = "product")]
        pairing: String,
    },
}

fn stochastic_file(path: &Path) -> Result<StochasticMatrix, CliError> {
    let v = unwrap_document(read_json(Some(path))?, "matrix");
    let m: RealMatrixJson = serde_json::from_value(v).map_err(|e| CliError::input(format!("matrix: {e}")))?;
    Ok(m.to_stochastic()?)
}

fn unitary_file(path: &Path) -> Result<UnitaryMatrix, CliError> {
    let v = unwrap_document(read_json(Some(path))?, "matrix");
    let m = match serde_json::from_value::<MatrixJson>(v.clone()) {
        Ok(m) => matrix_from_json(&m)?,
        Err(_) => {
            let r: RealMatrixJson =
                serde_json::from_value(v).map_err(|e| CliError::input(format!("matrix: {e}")))?;
            cohdist_core::linalg::from_real(&r.to_real()?)
        }
    };
    Ok(UnitaryMatrix::new(m)?)
}

fn family_output(kind: &str, fam: &ChannelFamily, extra: Value) -> Output {
    let mut result = json!({"members": fam.len(), "family": FamilyJson::from_family(fam)});
    if let (Value::Object(r), Value::Object(e)) = (&mut result, extra) {
        r.extend(e);
    }
    let mut rows = Vec::new();
    for (m, ch) in fam.members().iter().enumerate() {
        for (i, k) in ch.kraus().iter().enumerate() {
            for r in 0..k.nrows() {
                for c in 0..k.ncols() {
                    let z = k[(r, c)];
                    rows.push(vec![m.to_string(), i.to_string(), r.to_string(), c.to_string(), f(z.re), f(z.im)]);
                }
            }
        }
    }
    Output::new(&format!("channels construct {kind}"), result)
        .table(vec!["member", "kraus", "row", "col", "re", "im"], rows)
}

fn construct(cmd: &Construct, cfg: &RunConfig) -> Result<Output, CliError> {
    Ok(match cmd {
        Construct::Unistochastic { u, d } => {
            let u = match (u, d) {
                (Some(path), _) => unitary_file(path)?,
                (None, Some(d)) if *d > 0 => haar_unitary(&mut task_rng(cfg.seed, 0), *d),
                _ => return Err(CliError::input("give --u FILE or a positive --d")),
            };
            family_output("unistochastic", &unistochastic_family(&u)?, json!({}))
        }
        Construct::W { d } => family_output("w", &w_family(*d)?, json!({})),
        Construct::Circulant { lambda } => {
            let l = ProbabilityVector::new(lambda.clone())?;
            family_output("circulant", &circulant_family(&l)?, json!({}))
        }
        Construct::Column { t, column } => {
            let t = stochastic_file(t)?;
            let l = match column {
                Some(l) if *l < t.dim() => *l,
                Some(l) => return Err(CliError::input(format!("column {l} out of range"))),
                None => triangle_column(&t).ok_or_else(|| CliError::input("no column satisfies max <= 1/2"))?,
            };
            let p = ProbabilityVector::new(t.column(l))?;
            let fam = column_family(&t, l, &construct_pair(&p)?)?;
            family_output("column", &fam, json!({"column": l}))
        }
        Construct::Swap { t, k, l, j, alpha } => {
            let t = stochastic_file(t)?;
            let spec = SwapSpec::new(*k, *l, *j, *alpha)?;
            family_output("swap", &transposition_family(&t, &spec)?, json!({"swap": spec}))
        }
        Construct::BistochasticPair { t } => {
            let pair = bistochastic_pair(&stochastic_file(t)?)?;
            family_output("bistochastic-pair", &pair.family, json!({"dispatch": pair.dispatch}))
        }
        Construct::QubitPair { a, b } => family_output("qubit-pair", &qubit_pair(&QubitAction::new(*a, *b)?)?, json!({})),
        Construct::QubitTriple { a } => {
            let t = qubit_triple(*a)?;
            family_output("qubit-triple", &t.family, json!({"phi": t.phi, "theta": t.theta, "residual": t.residual}))
        }
        Construct::QubitQuadruple => family_output("qubit-quadruple", &qubit_quadruple(), json!({})),
        Construct::Dplus1 { p } => family_output("dplus1", &dplus1_family(*p, &cfg.search_options())?, json!({"p": p})),
        Construct::Damping {
            kind,
            lambda,
            gamma,
            prob,
        } => {
            let need = |v: &Option<f64>, name: &str| v.ok_or_else(|| CliError::input(format!("{kind} damping needs --{name}")));
            let d = match kind.as_str() {
                "phase" => Damping::Phase { lambda: need(lambda, "lambda")? },
                "amplitude" => Damping::Amplitude { gamma: need(gamma, "gamma")? },
                _ => Damping::Generalized {
                    p: need(prob, "prob")?,
                    gamma: need(gamma, "gamma")?,
                },
            };
            let action = damping_action(&d)?;
            let fam = ChannelFamily::new(vec![damping_channel(&d)?], action.matrix(), None)?;
            family_output("damping", &fam, json!({"damping": d, "a": action.a, "b": action.b}))
        }
    })
}

fn verify(family: Option<&Path>, input: Option<&Path>, entangled: bool, cfg: &RunConfig) -> Result<Output, CliError> {
    let v = unwrap_document(read_json(family)?, "family");
    let fj: FamilyJson = serde_json::from_value(v).map_err(|e| CliError::input(format!("family: {e}")))?;
    let fam = fj.to_family()?;
    let tol = cfg.tolerance_success;
    let report = match input {
        Some(path) => {
            let s: VectorJson = serde_json::from_value(read_json(Some(path))?)
                .map_err(|e| CliError::input(format!("input state: {e}")))?;
            cohdist_core::channels::verify_family(&fam, &vector_from_json(&s)?, entangled, tol)?
        }
        None => fam.verify(tol)?,
    };
    let rj = ReportJson::from(&report);
    Ok(Output::new(
        "channels verify",
        json!({"members": fam.len(), "dim": fam.dim(), "report": rj}),
    )
    .table(
        vec!["members", "dim", "verdict", "max_pairwise_residual", "tolerance"],
        vec![vec![
            fam.len().to_string(),
            fam.dim().to_string(),
            report.verdict.to_string(),
            f(report.max_pairwise_residual),
            f(report.tolerance),
        ]],
    ))
}

fn gram(preset: &GramPreset) -> Result<Output, CliError> {
    let (t, left, right, pairing) = match preset {
        GramPreset::W { d } => {
            if *d == 0 {
                return Err(CliError::input("d must be positive"));
            }
            let ph = |s: f64| -> Vec<Vec<f64>> {
                (0..*d)
                    .map(|k| (0..*d).map(|j| s * 2.0 * PI * ((j * k) % d) as f64 / *d as f64).collect())
                    .collect()
            };
            (StochasticMatrix::van_der_waerden(*d), ph(1.0), ph(-1.0), Pairing::Product)
        }
        GramPreset::Dplus1 { p } => (dplus1_action(*p)?, dplus1_phases(*p), dplus1_phases(*p), Pairing::Zipped),
        GramPreset::Custom { t, left, right, pairing } => {
            let phases = |p: &Path| -> Result<Vec<Vec<f64>>, CliError> {
                serde_json::from_value(read_json(Some(p))?).map_err(|e| CliError::input(format!("phases: {e}")))
            };
            let pairing = if pairing == "zipped" { Pairing::Zipped } else { Pairing::Product };
            (stochastic_file(t)?, phases(left)?, phases(right)?, pairing)
        }
    };
    let g = unitary_family_gram(&t, &left, &right, pairing)?;
    let mut rows = Vec::new();
    for a in 0..g.nrows() {
        for b in 0..g.ncols() {
            let z = g[(a, b)];
            rows.push(vec![a.to_string(), b.to_string(), f(z.re), f(z.im), f(z.norm())]);
        }
    }
    Ok(Output::new(
        "channels gram",
        json!({"action": real_matrix_to_json(t.matrix()), "pairing": pairing, "left": left, "right": right,
            "gram": cohdist_core::json::matrix_to_json(&g), "max_off_diagonal": max_off_diagonal(&g)}),
    )
    .table(vec!["a", "b", "re", "im", "abs"], rows))
}

pub fn run(cmd: &ChannelsCommand, cfg: &RunConfig) -> Result<Output, CliError> {
    match cmd {
        ChannelsCommand::ClassifyQubit { a, b, grid } => {
            let points: Vec<(f64, f64)> = match (a, b, grid) {
                (Some(a), Some(b), _) => vec![(*a, *b)],
                (_, _, Some(n)) if *n >= 2 => {
                    let s = (n - 1) as f64;
                    (0..*n).flat_map(|i| (0..*n).map(move |j| (i as f64 / s, j as f64 / s))).collect()
                }
                _ => return Err(CliError::input("give --a and --b, or --grid N with N >= 2")),
            };
            let mut rows = Vec::with_capacity(points.len());
            let mut recs = Vec::with_capacity(points.len());
            for (a, b) in points {
                let c = qubit_classify(&QubitAction::new(a, b)?);
                rows.push(vec![
                    f(a),
                    f(b),
                    c.m_restricted.to_string(),
                    c.m_full.to_string(),
                    c.inferred.to_string(),
                ]);
                recs.push(json!({"a": a, "b": b, "m_restricted": c.m_restricted, "m_full": c.m_full, "inferred": c.inferred}));
            }
            Ok(Output::new("channels classify-qubit", json!({"points": recs}))
                .table(vec!["a", "b", "m_restricted", "m_full", "inferred"], rows))
        }
        ChannelsCommand::Construct(c) => construct(c, cfg),
        ChannelsCommand::Verify { family, input, entangled } => {
            verify(family.as_deref(), input.as_deref(), *entangled, cfg)
        }
        ChannelsCommand::Gram { preset } => gram(preset),
    }
}
