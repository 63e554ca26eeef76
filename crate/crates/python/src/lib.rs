//! Python bindings: probability vectors as lists of floats, states as lists
//! of complex numbers, families in the JSON interchange format.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cohdist_core::acceptance::run_criterion;
use cohdist_core::channels::{self, QubitAction};
use cohdist_core::config::RunConfig;
use cohdist_core::json::FamilyJson;
use cohdist_core::linalg::ComplexVector;
use cohdist_core::quantum::ProbabilityVector;
use cohdist_core::states::{self, SearchOptions};
use cohdist_core::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn prob(p: Vec<f64>) -> PyResult<ProbabilityVector> {
    ProbabilityVector::new(p).map_err(err)
}

fn kets(states: &[ComplexVector]) -> Vec<Vec<Complex64>> {
    states.iter().map(|s| s.iter().copied().collect()).collect()
}

#[pyfunction]
fn permutohedron_contains(p: Vec<f64>, m: usize) -> PyResult<bool> {
    states::permutohedron_contains(&prob(p)?, m).map_err(err)
}

/// Two orthogonal states whose classical version is `p`.
#[pyfunction]
fn construct_pair(p: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
    let p = prob(p)?;
    let phases = states::construct_pair(&p).map_err(err)?;
    Ok(kets(&phases.states(&p).map_err(err)?))
}

#[pyfunction]
fn fourier_set(d: usize) -> Vec<Vec<Complex64>> {
    kets(&states::construct_fourier_set(d))
}

#[pyfunction]
#[pyo3(signature = (p, m, seed=0, restarts=50, max_iter=5000, tol_success=1e-10, tol_fail=1e-3))]
#[allow(clippy::too_many_arguments)]
fn phase_search<'py>(
    py: Python<'py>,
    p: Vec<f64>,
    m: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    tol_success: f64,
    tol_fail: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = SearchOptions {
        seed,
        restarts,
        max_iter,
        tol_success,
        tol_fail,
    };
    let p = prob(p)?;
    let r = py.detach(|| states::phase_search(&p, m, &opts)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("found", r.found())?;
    out.set_item("residual", r.residual)?;
    out.set_item("restarts_used", r.restarts_used)?;
    out.set_item("separated", r.separated)?;
    out.set_item("conclusive", r.conclusive)?;
    out.set_item("phases", r.phases.rows().to_vec())?;
    Ok(out)
}

/// `(m_restricted, m_full)` for the qubit action `[[a, 1-b], [1-a, b]]`.
#[pyfunction]
fn qubit_classify(a: f64, b: f64) -> PyResult<(usize, usize)> {
    let c = channels::qubit_classify(&QubitAction::new(a, b).map_err(err)?);
    Ok((c.m_restricted, c.m_full))
}

/// `(phi, theta, residual)` of the three unitaries with diagonal action `a`.
#[pyfunction]
fn qubit_triple(a: f64) -> PyResult<(f64, f64, f64)> {
    let t = channels::qubit_triple(a).map_err(err)?;
    Ok((t.phi, t.theta, t.residual))
}

/// A named family as JSON text, readable by `verify_family`.
#[pyfunction]
#[pyo3(signature = (kind, d=None, a=None, b=None))]
fn construct_family(kind: &str, d: Option<usize>, a: Option<f64>, b: Option<f64>) -> PyResult<String> {
    let need_d = || d.ok_or_else(|| PyValueError::new_err(format!("{kind} needs d")));
    let need_a = || a.ok_or_else(|| PyValueError::new_err(format!("{kind} needs a")));
    let fam = match kind {
        "w" => channels::w_family(need_d()?),
        "fourier" => channels::unistochastic_family(&cohdist_core::quantum::fourier_matrix(need_d()?)),
        "qubit-pair" => {
            let b = b.ok_or_else(|| PyValueError::new_err("qubit-pair needs b"))?;
            QubitAction::new(need_a()?, b).and_then(|q| channels::qubit_pair(&q))
        }
        "qubit-triple" => channels::qubit_triple(need_a()?).map(|t| t.family),
        "qubit-quadruple" => Ok(channels::qubit_quadruple()),
        "outlook" => Ok(channels::outlook_pair()),
        other => return Err(PyValueError::new_err(format!("unknown family kind {other:?}"))),
    }
    .map_err(err)?;
    serde_json::to_string(&FamilyJson::from_family(&fam)).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// `(verdict, max_pairwise_residual)` for a family in JSON text.
#[pyfunction]
#[pyo3(signature = (family_json, tol=1e-10))]
fn verify_family(family_json: &str, tol: f64) -> PyResult<(bool, f64)> {
    let fj: FamilyJson = serde_json::from_str(family_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let rep = fj.to_family().and_then(|f| f.verify(tol)).map_err(err)?;
    Ok((rep.verdict, rep.max_pairwise_residual))
}

/// `(status, summary)` of one acceptance criterion from 1 to 17.
#[pyfunction]
#[pyo3(signature = (id, seed=0))]
fn acceptance_criterion(py: Python<'_>, id: u8, seed: u64) -> PyResult<(String, String)> {
    if !(1..=17).contains(&id) {
        return Err(PyValueError::new_err(format!("criterion {id} outside 1..=17")));
    }
    let cfg = RunConfig {
        seed,
        ..RunConfig::default()
    };
    let r = py.detach(|| run_criterion(&cfg, id, false));
    Ok((r.status.label().to_string(), r.summary))
}

#[pymodule]
fn cohdist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(permutohedron_contains, m)?)?;
    m.add_function(wrap_pyfunction!(construct_pair, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_set, m)?)?;
    m.add_function(wrap_pyfunction!(phase_search, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_classify, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_triple, m)?)?;
    m.add_function(wrap_pyfunction!(construct_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify_family, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance_criterion, m)?)?;
    Ok(())
}
