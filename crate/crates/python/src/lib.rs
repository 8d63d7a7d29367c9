//! Python bindings: search runs, mutants and the recombination primitives.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::hmxforge::analysis;
use ::hmxforge::corpus;
use ::hmxforge::encoding::render_suite;
use ::hmxforge::harness::{load_subject_ref, SubjectRef};
use ::hmxforge::lang::TypedUnit;
use ::hmxforge::operators::{sbx_pair, string_splice, CrossoverKind, SbxDraw, SpliceDraw};
use ::hmxforge::search::{evolve, Budget, SearchConfig};

fn load(subject: &str) -> PyResult<TypedUnit> {
    let r = if subject.ends_with(".subj") {
        SubjectRef::File(subject.into())
    } else {
        SubjectRef::Corpus(subject.to_string())
    };
    load_subject_ref(&r)
        .map(|(_, u)| u)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Names of the bundled subjects.
#[pyfunction]
fn corpus_subjects() -> Vec<&'static str> {
    corpus::names(None)
}

/// Runs one search and returns `(result_json, suite_text)`.
#[pyfunction]
#[pyo3(signature = (subject, operator = "hmx", seed = 0, budget_evals = 5000))]
fn generate(
    py: Python<'_>,
    subject: &str,
    operator: &str,
    seed: u64,
    budget_evals: u64,
) -> PyResult<(String, String)> {
    let unit = load(subject)?;
    let operator: CrossoverKind = operator.parse().map_err(PyValueError::new_err)?;
    if budget_evals == 0 {
        return Err(PyValueError::new_err("budget_evals must be positive"));
    }
    let cfg = SearchConfig {
        operator,
        seed,
        budget: Budget::Evaluations(budget_evals),
        ..Default::default()
    };
    let result = py.detach(|| evolve(&unit, &cfg));
    let suite = render_suite(unit.name(), seed, &result.suite);
    Ok((result.to_json(), suite))
}

/// One line per mutant of the subject.
#[pyfunction]
fn mutants(subject: &str) -> PyResult<Vec<String>> {
    let unit = load(subject)?;
    Ok(analysis::generate_mutants(&unit)
        .iter()
        .map(|m| m.to_string())
        .collect())
}

#[pyfunction]
#[pyo3(signature = (v1, v2, u, b = false, eta_c = 2.5))]
fn sbx(v1: f64, v2: f64, u: f64, b: bool, eta_c: f64) -> PyResult<(f64, f64)> {
    if !(0.0..1.0).contains(&u) {
        return Err(PyValueError::new_err("u must lie in [0, 1)"));
    }
    Ok(sbx_pair(v1, v2, &SbxDraw::new(u, b, eta_c)))
}

#[pyfunction]
fn splice(x: &str, y: &str, x_i: usize, y_i: usize) -> (String, String) {
    string_splice(x, y, &SpliceDraw { x_i, y_i })
}

#[pyfunction]
fn a12(xs: Vec<f64>, ys: Vec<f64>) -> f64 {
    analysis::a12(&xs, &ys)
}

/// Two-sided rank-sum p-value.
#[pyfunction]
fn p_value(xs: Vec<f64>, ys: Vec<f64>) -> f64 {
    analysis::p_value(&xs, &ys)
}

#[pymodule]
fn hmxforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(corpus_subjects, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(mutants, m)?)?;
    m.add_function(wrap_pyfunction!(sbx, m)?)?;
    m.add_function(wrap_pyfunction!(splice, m)?)?;
    m.add_function(wrap_pyfunction!(a12, m)?)?;
    m.add_function(wrap_pyfunction!(p_value, m)?)?;
    Ok(())
}
