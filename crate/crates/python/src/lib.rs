//! Python bindings. Exact values cross the boundary as `fractions.Fraction`.

use pfg_core::axioms::{run_suite, verify_mcquillin_equivalence as verify, SuiteConfig};
use pfg_core::game::{parse_embedded, parse_game, serialize_game};
use pfg_core::marginality::{mc_vector as core_mc_vector, PartyGame};
use pfg_core::partitions::{
    enumerate_embedded as core_embedded, enumerate_partitions as core_partitions,
};
use pfg_core::rational::{format_rational, parse_rational};
use pfg_core::values::{
    decompose as core_decompose, project_free, shapley, value_extended,
    value_full_basis as core_full,
};
use pfg_core::{ExtendedMethod, ParseMode, Rational, SchemeKind, ValueVector, WeightScheme};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::sync::PyOnceLock;
use pyo3::types::PyType;

fn err(e: pfg_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    static FRACTION: PyOnceLock<Py<PyType>> = PyOnceLock::new();
    FRACTION
        .import(py, "fractions", "Fraction")?
        .call1((format_rational(x),))
}

fn fractions<'py>(py: Python<'py>, v: &ValueVector) -> PyResult<Vec<Bound<'py, PyAny>>> {
    v.iter().map(|x| fraction(py, x)).collect()
}

/// Accepts int, Fraction or a `p/q` string.
fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    parse_rational(&text).ok_or_else(|| PyValueError::new_err(format!("not a rational: {text}")))
}

/// A partition-function game with exact rational values.
#[pyclass(name = "Game", module = "pfgame")]
struct PyGame {
    inner: pfg_core::Game,
}

#[pymethods]
impl PyGame {
    #[staticmethod]
    #[pyo3(signature = (text, strict = false))]
    fn parse(text: &str, strict: bool) -> PyResult<Self> {
        let mode = if strict {
            ParseMode::Strict
        } else {
            ParseMode::Permissive
        };
        Ok(PyGame {
            inner: parse_game(text, mode).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        serialize_game(&self.inner)
    }

    /// Value of an embedded coalition written as `{1}|{2,3} : {1}`.
    fn value<'py>(&self, py: Python<'py>, embedded: &str) -> PyResult<Bound<'py, PyAny>> {
        let ec = parse_embedded(embedded, self.inner.n()).map_err(err)?;
        fraction(py, &self.inner.get(&ec))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn has_externalities(&self) -> bool {
        self.inner.has_externalities()
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(n={}, nonzero={})",
            self.inner.n(),
            self.inner.nonzero().count()
        )
    }
}

#[pyfunction]
fn value_free<'py>(py: Python<'py>, game: &PyGame) -> PyResult<Vec<Bound<'py, PyAny>>> {
    fractions(py, &value_extended(&game.inner, ExtendedMethod::Free))
}

#[pyfunction]
fn value_mcquillin<'py>(py: Python<'py>, game: &PyGame) -> PyResult<Vec<Bound<'py, PyAny>>> {
    fractions(py, &value_extended(&game.inner, ExtendedMethod::McQuillin))
}

#[pyfunction]
fn value_full_basis<'py>(py: Python<'py>, game: &PyGame) -> PyResult<Vec<Bound<'py, PyAny>>> {
    fractions(py, &core_full(&game.inner))
}

/// Classical Shapley value; the game must have no externalities.
#[pyfunction]
fn shapley_char<'py>(py: Python<'py>, game: &PyGame) -> PyResult<Vec<Bound<'py, PyAny>>> {
    if game.inner.has_externalities() {
        return Err(PyValueError::new_err("game has externalities"));
    }
    fractions(py, &shapley(&project_free(&game.inner)))
}

/// Non-zero basis coefficients as `(embedded coalition, Fraction)` pairs.
#[pyfunction]
fn decompose<'py>(py: Python<'py>, game: &PyGame) -> PyResult<Vec<(String, Bound<'py, PyAny>)>> {
    core_decompose(&game.inner)
        .nonzero()
        .iter()
        .map(|(ec, a)| Ok((ec.to_string(), fraction(py, a)?)))
        .collect()
}

/// Marginal contributions of a 1-indexed agent.
#[pyfunction]
#[pyo3(signature = (game, agent, scheme, normalized = false))]
fn mc_vector<'py>(
    py: Python<'py>,
    game: &PyGame,
    agent: usize,
    scheme: &str,
    normalized: bool,
) -> PyResult<Vec<(String, Bound<'py, PyAny>)>> {
    if agent == 0 || agent > game.inner.n() {
        return Err(PyValueError::new_err(format!("agent {agent} out of range")));
    }
    let kind: SchemeKind = scheme.parse().map_err(err)?;
    let scheme = WeightScheme::named(kind)
        .map_err(err)?
        .with_normalization(normalized);
    let mc = core_mc_vector(&game.inner, agent - 1, &scheme).map_err(err)?;
    mc.entries
        .iter()
        .map(|(ec, x)| Ok((ec.to_string(), fraction(py, x)?)))
        .collect()
}

#[pyfunction]
fn enumerate_partitions(n: usize) -> PyResult<Vec<String>> {
    Ok(core_partitions(n)
        .map_err(err)?
        .iter()
        .map(|p| p.to_string())
        .collect())
}

#[pyfunction]
fn enumerate_embedded(n: usize) -> PyResult<Vec<String>> {
    Ok(core_embedded(n)
        .map_err(err)?
        .iter()
        .map(|e| e.to_string())
        .collect())
}

/// Party game with the given party sizes; the independent agent is last.
#[pyfunction]
#[pyo3(signature = (sizes, base = None))]
fn party_game(sizes: Vec<usize>, base: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<PyGame> {
    let base = match base {
        Some(values) => values
            .iter()
            .map(to_rational)
            .collect::<PyResult<Vec<_>>>()?,
        None => vec![Rational::from_integer(0.into()); sizes.len()],
    };
    let pg = PartyGame::new(&sizes, &base).map_err(err)?;
    Ok(PyGame { inner: pg.game })
}

#[pyfunction]
#[pyo3(signature = (n, trials = 100, seed = 0))]
fn verify_mcquillin_equivalence(
    py: Python<'_>,
    n: usize,
    trials: usize,
    seed: u64,
) -> PyResult<bool> {
    let report = py.detach(|| verify(n, trials, seed)).map_err(err)?;
    Ok(report.passed())
}

/// Runs the axiom suite and returns one report line per check.
#[pyfunction]
#[pyo3(signature = (sizes = vec![2, 3, 4], trials = 100, seed = 0))]
fn check_axioms(
    py: Python<'_>,
    sizes: Vec<usize>,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<String>> {
    let config = SuiteConfig {
        sizes,
        trials,
        seed,
        ..SuiteConfig::default()
    };
    let reports = py.detach(|| run_suite(&config)).map_err(err)?;
    Ok(reports.iter().map(|r| r.to_string()).collect())
}

#[pymodule]
fn pfgame(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_function(wrap_pyfunction!(value_free, m)?)?;
    m.add_function(wrap_pyfunction!(value_mcquillin, m)?)?;
    m.add_function(wrap_pyfunction!(value_full_basis, m)?)?;
    m.add_function(wrap_pyfunction!(shapley_char, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(mc_vector, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_embedded, m)?)?;
    m.add_function(wrap_pyfunction!(party_game, m)?)?;
    m.add_function(wrap_pyfunction!(verify_mcquillin_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(check_axioms, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::types::PyDict;

    const THREE_AGENTS: &str = include_str!("../../core/fixtures/three_agents.game");

    fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
        Python::initialize();
        Python::attach(|py| {
            let m = PyModule::new(py, "pfgame").unwrap();
            pfgame(&m).unwrap();
            f(py, &m);
        });
    }

    #[test]
    fn values_come_back_as_fractions() {
        with_module(|py, m| {
            let game = Bound::new(py, PyGame::parse(THREE_AGENTS, true).unwrap()).unwrap();
            let free = m.getattr("value_free").unwrap().call1((&game,)).unwrap();
            assert_eq!(
                free.repr().unwrap().to_string(),
                "[Fraction(13, 3), Fraction(7, 3), Fraction(10, 3)]"
            );
            let full = m
                .getattr("value_full_basis")
                .unwrap()
                .call1((&game,))
                .unwrap();
            let mcq = m
                .getattr("value_mcquillin")
                .unwrap()
                .call1((&game,))
                .unwrap();
            assert!(full.eq(mcq).unwrap());
        });
    }

    #[test]
    fn party_game_accepts_mixed_base_values() {
        with_module(|py, m| {
            let kwargs = PyDict::new(py);
            kwargs.set_item("base", vec!["-1/2", "2"]).unwrap();
            let game = m
                .getattr("party_game")
                .unwrap()
                .call((vec![1usize, 2],), Some(&kwargs))
                .unwrap();
            let text: String = game.call_method0("to_text").unwrap().extract().unwrap();
            assert!(text.contains("= -1/2"));
            assert!(m
                .getattr("party_game")
                .unwrap()
                .call1((Vec::<usize>::new(),))
                .is_err());
        });
    }

    #[test]
    fn errors_become_value_errors() {
        with_module(|py, m| {
            let parse = m.getattr("Game").unwrap().getattr("parse").unwrap();
            let e = parse.call1(("agents 2\n{1} : {1} = 1\n",)).unwrap_err();
            assert!(e.is_instance_of::<PyValueError>(py));
            let e = m
                .getattr("enumerate_partitions")
                .unwrap()
                .call1((0,))
                .unwrap_err();
            assert!(e.is_instance_of::<PyValueError>(py));
        });
    }
}
