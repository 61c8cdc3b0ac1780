//! Python bindings. Bit vectors cross the boundary as strings of `0`/`1`,
//! one character per latch or input in declaration order.

use std::time::Duration;

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use tapseq_core::aiger::{self, AigModel};
use tapseq_core::baselines::{self, BmcConfig, RandConfig};
use tapseq_core::cnf::Cnf;
use tapseq_core::engine::{self, Counterexample, EngineConfig, Order, Verdict};
use tapseq_core::oracle::{self, OracleResult};
use tapseq_core::sat::{self, DefaultPhase, ResolutionProof, SatResult, SolveOptions};
use tapseq_core::{circuits, encode, witness, InputVector, State};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn limit(seconds: Option<f64>) -> PyResult<Option<Duration>> {
    match seconds {
        None => Ok(None),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(PyValueError::new_err(format!("invalid time limit {s}"))),
    }
}

/// A sequential circuit read from AIGER.
#[pyclass(name = "AigModel", module = "tapseq", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyAigModel {
    inner: AigModel,
}

impl PyAigModel {
    fn state(&self, s: &str) -> PyResult<State> {
        let st: State = s.parse().map_err(value_err)?;
        if st.len() != self.inner.num_latches() {
            return Err(PyValueError::new_err(format!("expected {} latch bits, got {}", self.inner.num_latches(), st.len())));
        }
        Ok(st)
    }

    fn inputs(&self, s: &str) -> PyResult<InputVector> {
        let x: InputVector = s.parse().map_err(value_err)?;
        if x.len() != self.inner.num_inputs() {
            return Err(PyValueError::new_err(format!("expected {} input bits, got {}", self.inner.num_inputs(), x.len())));
        }
        Ok(x)
    }
}

#[pymethods]
impl PyAigModel {
    /// Parses ascii or binary AIGER; `property` selects the bad-state property.
    #[staticmethod]
    #[pyo3(signature = (data, property = 0))]
    fn parse(data: &[u8], property: usize) -> PyResult<Self> {
        let mut inner = aiger::parse_aiger(data).map_err(value_err)?;
        inner.select_property(property).map_err(|e| PyIndexError::new_err(e.to_string()))?;
        Ok(PyAigModel { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, property = 0))]
    fn from_file(path: std::path::PathBuf, property: usize) -> PyResult<Self> {
        let bytes = std::fs::read(&path)?;
        Self::parse(&bytes, property)
    }

    #[getter]
    fn num_inputs(&self) -> usize {
        self.inner.num_inputs()
    }

    #[getter]
    fn num_latches(&self) -> usize {
        self.inner.num_latches()
    }

    #[getter]
    fn num_ands(&self) -> usize {
        self.inner.ands.len()
    }

    #[getter]
    fn num_properties(&self) -> usize {
        self.inner.num_properties()
    }

    #[getter]
    fn property(&self) -> usize {
        self.inner.property_index()
    }

    fn initial_state(&self) -> PyResult<String> {
        Ok(self.inner.initial_state().map_err(value_err)?.to_string())
    }

    /// Returns `(next_state, bad)` for one clock step.
    fn simulate(&self, state: &str, inputs: &str) -> PyResult<(String, bool)> {
        let (next, bad) = self.inner.step_and_bad(&self.state(state)?, &self.inputs(inputs)?);
        Ok((next.to_string(), bad))
    }

    fn is_bad(&self, state: &str, inputs: &str) -> PyResult<bool> {
        Ok(self.inner.eval_bad(&self.state(state)?, &self.inputs(inputs)?))
    }

    /// DIMACS text of the step formula of `state`.
    fn step_formula(&self, state: &str) -> PyResult<String> {
        let (f, _) = encode::encode_step_formula(&self.inner, &self.state(state)?);
        Ok(f.to_dimacs())
    }

    fn to_ascii(&self) -> String {
        self.inner.to_ascii()
    }

    fn to_binary(&self) -> PyResult<Vec<u8>> {
        self.inner.to_binary().map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "AigModel(inputs={}, latches={}, ands={}, property={})",
            self.inner.num_inputs(),
            self.inner.num_latches(),
            self.inner.ands.len(),
            self.inner.property_index()
        )
    }
}

fn cex_dict<'py>(py: Python<'py>, c: &Counterexample, property: usize) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let states: Vec<String> = c.states.iter().map(ToString::to_string).collect();
    let inputs: Vec<String> = c.inputs.iter().map(ToString::to_string).collect();
    d.set_item("states", states)?;
    d.set_item("inputs", inputs)?;
    d.set_item("final_bad_input", c.final_bad_input.to_string())?;
    d.set_item("length", c.depth())?;
    d.set_item("witness", witness::write_witness(c, property))?;
    Ok(d)
}

fn report<'py>(
    py: Python<'py>,
    m: &AigModel,
    verdict: &Verdict,
    stats: Vec<(&'static str, u64)>,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("verdict", verdict.name())?;
    let s = PyDict::new(py);
    for (k, v) in stats {
        s.set_item(k, v)?;
    }
    d.set_item("stats", s)?;
    match verdict.counterexample() {
        Some(c) => d.set_item("counterexample", cex_dict(py, c, m.property_index())?)?,
        None => d.set_item("counterexample", py.None())?,
    }
    Ok(d)
}

/// Runs the proof-guided search. Returns a dict with `verdict`
/// (`bug`, `converged` or `budget`), `stats` and `counterexample`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (model, order = "bfs", randomize = false, seed = 0, max_states = 40_000, time_limit = Some(180.0), trim = true))]
fn run_tapseq<'py>(
    py: Python<'py>,
    model: &PyAigModel,
    order: &str,
    randomize: bool,
    seed: u64,
    max_states: usize,
    time_limit: Option<f64>,
    trim: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let order = match order {
        "bfs" => Order::Bfs,
        "dfs" => Order::Dfs,
        other => return Err(PyValueError::new_err(format!("unknown order {other:?}"))),
    };
    let cfg = EngineConfig {
        order,
        randomize,
        seed,
        max_states,
        time_limit: limit(time_limit)?,
        trim,
        ..Default::default()
    };
    let m = &model.inner;
    let run = py.detach(|| engine::run_tapseq(m, &cfg)).map_err(value_err)?;
    report(py, m, &run.verdict, run.stats.entries())
}

#[pyfunction]
#[pyo3(signature = (model, seed = 0, max_tries = 10_000, max_length = 100, time_limit = None))]
fn run_rand<'py>(
    py: Python<'py>,
    model: &PyAigModel,
    seed: u64,
    max_tries: u64,
    max_length: u64,
    time_limit: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = RandConfig {
        max_tries,
        max_length,
        seed,
        time_limit: limit(time_limit)?,
    };
    let m = &model.inner;
    let run = py.detach(|| baselines::run_rand(m, &cfg)).map_err(value_err)?;
    report(py, m, &run.verdict, run.stats.entries())
}

#[pyfunction]
#[pyo3(signature = (model, max_depth = 100, time_limit = None))]
fn run_bmc<'py>(py: Python<'py>, model: &PyAigModel, max_depth: usize, time_limit: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = BmcConfig {
        max_depth,
        time_limit: limit(time_limit)?,
        ..Default::default()
    };
    let m = &model.inner;
    let run = py.detach(|| baselines::run_bmc(m, &cfg)).map_err(value_err)?;
    report(py, m, &run.verdict, run.stats.entries())
}

/// Explicit-state breadth-first search. The verdict is `bug`, `unreachable`
/// or `budget`; a bug comes with a shortest counterexample.
#[pyfunction]
#[pyo3(signature = (model, max_states = 1 << 20))]
fn explicit_oracle<'py>(py: Python<'py>, model: &PyAigModel, max_states: usize) -> PyResult<Bound<'py, PyDict>> {
    let m = &model.inner;
    let r = py.detach(|| oracle::explicit_oracle(m, max_states)).map_err(value_err)?;
    let d = PyDict::new(py);
    match r {
        OracleResult::Reachable { trace, .. } => {
            d.set_item("verdict", "bug")?;
            d.set_item("counterexample", cex_dict(py, &trace, m.property_index())?)?;
        }
        OracleResult::Unreachable { states } => {
            d.set_item("verdict", "unreachable")?;
            d.set_item("states", states)?;
        }
        OracleResult::Inconclusive { states } => {
            d.set_item("verdict", "budget")?;
            d.set_item("states", states)?;
        }
    }
    Ok(d)
}

/// Solves a DIMACS formula. Returns `("sat", [dimacs literals])`,
/// `("unsat", proof_text_or_None)` or `("budget", None)`.
#[pyfunction]
#[pyo3(signature = (dimacs, proof = true, max_conflicts = None))]
fn solve<'py>(py: Python<'py>, dimacs: &str, proof: bool, max_conflicts: Option<u64>) -> PyResult<(&'static str, Bound<'py, PyAny>)> {
    let f = Cnf::from_dimacs(dimacs).map_err(PyValueError::new_err)?;
    let opts = SolveOptions {
        proof,
        max_conflicts,
        ..Default::default()
    };
    let r = py.detach(|| sat::solve_with(&f, &[], &mut DefaultPhase, opts));
    Ok(match r {
        SatResult::Sat(p) => {
            let lits: Vec<i64> = p.to_lits().iter().map(|l| l.to_dimacs()).collect();
            ("sat", PyList::new(py, lits)?.into_any())
        }
        SatResult::Unsat(Some(pr)) => ("unsat", pr.to_text().into_pyobject(py)?.into_any()),
        SatResult::Unsat(None) => ("unsat", py.None().into_bound(py)),
        SatResult::BudgetExceeded => ("budget", py.None().into_bound(py)),
    })
}

/// Checks a textual resolution proof against a DIMACS formula; raises
/// `ValueError` with the first problem found.
#[pyfunction]
fn check_proof(dimacs: &str, proof: &str) -> PyResult<()> {
    let f = Cnf::from_dimacs(dimacs).map_err(PyValueError::new_err)?;
    let p = ResolutionProof::from_text(&f, proof).map_err(PyValueError::new_err)?;
    sat::check_proof(&f, &p).map_err(value_err)
}

/// Replays an AIGER witness; returns the counterexample dict or raises `ValueError`.
#[pyfunction]
fn validate_witness<'py>(py: Python<'py>, model: &PyAigModel, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let mut m = model.inner.clone();
    let w = witness::parse_witness(text, m.num_latches(), m.num_inputs()).map_err(value_err)?;
    m.select_property(w.property).map_err(value_err)?;
    let c = witness::validate_witness(&m, text).map_err(value_err)?;
    cex_dict(py, &c, w.property)
}

/// Built-in crafted circuits, keyed by name.
#[pyfunction]
fn corpus(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let d = PyDict::new(py);
    for (name, m) in circuits::corpus() {
        d.set_item(name, PyAigModel { inner: m })?;
    }
    Ok(d)
}

#[pymodule]
fn tapseq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAigModel>()?;
    m.add_function(wrap_pyfunction!(run_tapseq, m)?)?;
    m.add_function(wrap_pyfunction!(run_rand, m)?)?;
    m.add_function(wrap_pyfunction!(run_bmc, m)?)?;
    m.add_function(wrap_pyfunction!(explicit_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check_proof, m)?)?;
    m.add_function(wrap_pyfunction!(validate_witness, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
