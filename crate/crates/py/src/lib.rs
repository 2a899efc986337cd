use std::sync::Arc;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use pgm_hsp::metacyclic::MetacyclicSim;
use pgm_hsp::msum::{eta_statistics, MSumInstance, MSumSolver, Population, SolverKind};
use pgm_hsp::pgm::{pgm_report as build_report, success_probability_formula, Caps};
use pgm_hsp::pipeline::{solve_hsp, CosetOracle, HiddenSpec, OracleFixture};
use pgm_hsp::states::hidden_subgroup_state_k;
use pgm_hsp::{Elem, Error, GroupElement, SemidirectGroup};

create_exception!(pgm_hsp, CapExceededError, PyValueError);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::CapExceeded { .. } => CapExceededError::new_err(e.to_string()),
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// `int` for `Z_N`, a list of ints for `Z_p^r`.
fn elem(obj: &Bound<'_, PyAny>) -> PyResult<Elem> {
    if let Ok(v) = obj.extract::<u64>() {
        return Ok(Elem(vec![v]));
    }
    Ok(Elem(obj.extract::<Vec<u64>>()?))
}

fn elem_to_py(py: Python<'_>, e: &Elem) -> PyResult<Py<PyAny>> {
    if e.0.len() == 1 {
        Ok(e.0[0].into_pyobject(py)?.into_any().unbind())
    } else {
        Ok(e.0.clone().into_pyobject(py)?.into_any().unbind())
    }
}

/// A semidirect product `A x| Z_p`, built from a group-spec string.
#[pyclass(name = "Group", frozen, module = "pgm_hsp")]
struct PyGroup {
    inner: SemidirectGroup,
}

#[pymethods]
impl PyGroup {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyGroup { inner: spec.parse().map_err(to_py_err)? })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Group('{}')", self.inner)
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn order_a(&self) -> u64 {
        self.inner.abelian().order()
    }

    /// `(a, b) * (a', b')`, elements given as `(a, b)` tuples.
    fn mul(
        &self,
        py: Python<'_>,
        g: (Bound<'_, PyAny>, u64),
        h: (Bound<'_, PyAny>, u64),
    ) -> PyResult<(Py<PyAny>, u64)> {
        let a = self.inner.abelian();
        let reduce = |e: Elem| a.reduce(e.coords()).ok_or_else(|| PyValueError::new_err("wrong number of coordinates"));
        let g = GroupElement::new(reduce(elem(&g.0)?)?, g.1 % self.inner.p());
        let h = GroupElement::new(reduce(elem(&h.0)?)?, h.1 % self.inner.p());
        let r = self.inner.mul(&g, &h);
        Ok((elem_to_py(py, &r.a)?, r.b))
    }

    /// Order of the cyclic subgroup generated by `(d, 1)`.
    fn subgroup_order(&self, d: &Bound<'_, PyAny>) -> PyResult<u64> {
        Ok(self.inner.subgroup_order(&elem(d)?))
    }

    /// Every `d` with `<(d, 1)>` of order `p`.
    fn order_p_elements(&self, py: Python<'_>) -> PyResult<Vec<Py<PyAny>>> {
        self.inner.order_p_elements().iter().map(|d| elem_to_py(py, d)).collect()
    }
}

fn group_arg(obj: &Bound<'_, PyAny>) -> PyResult<SemidirectGroup> {
    if let Ok(g) = obj.cast::<PyGroup>() {
        return Ok(g.get().inner.clone());
    }
    obj.extract::<String>()?.parse().map_err(to_py_err)
}

fn caps(dim_cap: Option<u128>, enum_cap: Option<u128>, pop_cap: Option<u128>) -> Caps {
    let d = Caps::default();
    Caps {
        dim: dim_cap.unwrap_or(d.dim),
        enumeration: enum_cap.unwrap_or(d.enumeration),
        population: pop_cap.unwrap_or(d.population),
    }
}

/// Solutions `b` of `sum_j M^(b_j) x_j = w`, as `{"solutions", "eta", "solver"}`.
#[pyfunction]
#[pyo3(signature = (group, x, w, solver = "auto", enum_cap = None))]
fn solve_msum(
    py: Python<'_>,
    group: &Bound<'_, PyAny>,
    x: Vec<Bound<'_, PyAny>>,
    w: &Bound<'_, PyAny>,
    solver: &str,
    enum_cap: Option<u128>,
) -> PyResult<Py<PyAny>> {
    let g = Arc::new(group_arg(group)?);
    let x = x.iter().map(elem).collect::<PyResult<Vec<_>>>()?;
    let inst = MSumInstance::new(g, x, elem(w)?).map_err(to_py_err)?;
    let s = MSumSolver::new(&inst.group, enum_cap.unwrap_or(caps(None, None, None).enumeration));
    let (x, w) = (&inst.x, &inst.w);
    let (kind, set) = match solver {
        "auto" => s.auto(x, w),
        "brute-force" => s.bruteforce(x, w).map(|r| (SolverKind::BruteForce, r)),
        "metacyclic-dlog" => s.metacyclic(x, w).map(|r| (SolverKind::MetacyclicDlog, r)),
        "heisenberg-closed-form" => s.heisenberg(x, w).map(|r| (SolverKind::HeisenbergClosedForm, r)),
        "jordan" => s.jordan(x, w).map(|r| (SolverKind::Jordan, r)),
        other => return Err(PyValueError::new_err(format!("unknown solver `{other}`"))),
    }
    .map_err(to_py_err)?;
    to_py(py, &serde_json::json!({ "solutions": set.solutions, "eta": set.eta, "solver": kind }))
}

/// `{"counts": {eta: count}, "summary": {...}}`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (group, k, mode = "exhaustive", samples = 10_000, seed = None, pop_cap = None, enum_cap = None))]
fn eta_stats(
    py: Python<'_>,
    group: &Bound<'_, PyAny>,
    k: usize,
    mode: &str,
    samples: u64,
    seed: Option<u64>,
    pop_cap: Option<u128>,
    enum_cap: Option<u128>,
) -> PyResult<Py<PyAny>> {
    let population = match (mode, seed) {
        ("exhaustive", _) => Population::Exhaustive,
        ("sampled", Some(seed)) => Population::Sampled { n: samples, seed },
        ("sampled", None) => return Err(PyValueError::new_err("sampled mode needs a seed")),
        (other, _) => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    };
    let c = caps(None, enum_cap, pop_cap);
    let stats = eta_statistics(&group_arg(group)?, k, population, c.population, c.enumeration).map_err(to_py_err)?;
    let counts = PyDict::new(py);
    for (e, n) in &stats.counts {
        counts.set_item(*e, *n)?;
    }
    let out = PyDict::new(py);
    out.set_item("counts", counts)?;
    out.set_item("summary", to_py(py, &stats.summary_json())?)?;
    Ok(out.into_any().unbind())
}

/// The PGM report: formula and trace success probabilities, eta-tail bracket, optimality.
#[pyfunction]
#[pyo3(signature = (group, k = 1, dim_cap = None, enum_cap = None, pop_cap = None))]
fn pgm_report(
    py: Python<'_>,
    group: &Bound<'_, PyAny>,
    k: usize,
    dim_cap: Option<u128>,
    enum_cap: Option<u128>,
    pop_cap: Option<u128>,
) -> PyResult<Py<PyAny>> {
    let r = build_report(&group_arg(group)?, k, caps(dim_cap, enum_cap, pop_cap)).map_err(to_py_err)?;
    to_py(py, &r)
}

/// `(value, exact)`; `exact` is a rational string or `None` when irrational.
#[pyfunction]
#[pyo3(signature = (group, k = 1))]
fn success_probability(group: &Bound<'_, PyAny>, k: usize) -> PyResult<(f64, Option<String>)> {
    let c = Caps::default();
    let f = success_probability_formula(&group_arg(group)?, k, c.population, c.enumeration).map_err(to_py_err)?;
    Ok((f.value(), f.exact().map(|r| r.to_string())))
}

/// Dense `rho~_d^(x)k` as nested lists of complex numbers.
#[pyfunction]
#[pyo3(signature = (group, d, k = 1, dim_cap = None))]
fn hidden_subgroup_state(
    group: &Bound<'_, PyAny>,
    d: &Bound<'_, PyAny>,
    k: usize,
    dim_cap: Option<u128>,
) -> PyResult<Vec<Vec<Complex64>>> {
    let c = caps(dim_cap, None, None);
    let (rho, _) =
        hidden_subgroup_state_k(&group_arg(group)?, &elem(d)?, k, c.dim, c.enumeration).map_err(to_py_err)?;
    let m = &rho.matrix;
    Ok((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
}

/// Recovers the hidden subgroup from a coset oracle. `hidden` is `"trivial"`,
/// `{"d": ...}` or `{"generators": [[a, b], ...]}`.
#[pyfunction]
#[pyo3(signature = (group, hidden, k = 1, seed = 0, trials = None))]
fn run_hsp(
    py: Python<'_>,
    group: &Bound<'_, PyAny>,
    hidden: &Bound<'_, PyAny>,
    k: usize,
    seed: u64,
    trials: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let text: String = py.import("json")?.call_method1("dumps", (hidden,))?.extract()?;
    let hidden: HiddenSpec = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let fixture = OracleFixture { group: group_arg(group)?, hidden, labeling: "canonical-coset".into() };
    let oracle = CosetOracle::from_fixture(&fixture).map_err(to_py_err)?;
    let sol = solve_hsp(&oracle, k, trials, seed, Caps::default()).map_err(to_py_err)?;
    to_py(py, &serde_json::json!({ "result": sol.subgroup.to_string(), "solution": sol }))
}

/// Exact success rate of the stripped metacyclic algorithm, every branch summed.
#[pyfunction]
fn stripped_exact(py: Python<'_>, group: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let sim = MetacyclicSim::from_group(group_arg(group)?).map_err(to_py_err)?;
    to_py(py, &sim.exact_aggregate().map_err(to_py_err)?)
}

/// Sampled success rate of the stripped algorithm with a 99% Wilson interval.
#[pyfunction]
#[pyo3(signature = (group, trials, seed))]
fn stripped_estimate(py: Python<'_>, group: &Bound<'_, PyAny>, trials: u64, seed: u64) -> PyResult<Py<PyAny>> {
    let sim = MetacyclicSim::from_group(group_arg(group)?).map_err(to_py_err)?;
    to_py(py, &sim.estimate_success_rate(trials, seed).map_err(to_py_err)?)
}

#[pyfunction]
fn perfect_state_overlap(group: &Bound<'_, PyAny>, d: u64, x: u64) -> PyResult<f64> {
    let sim = MetacyclicSim::from_group(group_arg(group)?).map_err(to_py_err)?;
    sim.perfect_state_overlap(d, x).map_err(to_py_err)
}

#[pymodule]
#[pyo3(name = "pgm_hsp")]
fn pgm_hsp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add("CapExceededError", m.py().get_type::<CapExceededError>())?;
    m.add_function(wrap_pyfunction!(solve_msum, m)?)?;
    m.add_function(wrap_pyfunction!(eta_stats, m)?)?;
    m.add_function(wrap_pyfunction!(pgm_report, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(hidden_subgroup_state, m)?)?;
    m.add_function(wrap_pyfunction!(run_hsp, m)?)?;
    m.add_function(wrap_pyfunction!(stripped_exact, m)?)?;
    m.add_function(wrap_pyfunction!(stripped_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_state_overlap, m)?)?;
    Ok(())
}
