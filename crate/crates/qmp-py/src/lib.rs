//! Python module `qmp` over the core library.
//!
//! Rationals cross the boundary as `fractions.Fraction`; inputs accept anything whose `str()`
//! parses as an integer, decimal or `p/q`. Big integers map to Python `int`.

use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qmp_core::exact::{fmt_q, parse_q, Q};
use qmp_core::lattice::{sym_weights, tensor_weights, YoungDiagram};
use qmp_core::{counting, dh, flow, moment_polytope, multiplicities, stabilizer, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, q: &Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_q(q),))
}

fn fractions<'py>(py: Python<'py>, v: &[Q]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    v.iter().map(|q| fraction(py, q)).collect()
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Q> {
    parse_q(&obj.str()?.to_cow()?).map_err(py_err)
}

fn rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Q>> {
    objs.iter().map(rational).collect()
}

fn diagram(rows: Vec<u32>) -> PyResult<YoungDiagram> {
    YoungDiagram::new(rows).map_err(py_err)
}

/// Kronecker coefficient `g(α, β, γ)`.
#[pyfunction]
fn kronecker(alpha: Vec<u32>, beta: Vec<u32>, gamma: Vec<u32>) -> PyResult<BigUint> {
    Ok(multiplicities::kronecker(&diagram(alpha)?, &diagram(beta)?, &diagram(gamma)?))
}

/// Kronecker coefficient from symmetric-group characters (small `k` only).
#[pyfunction]
fn kronecker_bruteforce(alpha: Vec<u32>, beta: Vec<u32>, gamma: Vec<u32>) -> PyResult<BigUint> {
    multiplicities::kronecker_bruteforce(&diagram(alpha)?, &diagram(beta)?, &diagram(gamma)?).map_err(py_err)
}

#[pyfunction]
fn littlewood_richardson(alpha: Vec<u32>, beta: Vec<u32>, lam: Vec<u32>) -> PyResult<BigUint> {
    Ok(multiplicities::littlewood_richardson(&diagram(alpha)?, &diagram(beta)?, &diagram(lam)?))
}

/// `[g(kα, kβ, kγ) for k in 1..=k_max]`.
#[pyfunction]
fn stretch(alpha: Vec<u32>, beta: Vec<u32>, gamma: Vec<u32>, k_max: u32) -> PyResult<Vec<BigUint>> {
    Ok(multiplicities::stretch(&diagram(alpha)?, &diagram(beta)?, &diagram(gamma)?, k_max))
}

#[pyfunction]
fn contingency_count(k: i64, a: Vec<i64>, b: Vec<i64>, c: Vec<i64>) -> BigUint {
    counting::contingency_count(k, &a, &b, &c)
}

/// Parses a Young diagram written as `"[3,1]"` and returns its rows.
#[pyfunction]
fn parse_diagram(s: &str) -> PyResult<Vec<u32>> {
    Ok(YoungDiagram::from_str(s).map_err(py_err)?.rows().to_vec())
}

#[pyclass(name = "MarginalPolytope", module = "qmp", frozen)]
struct PyMarginalPolytope {
    inner: moment_polytope::MarginalPolytope,
}

#[pymethods]
impl PyMarginalPolytope {
    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims.clone()
    }

    /// Vertices in reduced coordinates (max eigenvalues for qubits).
    fn vertices<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        self.inner.polytope.vertices.iter().map(|v| fractions(py, v)).collect()
    }

    /// Full ordered spectra of each vertex.
    fn full_vertices<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        self.inner.full_vertices().iter().map(|v| fractions(py, v)).collect()
    }

    /// `(normal, offset, source)` with `normal·x ≥ offset`.
    fn facets<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Vec<Bound<'py, PyAny>>, Bound<'py, PyAny>, &'static str)>> {
        self.inner
            .facets
            .iter()
            .map(|f| {
                let h = f.halfspace.normalized();
                let src = match f.source {
                    moment_polytope::FacetSource::Ressayre { .. } => "ressayre",
                    moment_polytope::FacetSource::Bound => "bound",
                };
                Ok((fractions(py, &h.normal)?, fraction(py, &h.offset)?, src))
            })
            .collect()
    }

    fn contains(&self, x: Vec<Bound<'_, PyAny>>) -> PyResult<bool> {
        Ok(self.inner.polytope.contains(&rationals(&x)?))
    }

    fn __repr__(&self) -> String {
        format!("MarginalPolytope(dims={:?}, facets={}, vertices={})", self.inner.dims, self.inner.facets.len(), self.inner.polytope.vertices.len())
    }
}

#[pyfunction]
#[pyo3(signature = (dims, trials = 32, seed = 0x5eed))]
fn marginal_polytope(py: Python<'_>, dims: Vec<usize>, trials: usize, seed: u64) -> PyResult<PyMarginalPolytope> {
    let opts = moment_polytope::PolytopeOptions { trials, seed, samples: 0 };
    let inner = py.detach(|| moment_polytope::marginal_polytope(&dims, &opts)).map_err(py_err)?;
    Ok(PyMarginalPolytope { inner })
}

#[pyclass(name = "Density", module = "qmp", frozen)]
struct PyDensity {
    inner: dh::PiecewiseDensity,
    singular: usize,
}

#[pymethods]
impl PyDensity {
    #[getter]
    fn chambers(&self) -> usize {
        self.inner.pieces.len()
    }

    /// Number of walls carrying a singular contribution (0 for a genuine density).
    #[getter]
    fn singular_walls(&self) -> usize {
        self.singular
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.decomposition.coords.dim()
    }

    fn __call__<'py>(&self, py: Python<'py>, y: Vec<Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
        let y = rationals(&y)?;
        if y.len() != self.dim() {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.dim())));
        }
        fraction(py, &self.inner.eval(&y))
    }

    fn total_mass<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.total_mass())
    }

    /// Per chamber: `{exponents tuple: Fraction}`.
    fn polynomials<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .pieces
            .iter()
            .map(|p| {
                let d = PyDict::new(py);
                for (e, c) in dh::poly_terms(&p.poly) {
                    d.set_item(pyo3::types::PyTuple::new(py, e)?, fraction(py, &c)?)?;
                }
                Ok(d)
            })
            .collect()
    }
}

fn weights_for(dims: Option<Vec<usize>>, sym: Option<usize>) -> PyResult<qmp_core::lattice::WeightSystem> {
    match (dims, sym) {
        (Some(d), None) => tensor_weights(&d).map_err(py_err),
        (None, Some(n)) => sym_weights(2, n).map_err(py_err),
        _ => Err(PyValueError::new_err("pass exactly one of dims or sym")),
    }
}

/// Eigenvalue density of random marginals of `C^{d_1} ⊗ …` or `Sym^n(C^2)`. For two factors
/// the density is that of the first marginal alone, since both share their spectrum.
#[pyfunction]
#[pyo3(signature = (dims = None, sym = None))]
fn eigenvalue_density(py: Python<'_>, dims: Option<Vec<usize>>, sym: Option<usize>) -> PyResult<PyDensity> {
    let na = match dims.as_deref() {
        Some(&[a, b]) if sym.is_none() => py.detach(|| dh::bipartite_density(a, b)),
        _ => {
            let ws = weights_for(dims, sym)?;
            py.detach(|| dh::non_abelian_density(&ws))
        }
    }
    .map_err(py_err)?;
    Ok(PyDensity { singular: na.singular.len(), inner: na.density })
}

/// Abelian (diagonal) density as a chamber-wise polynomial.
#[pyfunction]
#[pyo3(signature = (dims = None, sym = None))]
fn abelian_density(py: Python<'_>, dims: Option<Vec<usize>>, sym: Option<usize>) -> PyResult<PyDensity> {
    let ws = weights_for(dims, sym)?;
    let inner = py.detach(|| dh::chamber_polynomials(&ws)).map_err(py_err)?;
    Ok(PyDensity { inner, singular: 0 })
}

#[pyfunction]
fn average_linear_entropy_bosonic<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &dh::average_linear_entropy_bosonic(n).map_err(py_err)?)
}

#[pyclass(name = "Submodule", module = "qmp", frozen)]
struct PySubmodule {
    inner: stabilizer::Submodule,
}

fn entropy_dict<'py>(py: Python<'py>, v: &stabilizer::EntropyVector) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for (s, val) in &v.values {
        let key = pyo3::types::PyTuple::new(py, stabilizer::subset_parties(*s))?;
        match val.in_log_d(v.d) {
            Some(q) => out.set_item(key, fraction(py, &q)?)?,
            None => out.set_item(key, val.to_f64_log_d(v.d))?,
        }
    }
    Ok(out)
}

#[pymethods]
impl PySubmodule {
    /// Span of integer generators in `Z_d^{2n}`, laid out `(q_1, p_1, q_2, p_2, …)`.
    #[new]
    fn new(n: usize, d: i64, generators: Vec<Vec<i64>>) -> PyResult<Self> {
        let space = stabilizer::PhaseSpace::new(n, d).map_err(py_err)?;
        Ok(PySubmodule { inner: stabilizer::Submodule::span(space, &generators).map_err(py_err)? })
    }

    #[getter]
    fn generators(&self) -> Vec<Vec<i64>> {
        self.inner.generators().to_vec()
    }

    fn cardinality(&self) -> BigUint {
        self.inner.cardinality()
    }

    fn is_isotropic(&self) -> bool {
        self.inner.is_isotropic()
    }

    fn is_lagrangian(&self) -> bool {
        self.inner.is_lagrangian()
    }

    fn complement(&self) -> PySubmodule {
        PySubmodule { inner: self.inner.symplectic_complement() }
    }

    fn contains(&self, v: Vec<i64>) -> bool {
        v.len() == self.inner.space.dim() && self.inner.contains(&v)
    }

    /// `{parties tuple: S_I}` in units of `log d` (float only when irrational in those units).
    fn entropies<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        entropy_dict(py, &stabilizer::entropy_vector(&self.inner).map_err(py_err)?)
    }

    fn classical_entropies<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        entropy_dict(py, &stabilizer::classical_model_entropies(&self.inner).map_err(py_err)?)
    }

    fn __eq__(&self, other: &PySubmodule) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Submodule(n={}, d={}, generators={:?})", self.inner.space.n, self.inner.space.d, self.inner.generators())
    }
}

/// Sweep of inequality families over all isotropic subspaces; one dict per family.
#[pyfunction]
#[pyo3(signature = (n, d, families = vec!["ssa".to_string()]))]
fn stabilizer_sweep<'py>(py: Python<'py>, n: usize, d: i64, families: Vec<String>) -> PyResult<Bound<'py, PyList>> {
    let fams = families.iter().map(|f| stabilizer::InequalityFamily::parse(f)).collect::<qmp_core::Result<Vec<_>>>().map_err(py_err)?;
    let report = py.detach(|| stabilizer::stabilizer_sweep(n, d, &fams)).map_err(py_err)?;
    let out = PyList::empty(py);
    for f in &report.families {
        let item = PyDict::new(py);
        item.set_item("family", f.family.name())?;
        item.set_item("instances", f.instances)?;
        item.set_item("violations", f.violations)?;
        item.set_item("balanced", f.balanced)?;
        match f.min_slack.as_ref().and_then(|s| s.in_log_d(d)) {
            Some(q) => item.set_item("min_slack", fraction(py, &q)?)?,
            None => item.set_item("min_slack", f.min_slack.as_ref().map(|s| s.to_f64_log_d(d)))?,
        }
        item.set_item("submodules", report.submodules)?;
        item.set_item("distinct_vectors", report.vectors.len())?;
        out.append(item)?;
    }
    Ok(out)
}

fn state(dims: Vec<usize>, amps: Vec<Complex64>) -> PyResult<flow::PureState> {
    flow::PureState::new(dims, amps).map_err(py_err)
}

/// Largest eigenvalue of each one-body marginal.
#[pyfunction]
fn max_eigenvalues(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> PyResult<Vec<f64>> {
    Ok(flow::marginals(&state(dims, amplitudes)?).max_eigenvalues())
}

/// Gradient flow of `‖μ‖²`; returns `{"converged", "lambda", "norm2", "trace", "state"}`.
#[pyfunction]
#[pyo3(signature = (dims, amplitudes, dt = 0.1, max_steps = 20_000))]
fn flow_to_minimum<'py>(py: Python<'py>, dims: Vec<usize>, amplitudes: Vec<Complex64>, dt: f64, max_steps: usize) -> PyResult<Bound<'py, PyDict>> {
    let psi = state(dims, amplitudes)?;
    let opts = flow::FlowOptions { dt, max_steps, ..flow::FlowOptions::default() };
    let res = py.detach(|| flow::flow_to_minimum(&psi, &opts));
    let out = PyDict::new(py);
    out.set_item("converged", res.converged)?;
    out.set_item("monotone", res.trace.is_monotone())?;
    out.set_item("lambda", res.marginals.max_eigenvalues())?;
    out.set_item("norm2", res.trace.points.last().map(|p| p.norm2))?;
    out.set_item("trace", res.trace.points.iter().map(|p| p.norm2).collect::<Vec<_>>())?;
    out.set_item("state", res.state.amplitudes().to_vec())?;
    Ok(out)
}

/// Haar-random state with a fixed seed.
#[pyfunction]
fn haar_state(dims: Vec<usize>, seed: u64) -> Vec<Complex64> {
    flow::haar_sample(&dims, seed).amplitudes().to_vec()
}

#[pymodule]
fn qmp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(littlewood_richardson, m)?)?;
    m.add_function(wrap_pyfunction!(stretch, m)?)?;
    m.add_function(wrap_pyfunction!(contingency_count, m)?)?;
    m.add_function(wrap_pyfunction!(parse_diagram, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_polytope, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalue_density, m)?)?;
    m.add_function(wrap_pyfunction!(abelian_density, m)?)?;
    m.add_function(wrap_pyfunction!(average_linear_entropy_bosonic, m)?)?;
    m.add_function(wrap_pyfunction!(stabilizer_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(max_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(flow_to_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(haar_state, m)?)?;
    m.add_class::<PyMarginalPolytope>()?;
    m.add_class::<PyDensity>()?;
    m.add_class::<PySubmodule>()?;
    Ok(())
}
