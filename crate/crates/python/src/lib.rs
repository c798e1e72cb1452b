//! Python bindings for the twisted CCR algebra toolkit.

use std::sync::Arc;

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;

use twisted_ccr::algebra::{self, AlgebraElement};
use twisted_ccr::constructions;
use twisted_ccr::{CcrTriple, GroupElement};

fn err(e: twisted_ccr::Error) -> PyErr {
    PyValueError::new_err(format!("[{}] {e}", e.code()))
}

#[pyclass(name = "Phase", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PyPhase(twisted_ccr::Phase);

#[pymethods]
impl PyPhase {
    #[new]
    fn new(num: i64, den: u64) -> PyResult<Self> {
        if den == 0 {
            return Err(PyValueError::new_err("denominator must be positive"));
        }
        Ok(PyPhase(twisted_ccr::Phase::new(num, den)))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyPhase).map_err(err)
    }

    #[getter]
    fn numerator(&self) -> u64 {
        self.0.numer()
    }

    #[getter]
    fn denominator(&self) -> u64 {
        self.0.denom()
    }

    fn order(&self) -> u64 {
        self.0.order()
    }

    fn is_one(&self) -> bool {
        self.0.is_one()
    }

    fn conj(&self) -> Self {
        PyPhase(self.0.conj())
    }

    fn __pow__(&self, k: i64, _modulo: Option<i64>) -> Self {
        PyPhase(self.0.pow(k))
    }

    fn __mul__(&self, other: &PyPhase) -> Self {
        PyPhase(self.0 * other.0)
    }

    fn __complex__<'py>(&self, py: Python<'py>) -> Bound<'py, PyComplex> {
        let z = self.0.to_complex();
        PyComplex::from_doubles(py, z.re, z.im)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Phase({})", self.0)
    }
}

#[pyclass(name = "Triple", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTriple(Arc<CcrTriple>);

#[pymethods]
impl PyTriple {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CcrTriple::from_json(text).map(|t| PyTriple(Arc::new(t))).map_err(err)
    }

    #[staticmethod]
    fn pauli() -> Self {
        PyTriple(Arc::new(CcrTriple::pauli()))
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn orders(&self) -> Vec<u32> {
        self.0.spec().generators().iter().map(|g| g.order).collect()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.spec().generators().iter().map(|g| g.label.clone()).collect()
    }

    /// Dimension of the algebra, which is the group order.
    fn dimension(&self) -> u128 {
        self.0.spec().order()
    }

    fn theta(&self, i: usize, j: usize) -> PyResult<PyPhase> {
        if i >= self.0.rank() || j >= self.0.rank() {
            return Err(PyIndexError::new_err("generator index out of range"));
        }
        Ok(PyPhase(self.0.theta(i, j)))
    }

    fn bicharacter(&self, g: Vec<u32>, h: Vec<u32>) -> PyResult<PyPhase> {
        let (g, h) = (self.element(g)?, self.element(h)?);
        Ok(PyPhase(self.0.bicharacter(&g, &h)))
    }

    fn center(&self) -> PyResult<Vec<Vec<u32>>> {
        let basis = algebra::center_basis(&self.0).map_err(err)?;
        Ok(basis.into_iter().map(|g| g.exponents().to_vec()).collect())
    }

    fn is_full_matrix(&self) -> PyResult<bool> {
        algebra::is_full_matrix(&self.0).map(|r| r.is_full_matrix).map_err(err)
    }

    fn monomial(&self, exponents: Vec<u32>) -> PyResult<PyElement> {
        let g = self.element(exponents)?;
        AlgebraElement::monomial(&self.0, &g).map(PyElement).map_err(err)
    }

    fn generator(&self, i: usize) -> PyResult<PyElement> {
        if i >= self.0.rank() {
            return Err(PyIndexError::new_err("generator index out of range"));
        }
        Ok(PyElement(AlgebraElement::generator(&self.0, i)))
    }

    fn element_from_json(&self, text: &str) -> PyResult<PyElement> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        AlgebraElement::from_json(&self.0, &v).map(PyElement).map_err(err)
    }

    fn __eq__(&self, other: &PyTriple) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Triple(orders={:?})", self.orders())
    }
}

impl PyTriple {
    fn element(&self, exponents: Vec<u32>) -> PyResult<GroupElement> {
        let g = GroupElement::from_exponents(exponents);
        self.0.spec().check(&g).map_err(err)?;
        Ok(g)
    }
}

#[pyclass(name = "Element", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyElement(AlgebraElement);

#[pymethods]
impl PyElement {
    fn __mul__(&self, other: &PyElement) -> PyResult<Self> {
        self.0.multiply(&other.0).map(PyElement).map_err(err)
    }

    fn __add__(&self, other: &PyElement) -> PyResult<Self> {
        self.0.try_add(&other.0).map(PyElement).map_err(err)
    }

    fn __sub__(&self, other: &PyElement) -> PyResult<Self> {
        self.0.try_sub(&other.0).map(PyElement).map_err(err)
    }

    fn __eq__(&self, other: &PyElement) -> bool {
        self.0 == other.0
    }

    fn scale(&self, phase: &PyPhase) -> PyResult<Self> {
        self.0.scale_phase(phase.0).map(PyElement).map_err(err)
    }

    fn adjoint(&self) -> Self {
        PyElement(self.0.adjoint())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Trace as an exact string and its complex value.
    fn trace<'py>(&self, py: Python<'py>) -> (String, Bound<'py, PyComplex>) {
        let t = algebra::trace(&self.0);
        let z = t.to_complex();
        (t.to_string(), PyComplex::from_doubles(py, z.re, z.im))
    }

    fn support(&self) -> Vec<Vec<u32>> {
        self.0.terms().keys().map(|g| g.exponents().to_vec()).collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Element({})", self.0)
    }
}

#[pyfunction]
fn pairing_triple(k: usize, p: u32) -> PyResult<PyTriple> {
    constructions::pairing_triple(k, p).map(|t| PyTriple(Arc::new(t.triple))).map_err(err)
}

#[pyfunction]
fn chain_triple(k: usize, p: u32) -> PyResult<PyTriple> {
    constructions::chain_triple(k, p).map(|t| PyTriple(Arc::new(t.triple))).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, pairs, minus = Vec::new()))]
fn nonuniqueness_fragment(p: u32, pairs: usize, minus: Vec<(u32, u32)>) -> PyResult<PyTriple> {
    constructions::nonuniqueness_fragment(&minus, p, pairs)
        .map(|f| PyTriple(Arc::new(f.triple)))
        .map_err(err)
}

/// The φ matrix of the chain triple on `k` pairs at prime `p`.
#[pyfunction]
fn phi_matrix(k: usize, p: u32) -> PyResult<Vec<Vec<f64>>> {
    let ct = constructions::chain_triple(k, p).map_err(err)?;
    let m = constructions::phi_matrix(&ct).map_err(err)?;
    Ok(m.into_iter().map(|row| row.into_iter().map(|v| v.value).collect()).collect())
}

#[pyfunction]
fn recover_order(k: usize, p: u32, slots: Option<Vec<usize>>) -> PyResult<Vec<usize>> {
    let ct = match slots {
        Some(s) => constructions::chain_triple_permuted(k, p, &s),
        None => constructions::chain_triple(k, p),
    }
    .map_err(err)?;
    constructions::recover_order(&ct).map_err(err)
}

/// Runs the command-line front end and returns `(exit_code, output)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    twisted_ccr::cli::run(std::iter::once("ccr".to_string()).chain(args))
}

#[pymodule]
fn ccr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhase>()?;
    m.add_class::<PyTriple>()?;
    m.add_class::<PyElement>()?;
    m.add_function(wrap_pyfunction!(pairing_triple, m)?)?;
    m.add_function(wrap_pyfunction!(chain_triple, m)?)?;
    m.add_function(wrap_pyfunction!(nonuniqueness_fragment, m)?)?;
    m.add_function(wrap_pyfunction!(phi_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(recover_order, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
