//! Python bindings. Structures cross the boundary as objects wrapping the
//! Rust value; reports come back as plain dicts via their JSON form.

// pyo3 0.22 #[pymethods] expansions convert PyErr into itself.
#![allow(clippy::useless_conversion)]

use std::collections::BTreeSet;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use smoothbench::classes::registry::Registry;
use smoothbench::{amalgam, closure, embed, eppa, generic, io, merge, ramsey, workbench, Elem, Error};

create_exception!(smoothbench_py, CapExceeded, PyException, "A search refused to run past its cap.");

fn err(e: Error) -> PyErr {
    match e {
        Error::Input(_) | Error::Parse { .. } | Error::Json(_) => PyValueError::new_err(e.to_string()),
        Error::Cap(_) => CapExceeded::new_err(e.to_string()),
        Error::Integrity(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| err(e.into()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn class(id: &str) -> PyResult<smoothbench::ClassSpec> {
    Registry::new().resolve(id).map_err(err)
}

#[pyclass(name = "Structure", module = "smoothbench_py", frozen)]
#[derive(Clone)]
struct PyStructure {
    inner: smoothbench::Structure,
}

#[pymethods]
impl PyStructure {
    /// Reads the JSON exchange format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyStructure { inner: io::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::to_json(&self.inner)
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn universe(&self) -> Vec<Elem> {
        self.inner.elems()
    }

    fn holds(&self, name: &str, tuple: Vec<Elem>) -> bool {
        self.inner.holds_named(name, &tuple)
    }

    fn induced(&self, elems: BTreeSet<Elem>) -> PyResult<Self> {
        Ok(PyStructure { inner: self.inner.induced(&elems).map_err(err)? })
    }

    fn is_isomorphic(&self, other: &PyStructure) -> bool {
        embed::are_isomorphic(&self.inner, &other.inner)
    }

    fn __eq__(&self, other: &PyStructure) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __repr__(&self) -> String {
        format!("Structure(size={}, universe={:?})", self.inner.size(), self.inner.elems())
    }
}

#[pyclass(name = "ClassSpec", module = "smoothbench_py", frozen)]
struct PyClassSpec {
    inner: smoothbench::ClassSpec,
}

#[pymethods]
impl PyClassSpec {
    /// Resolves a class id such as `all_graphs`, `shelah_spencer:1/2` or a
    /// merge `all_graphs*linear_orders`.
    #[new]
    fn new(id: &str) -> PyResult<Self> {
        Ok(PyClassSpec { inner: class(id)? })
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    fn contains(&self, s: &PyStructure) -> PyResult<bool> {
        self.inner.try_contains(&s.inner).map_err(err)
    }

    /// Whether `a` (a set of elements of `b`) is strong in `b`.
    fn strong(&self, a: BTreeSet<Elem>, b: &PyStructure) -> bool {
        self.inner.strong_set(&a, &b.inner)
    }

    fn closure(&self, b: &PyStructure, a: BTreeSet<Elem>) -> PyResult<Vec<Elem>> {
        Ok(closure::closure_set(&self.inner, &b.inner, &a).map_err(err)?.into_iter().collect())
    }

    #[pyo3(signature = (prop, max_size, padding = None))]
    fn check_property(&self, py: Python<'_>, prop: &str, max_size: usize, padding: Option<usize>) -> PyResult<PyObject> {
        let prop: amalgam::Property = prop.parse().map_err(err)?;
        let r = py.allow_threads(|| amalgam::check_property_with(&self.inner, prop, max_size, padding)).map_err(err)?;
        to_py(py, &r)
    }

    /// Stages of a chain grown from the empty structure.
    fn grow(&self, py: Python<'_>, steps: usize, cap: usize) -> PyResult<Vec<PyStructure>> {
        let c = py.allow_threads(|| generic::grow_generic(&self.inner, steps, cap, None)).map_err(err)?;
        Ok(c.stages.into_iter().map(|inner| PyStructure { inner }).collect())
    }

    fn probe_richness(&self, py: Python<'_>, stage: &PyStructure, a_cap: usize, b_cap: usize) -> PyResult<PyObject> {
        let r = generic::probe_richness(&self.inner, &stage.inner, a_cap, b_cap).map_err(err)?;
        to_py(py, &r)
    }

    #[pyo3(signature = (c, b, a, cap = ramsey::DEFAULT_COLOR_CAP))]
    fn ramsey_check(&self, c: &PyStructure, b: &PyStructure, a: &PyStructure, cap: usize) -> PyResult<bool> {
        ramsey::ramsey_witness_check(&self.inner, &c.inner, &b.inner, &a.inner, cap).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ClassSpec({:?})", self.inner.id)
    }
}

/// Merge amalgam of B and C over their common A (given by inclusion).
#[pyfunction]
fn merge_amalgam(merge_id: &str, a: &PyStructure, b: &PyStructure, c: &PyStructure, cap: usize) -> PyResult<Option<PyStructure>> {
    let m = Registry::new().resolve_merge(merge_id).map_err(err)?;
    let inst = amalgam::AmalgamInstance::inclusions(&a.inner, &b.inner, &c.inner).map_err(err)?;
    let am = merge::merge_amalgam(&m, &inst, cap).map_err(err)?;
    Ok(am.map(|am| PyStructure { inner: am.amalgam.d }))
}

/// The no-edges-out scenario with its certificate.
#[pyfunction]
fn verify_no_eppa(py: Python<'_>, max_size: usize) -> PyResult<PyObject> {
    let r = py.allow_threads(|| eppa::verify_no_eppa(max_size)).map_err(err)?;
    to_py(py, &r)
}

/// Worked scenarios as report dicts; all of them, or one by id or name.
#[pyfunction]
#[pyo3(signature = (scenario = None))]
fn demo(py: Python<'_>, scenario: Option<&str>) -> PyResult<PyObject> {
    let reports = py.allow_threads(|| workbench::demo(scenario, "")).map_err(err)?;
    to_py(py, &reports)
}

#[pymodule]
fn smoothbench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStructure>()?;
    m.add_class::<PyClassSpec>()?;
    m.add_function(wrap_pyfunction!(merge_amalgam, m)?)?;
    m.add_function(wrap_pyfunction!(verify_no_eppa, m)?)?;
    m.add_function(wrap_pyfunction!(demo, m)?)?;
    m.add("CapExceeded", m.py().get_type_bound::<CapExceeded>())?;
    Ok(())
}
