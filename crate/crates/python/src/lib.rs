//! Python bindings for `sl2cert`.
//!
//! Certificates cross the boundary as plain dictionaries (parsed from the
//! same JSON the command-line tool prints).

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sl2cert::certificate::{self, Certificate, CertificateError};
use sl2cert::elemgen;
use sl2cert::lemma::{self, WitnessOptions};
use sl2cert::norms::{self, FiniteGroupTable};
use sl2cert::rings::{self, PrincipalIdeal, QuotientRing, RingDescriptor, RingElement};
use sl2cert::sl2;

create_exception!(pysl2cert, Sl2CertError, PyException, "Domain error raised by sl2cert.");

fn err<E: Into<CertificateError>>(e: E) -> PyErr {
    let e = e.into();
    Sl2CertError::new_err(format!("{}.{}: {}", e.module(), e.name(), e))
}

fn to_dict<'py>(py: Python<'py>, cert: &Certificate) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (cert.to_json_string(),))
}

/// A ring descriptor: `"Z"`, `"Z[1/m]"` or `"Z[sqrtd]"`.
#[pyclass(module = "pysl2cert", name = "Ring", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyRing {
    inner: RingDescriptor,
}

#[pymethods]
impl PyRing {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        Ok(PyRing { inner: descriptor.parse().map_err(err)? })
    }

    fn element(&self, text: &str) -> PyResult<PyElement> {
        Ok(PyElement { inner: RingElement::parse(self.inner, text).map_err(err)? })
    }

    fn matrix(&self, text: &str) -> PyResult<PyMat2> {
        Ok(PyMat2 { inner: sl2::Mat2::parse(self.inner, text).map_err(err)? })
    }

    fn one(&self) -> PyElement {
        PyElement { inner: RingElement::one(self.inner) }
    }

    fn infinite_order_unit(&self) -> PyResult<PyElement> {
        Ok(PyElement { inner: rings::infinite_order_unit(self.inner).map_err(err)? })
    }

    #[getter]
    fn is_quadratic(&self) -> bool {
        self.inner.is_quadratic()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Ring('{}')", self.inner)
    }
}

#[pyclass(module = "pysl2cert", name = "Element", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyElement {
    inner: RingElement,
}

impl PyElement {
    fn same(&self, other: &PyElement) -> PyResult<()> {
        if self.inner.ring() == other.inner.ring() {
            Ok(())
        } else {
            Err(Sl2CertError::new_err(format!("ring mismatch: {} vs {}", self.inner.ring(), other.inner.ring())))
        }
    }
}

#[pymethods]
impl PyElement {
    #[getter]
    fn ring(&self) -> PyRing {
        PyRing { inner: self.inner.ring() }
    }

    fn __add__(&self, other: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.checked_add(&other.inner).map_err(err)? })
    }

    fn __sub__(&self, other: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.checked_sub(&other.inner).map_err(err)? })
    }

    fn __mul__(&self, other: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { inner: self.inner.checked_mul(&other.inner).map_err(err)? })
    }

    fn __neg__(&self) -> PyElement {
        PyElement { inner: -&self.inner }
    }

    fn __pow__(&self, exponent: i64, _modulo: Option<i64>) -> PyResult<PyElement> {
        self.inner
            .pow_signed(exponent)
            .map(|inner| PyElement { inner })
            .ok_or_else(|| Sl2CertError::new_err(format!("{} is not a unit", self.inner)))
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn is_unit(&self) -> bool {
        self.inner.is_unit()
    }

    /// Numerator for `Z[1/m]`, `a^2 - d b^2` for `Z[sqrt d]`.
    fn norm(&self) -> BigInt {
        self.inner.norm()
    }

    fn divides(&self, other: &PyElement) -> PyResult<bool> {
        self.same(other)?;
        PrincipalIdeal::new(self.inner.clone()).map_err(err)?.contains(&other.inner).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Element('{}', '{}')", self.inner.ring(), self.inner)
    }
}

#[pyclass(module = "pysl2cert", name = "Mat2", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyMat2 {
    inner: sl2::Mat2,
}

#[pymethods]
impl PyMat2 {
    #[new]
    fn new(ring: &PyRing, text: &str) -> PyResult<Self> {
        ring.matrix(text)
    }

    #[staticmethod]
    fn upper(x: &PyElement) -> PyMat2 {
        PyMat2 { inner: sl2::Mat2::upper(x.inner.clone()) }
    }

    #[staticmethod]
    fn lower(x: &PyElement) -> PyMat2 {
        PyMat2 { inner: sl2::Mat2::lower(x.inner.clone()) }
    }

    #[staticmethod]
    fn diagonal(u: &PyElement) -> PyResult<PyMat2> {
        Ok(PyMat2 { inner: sl2::Mat2::diagonal(&u.inner).map_err(err)? })
    }

    #[getter]
    fn ring(&self) -> PyRing {
        PyRing { inner: self.inner.ring() }
    }

    fn entries(&self) -> Vec<PyElement> {
        self.inner.entries().iter().map(|e| PyElement { inner: e.clone() }).collect()
    }

    fn __mul__(&self, other: &PyMat2) -> PyResult<PyMat2> {
        Ok(PyMat2 { inner: self.inner.mul(&other.inner).map_err(err)? })
    }

    fn inverse(&self) -> PyMat2 {
        PyMat2 { inner: self.inner.inverse() }
    }

    /// `g self g^-1`
    fn conjugate_by(&self, g: &PyMat2) -> PyResult<PyMat2> {
        Ok(PyMat2 { inner: sl2::Mat2::conjugate(&g.inner, &self.inner).map_err(err)? })
    }

    fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Mat2(Ring('{}'), '{}')", self.inner.ring(), self.inner)
    }
}

/// Many-units certificate for `c`.
#[pyfunction]
fn find_unit<'py>(py: Python<'py>, c: &PyElement) -> PyResult<Bound<'py, PyAny>> {
    let cert = lemma::find_unit(&c.inner).map_err(err)?;
    to_dict(py, &certificate::many_units(&cert))
}

/// Four-conjugate witness for `E12((u^4 - u^-4) z)`; `u` defaults to the found unit.
#[pyfunction]
#[pyo3(signature = (a, z, u=None, elementary_conjugators=false))]
fn lemma_witness<'py>(
    py: Python<'py>,
    a: &PyMat2,
    z: &PyElement,
    u: Option<&PyElement>,
    elementary_conjugators: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let u = match u {
        Some(u) => u.inner.clone(),
        None => lemma::find_unit(a.inner.a21()).map_err(err)?.u,
    };
    let options = WitnessOptions { elementary_conjugators };
    let w = lemma::lemma2_witness_with(&a.inner, &u, &z.inner, options).map_err(err)?;
    to_dict(py, &certificate::lemma2_witness(&w))
}

#[pyfunction]
fn decompose<'py>(py: Python<'py>, a: &PyMat2) -> PyResult<Bound<'py, PyAny>> {
    let d = elemgen::decompose(&a.inner).map_err(err)?;
    to_dict(py, &certificate::decomposition(&d))
}

#[pyfunction]
fn h_decomposition<'py>(py: Python<'py>, u: &PyElement) -> PyResult<Bound<'py, PyAny>> {
    let d = elemgen::h_decomposition(&u.inner).map_err(err)?;
    to_dict(py, &certificate::h_decomposition(&u.inner, &d))
}

fn group_and_generators(
    modulus: &PyElement,
    generators: Option<Vec<PyMat2>>,
) -> PyResult<(FiniteGroupTable, Vec<norms::GroupElement>)> {
    let ring = modulus.inner.ring();
    let group = FiniteGroupTable::new(QuotientRing::of(modulus.inner.clone()).map_err(err)?).map_err(err)?;
    let matrices: Vec<sl2::Mat2> = match generators {
        Some(gs) => gs.into_iter().map(|g| g.inner).collect(),
        None => [1, -1]
            .into_iter()
            .flat_map(|x| {
                let x = RingElement::from_int(ring, x);
                [sl2::Mat2::upper(x.clone()), sl2::Mat2::lower(x)]
            })
            .collect(),
    };
    let images = matrices.iter().map(|m| group.image(m)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let closure = norms::conjugation_closure(&group, &images);
    Ok((group, closure))
}

/// Word norm of `g` in `SL_2(R/NR)` over the conjugation closure of
/// `generators` (default `E12(+-1), E21(+-1)`); `None` when unreachable.
#[pyfunction]
#[pyo3(signature = (modulus, g, generators=None))]
fn bfs_norm(modulus: &PyElement, g: &PyMat2, generators: Option<Vec<PyMat2>>) -> PyResult<Option<u32>> {
    let (group, closure) = group_and_generators(modulus, generators)?;
    let target = group.image(&g.inner).map_err(err)?;
    norms::bfs_norm(&group, &closure, target).map_err(err)
}

/// Axiom report for the BFS word norm, as a certificate dictionary.
#[pyfunction]
#[pyo3(signature = (modulus, generators=None))]
fn check_norm_axioms<'py>(
    py: Python<'py>,
    modulus: &PyElement,
    generators: Option<Vec<PyMat2>>,
) -> PyResult<Bound<'py, PyAny>> {
    let (group, closure) = group_and_generators(modulus, generators)?;
    let table = norms::bfs_table(&group, &closure).map_err(err)?;
    let report = norms::check_norm_axioms(&group, &table.lengths);
    to_dict(py, &certificate::axiom_report(&group, &table, &report))
}

#[pyfunction]
#[pyo3(signature = (a, modulus, samples=50, seed=0))]
fn lemma_bound<'py>(
    py: Python<'py>,
    a: &PyMat2,
    modulus: &PyElement,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cert = lemma::find_unit(a.inner.a21()).map_err(err)?;
    let ideal = PrincipalIdeal::new(modulus.inner.clone()).map_err(err)?;
    let report = norms::lemma_bound_experiment(&a.inner, &cert, &ideal, samples, seed).map_err(err)?;
    to_dict(py, &certificate::norm_experiment(&report))
}

/// Re-checks a certificate (dictionary or JSON text) from its payload.
/// Returns `False` with no exception when the certificate is rejected.
#[pyfunction]
fn verify_certificate(py: Python<'_>, cert: &Bound<'_, PyAny>) -> PyResult<bool> {
    let text: String = if cert.is_instance_of::<PyDict>() {
        py.import("json")?.call_method1("dumps", (cert,))?.extract()?
    } else {
        cert.extract()?
    };
    let parsed = Certificate::parse(&text).map_err(err)?;
    Ok(certificate::verify(&parsed).is_ok())
}

#[pymodule]
fn pysl2cert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("Sl2CertError", m.py().get_type::<Sl2CertError>())?;
    m.add("__version__", certificate::TOOL_VERSION)?;
    m.add_class::<PyRing>()?;
    m.add_class::<PyElement>()?;
    m.add_class::<PyMat2>()?;
    m.add_function(wrap_pyfunction!(find_unit, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_witness, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(h_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(bfs_norm, m)?)?;
    m.add_function(wrap_pyfunction!(check_norm_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    Ok(())
}
