//! Python bindings: polygons, Hasse polynomials, exact L-polynomials and the
//! Dwork engine.

use newton_lab::dwork::{dwork_run_escalating, DworkBudget};
use newton_lab::hasse::{hasse_polynomial as core_hasse, SparseFpPolynomial};
use newton_lab::oracle::{
    l_polynomial as core_l, newton_polygon, verify_instance as core_verify, LPolynomial,
    LaurentCoeffVector,
};
use newton_lab::polygons::{
    arithmetic_polygon as core_arith, hodge_polygon as core_hodge, lies_on_or_above, IntervalShape,
    LowerPolygon,
};
use newton_lab::LabError;
use pyo3::create_exception;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(newton_lab, NewtonLabError, PyValueError);

fn err(e: LabError) -> PyErr {
    NewtonLabError::new_err(e.to_string())
}

fn shape(p: u64, d: u32, e: u32) -> PyResult<IntervalShape> {
    IntervalShape::for_prime(d, e, p).map_err(err)
}

fn vector(p: u64, d: u32, e: u32, a: &[i64]) -> PyResult<LaurentCoeffVector> {
    LaurentCoeffVector::from_residues(p, shape(p, d, e)?, a).map_err(err)
}

/// A lower polygon over the abscissae `0..=len` with exact rational ordinates.
#[pyclass(name = "Polygon", frozen, eq)]
#[derive(PartialEq)]
pub struct PyPolygon {
    inner: LowerPolygon,
}

#[pymethods]
impl PyPolygon {
    /// Ordinates as `(numerator, denominator)` pairs.
    fn ordinates(&self) -> PyResult<Vec<(i64, i64)>> {
        self.inner
            .ordinates()
            .iter()
            .map(|r| {
                r.to_i64_pair()
                    .ok_or_else(|| PyOverflowError::new_err("ordinate exceeds 64 bits"))
            })
            .collect()
    }

    fn vertices(&self) -> Vec<usize> {
        self.inner.vertices()
    }

    fn is_convex(&self) -> bool {
        self.inner.is_convex()
    }

    fn lies_on_or_above(&self, other: &PyPolygon) -> PyResult<bool> {
        lies_on_or_above(&self.inner, &other.inner).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polygon({})", self.inner)
    }
}

impl From<LowerPolygon> for PyPolygon {
    fn from(inner: LowerPolygon) -> Self {
        PyPolygon { inner }
    }
}

/// The Hasse polynomial `H` over `F_p`.
#[pyclass(name = "HassePolynomial", frozen)]
pub struct PyHasse {
    inner: SparseFpPolynomial,
    p: u64,
    shape: IntervalShape,
}

#[pymethods]
impl PyHasse {
    /// `H(a)` for coefficients `a_{-e}, .., a_d` over `F_p`.
    fn evaluate(&self, a: Vec<i64>) -> PyResult<u32> {
        let f = LaurentCoeffVector::from_residues(self.p, self.shape, &a).map_err(err)?;
        Ok(self.inner.evaluate(&f).map_err(err)?.0[0])
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("HassePolynomial({})", self.inner)
    }
}

/// Exact L-polynomial with coefficients in `Z[zeta_p]`.
#[pyclass(name = "LPolynomial", frozen)]
pub struct PyLPolynomial {
    inner: LPolynomial,
}

#[pymethods]
impl PyLPolynomial {
    /// Coefficients in the basis `1, zeta, .., zeta^(p-2)`.
    fn coefficients(&self) -> PyResult<Vec<Vec<i64>>> {
        self.inner
            .coeffs()
            .iter()
            .map(|c| {
                c.coords_i64()
                    .ok_or_else(|| PyOverflowError::new_err("coefficient exceeds 64 bits"))
            })
            .collect()
    }

    /// `(1 - zeta)`-adic valuations; `None` for zero coefficients.
    fn valuations(&self) -> Vec<Option<u64>> {
        self.inner
            .valuations()
            .into_iter()
            .map(|v| v.finite())
            .collect()
    }

    fn newton_polygon(&self) -> PyResult<PyPolygon> {
        Ok(newton_polygon(&self.inner, self.inner.b())
            .map_err(err)?
            .into())
    }

    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }
}

#[pyfunction]
#[pyo3(signature = (d, e=0))]
fn hodge_polygon(d: u32, e: u32) -> PyResult<PyPolygon> {
    let s = IntervalShape::new(d, e).map_err(err)?;
    Ok(core_hodge(&s).into())
}

#[pyfunction]
#[pyo3(signature = (p, d, e=0))]
fn arithmetic_polygon(p: u64, d: u32, e: u32) -> PyResult<PyPolygon> {
    Ok(core_arith(p, &shape(p, d, e)?).map_err(err)?.into())
}

#[pyfunction]
fn hasse_polynomial(p: u64, d: u32, e: u32) -> PyResult<PyHasse> {
    let s = shape(p, d, e)?;
    Ok(PyHasse {
        inner: core_hasse(p, &s).map_err(err)?,
        p,
        shape: s,
    })
}

#[pyfunction]
fn l_polynomial(p: u64, d: u32, e: u32, a: Vec<i64>) -> PyResult<PyLPolynomial> {
    Ok(PyLPolynomial {
        inner: core_l(&vector(p, d, e, &a)?).map_err(err)?,
    })
}

/// Polygon checks for one vector, as a dict.
#[pyfunction]
fn verify_instance<'py>(
    py: Python<'py>,
    p: u64,
    d: u32,
    e: u32,
    a: Vec<i64>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = core_verify(&vector(p, d, e, &a)?).map_err(err)?;
    let c = &report.checks;
    let out = PyDict::new(py);
    out.set_item("newton_polygon", PyPolygon::from(report.newton.clone()))?;
    out.set_item("hasse_nonzero", report.hasse_nonzero())?;
    out.set_item("hodge_bound_ok", c.hodge_bound_ok)?;
    out.set_item("np_equals_arithmetic", c.np_equals_arithmetic)?;
    out.set_item("generic_match", c.generic_match)?;
    out.set_item("stickelberger_ok", c.stickelberger_ok)?;
    out.set_item("above_arithmetic", c.above_arithmetic)?;
    out.set_item("threshold_met", c.threshold_met)?;
    Ok(out)
}

/// Newton polygon from the Dwork engine with default budgets.
#[pyfunction]
fn dwork_polygon(p: u64, d: u32, e: u32, a: Vec<i64>) -> PyResult<PyPolygon> {
    let f = vector(p, d, e, &a)?;
    let run = dwork_run_escalating(&f, DworkBudget::for_shape(&f.shape())).map_err(err)?;
    Ok(run.polygon.into())
}

#[pymodule]
#[pyo3(name = "newton_lab")]
fn newton_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NewtonLabError", m.py().get_type::<NewtonLabError>())?;
    m.add_class::<PyPolygon>()?;
    m.add_class::<PyHasse>()?;
    m.add_class::<PyLPolynomial>()?;
    m.add_function(wrap_pyfunction!(hodge_polygon, m)?)?;
    m.add_function(wrap_pyfunction!(arithmetic_polygon, m)?)?;
    m.add_function(wrap_pyfunction!(hasse_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(l_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(verify_instance, m)?)?;
    m.add_function(wrap_pyfunction!(dwork_polygon, m)?)?;
    Ok(())
}
