//! Python bindings: grids, step functions, exponents, spaces and the experiment drivers.
//!
//! Structured reports cross the boundary as plain dicts and lists.

use std::sync::Arc;

use envlab_core as core;
use envlab_core::envelope::Family;
use envlab_core::probe::{ProbeOptions, ProbeThresholds};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: core::Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let s: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&s).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Tensor-product grid given by per-axis breakpoints.
#[pyclass(frozen, skip_from_py_object, name = "Grid")]
#[derive(Clone)]
struct PyGrid(Arc<core::TensorGrid>);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(breakpoints: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self(Arc::new(core::TensorGrid::new(breakpoints).map_err(err)?)))
    }

    #[staticmethod]
    fn uniform(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>) -> PyResult<Self> {
        let dom = core::BoxDomain::new(lo, hi).map_err(err)?;
        Ok(Self(Arc::new(core::TensorGrid::uniform(&dom, &cells).map_err(err)?)))
    }

    #[staticmethod]
    #[pyo3(signature = (lo, hi, levels, cells = 1))]
    fn dyadic(lo: Vec<f64>, hi: Vec<f64>, levels: u32, cells: usize) -> PyResult<Self> {
        let dom = core::BoxDomain::new(lo, hi).map_err(err)?;
        Ok(Self(Arc::new(core::TensorGrid::dyadic_uniform(&dom, levels, cells).map_err(err)?)))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn shape(&self) -> Vec<usize> {
        self.0.shape().to_vec()
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.0.n_cells()
    }

    #[getter]
    fn breakpoints(&self) -> Vec<Vec<f64>> {
        self.0.all_breakpoints().to_vec()
    }

    fn cell_measures(&self) -> Vec<f64> {
        self.0.cell_measures().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Grid(shape={:?})", self.0.shape())
    }
}

/// Non-increasing rearrangement as `(value, mass)` plateaus.
#[pyclass(frozen, name = "Profile")]
struct PyProfile(core::ValueMassProfile);

#[pymethods]
impl PyProfile {
    #[getter]
    fn plateaus(&self) -> Vec<(f64, f64)> {
        self.0.plateaus().to_vec()
    }

    #[getter]
    fn total_mass(&self) -> f64 {
        self.0.total_mass()
    }

    /// `f*(t)`.
    fn __call__(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    fn distribution(&self, s: f64) -> f64 {
        self.0.distribution(s)
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        core::lp_norm(&self.0, p).map_err(err)
    }

    fn lorentz_norm(&self, p: f64, q: f64) -> PyResult<f64> {
        core::lorentz_norm(&self.0, core::LorentzIndex::new(p, q).map_err(err)?).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Piecewise-constant function on a grid, values in row-major cell order.
#[pyclass(frozen, skip_from_py_object, name = "StepFunction")]
#[derive(Clone)]
struct PyStepFunction(core::StepFunction);

#[pymethods]
impl PyStepFunction {
    #[new]
    fn new(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self(core::StepFunction::new(grid.0.clone(), values).map_err(err)?))
    }

    #[staticmethod]
    fn constant(grid: &PyGrid, value: f64) -> PyResult<Self> {
        Ok(Self(core::StepFunction::constant(grid.0.clone(), value).map_err(err)?))
    }

    #[staticmethod]
    #[pyo3(signature = (grid, intervals, value = 1.0))]
    fn product_indicator(grid: &PyGrid, intervals: Vec<(f64, f64)>, value: f64) -> PyResult<Self> {
        let f = core::product_indicator(&grid.0, &intervals).map_err(err)?;
        Ok(Self(f.scaled(value).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self(core::StepFunction::from_json(s).map_err(err)?))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid().clone())
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn support_measure(&self) -> f64 {
        self.0.support_measure()
    }

    fn rearrange(&self) -> PyProfile {
        PyProfile(core::rearrange(&self.0))
    }

    fn distribution(&self, s: f64) -> f64 {
        core::distribution(&self.0, s)
    }
}

/// Variable exponent `p(·)`, optionally with a distinguished point `x0`.
#[pyclass(frozen, skip_from_py_object, name = "Exponent")]
#[derive(Clone)]
struct PyExponent(core::ExponentField);

#[pymethods]
impl PyExponent {
    #[new]
    #[pyo3(signature = (field, x0 = None))]
    fn new(field: &PyStepFunction, x0: Option<Vec<f64>>) -> PyResult<Self> {
        let mut p = core::ExponentField::new(field.0.clone()).map_err(err)?;
        if let Some(x0) = x0 {
            p = p.with_x0(x0).map_err(err)?;
        }
        Ok(Self(p))
    }

    #[getter]
    fn p_minus(&self) -> f64 {
        self.0.p_minus()
    }

    #[getter]
    fn p_plus(&self) -> f64 {
        self.0.p_plus()
    }

    fn value_at(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.value_at(&x).map_err(err)
    }

    fn modular(&self, f: &PyStepFunction) -> PyResult<f64> {
        core::modular(&f.0, &self.0).map_err(err)
    }

    #[pyo3(signature = (x0, js, threshold))]
    fn log_hoelder_check<'py>(&self, py: Python<'py>, x0: Vec<f64>, js: Vec<u32>, threshold: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &core::log_hoelder_check(&self.0, &x0, &js, threshold).map_err(err)?)
    }
}

/// A function space on a grid: Lebesgue, Lorentz, mixed or variable exponent.
#[pyclass(frozen, name = "Space")]
struct PySpace(core::SpaceSpec);

#[pymethods]
impl PySpace {
    #[staticmethod]
    fn lebesgue(grid: &PyGrid, p: f64) -> PyResult<Self> {
        Ok(Self(core::SpaceSpec::classical(grid.0.clone(), p, None).map_err(err)?))
    }

    #[staticmethod]
    fn lorentz(grid: &PyGrid, p: f64, q: f64) -> PyResult<Self> {
        core::LorentzIndex::new(p, q).map_err(err)?;
        Ok(Self(core::SpaceSpec::classical(grid.0.clone(), p, Some(q)).map_err(err)?))
    }

    #[staticmethod]
    #[pyo3(signature = (grid, p, q = None))]
    fn mixed(grid: &PyGrid, p: Vec<f64>, q: Option<f64>) -> PyResult<Self> {
        let p = core::MixedExponent::new(p).map_err(err)?;
        Ok(Self(core::SpaceSpec::mixed(grid.0.clone(), p, q).map_err(err)?))
    }

    #[staticmethod]
    #[pyo3(signature = (exponent, q = None))]
    fn variable(exponent: &PyExponent, q: Option<f64>) -> PyResult<Self> {
        Ok(Self(core::SpaceSpec::variable(exponent.0.clone(), q).map_err(err)?))
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    #[getter]
    fn theoretical_alpha(&self) -> f64 {
        self.0.theoretical_alpha()
    }

    fn norm(&self, f: &PyStepFunction) -> PyResult<f64> {
        self.0.norm(&f.0).map_err(err)
    }

    /// Certified lower envelope at `t_samples`; `fit` is an optional `(t_lo, t_hi)` range.
    #[pyo3(signature = (t_samples, families = None, fit = None))]
    fn envelope<'py>(
        &self,
        py: Python<'py>,
        t_samples: Vec<f64>,
        families: Option<Vec<String>>,
        fit: Option<(f64, f64)>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let families: Vec<Family> = match families {
            Some(names) => names
                .iter()
                .map(|n| serde_json::from_value(serde_json::Value::String(n.clone())))
                .collect::<Result<_, _>>()
                .map_err(|e| PyValueError::new_err(e.to_string()))?,
            None => vec![Family::NormalizedIndicators],
        };
        let mut curve = core::envelope_lower(&self.0, &t_samples, &families).map_err(err)?;
        if let Some((lo, hi)) = fit {
            curve = curve.with_fit(lo, hi).map_err(err)?;
        }
        to_py(py, &curve)
    }

    /// Hardy-functional ratios along a witness cascade; `witness` is a dict such as
    /// `{"kind": "cascade", "alpha": 1.02, "j0": 4}`.
    #[pyo3(signature = (v, witness, k_min, k_max, eps = None, thresholds = None))]
    #[allow(clippy::too_many_arguments)]
    fn index_probe<'py>(
        &self,
        py: Python<'py>,
        v: f64,
        witness: &Bound<'py, PyAny>,
        k_min: u32,
        k_max: u32,
        eps: Option<f64>,
        thresholds: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let witness: core::WitnessSpec = from_py(witness)?;
        let thresholds: ProbeThresholds = thresholds.map(from_py).transpose()?.unwrap_or_default();
        let report = core::index_probe(&self.0, v, &witness, k_min..=k_max, &ProbeOptions { eps, thresholds })
            .map_err(err)?;
        to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!("Space({})", self.0.label())
    }
}

#[pyfunction]
fn dyadic_t_samples(k_lo: u32, k_hi: u32) -> Vec<f64> {
    core::dyadic_t_samples(k_lo, k_hi)
}

#[pyfunction]
#[pyo3(signature = (f, p, tol = core::DEFAULT_TOL))]
fn variable_norm(f: &PyStepFunction, p: &PyExponent, tol: f64) -> PyResult<f64> {
    core::variable_norm(&f.0, &p.0, tol).map_err(err)
}

#[pyfunction]
fn mixed_norm(f: &PyStepFunction, p: Vec<f64>) -> PyResult<f64> {
    core::mixed_norm(&f.0, &core::MixedExponent::new(p).map_err(err)?).map_err(err)
}

#[pyfunction]
fn lorentz_tilde_norm(f: &PyStepFunction, p: f64, q: f64) -> PyResult<f64> {
    core::lorentz_tilde_norm(&f.0, core::LorentzIndex::new(p, q).map_err(err)?).map_err(err)
}

/// Lower and upper Hardy-functional values for `t^{-1/r} (1 + |ln t|)^{-γ}` on `(0, s)`.
#[pyfunction]
#[pyo3(signature = (r, gamma, s, levels, alpha, v, eps))]
#[allow(clippy::too_many_arguments)]
fn hardy_bracket(r: f64, gamma: f64, s: f64, levels: u32, alpha: f64, v: f64, eps: f64) -> PyResult<(f64, f64)> {
    let prof = core::AnalyticProfile::power_log(r, gamma, s).map_err(err)?;
    let b = core::hardy_bracket(&prof, levels, alpha, v, eps).map_err(err)?;
    Ok((b.lower, b.upper))
}

#[pyfunction]
#[pyo3(signature = (p, eps, truncations, alphas = None))]
fn non_embedding_witness<'py>(
    py: Python<'py>,
    p: Vec<f64>,
    eps: f64,
    truncations: Vec<f64>,
    alphas: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = core::MixedExponent::new(p).map_err(err)?;
    to_py(py, &core::non_embedding_witness(&p, eps, &truncations, alphas.as_deref()).map_err(err)?)
}

#[pymodule]
fn envlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyStepFunction>()?;
    m.add_class::<PyExponent>()?;
    m.add_class::<PySpace>()?;
    m.add_function(wrap_pyfunction!(dyadic_t_samples, m)?)?;
    m.add_function(wrap_pyfunction!(variable_norm, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_norm, m)?)?;
    m.add_function(wrap_pyfunction!(lorentz_tilde_norm, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(non_embedding_witness, m)?)?;
    Ok(())
}
