//! Python bindings for `matvar-core`.
//!
//! Matrices cross the boundary as nested lists (`float` or `complex`
//! entries); traces and verification reports also export JSON.

use matvar_core::densities::{BetaKind, MatrixBetaParams};
use matvar_core::gammafn::{self, Case};
use matvar_core::matcore::{Matrix, PdMatrix, Scalar};
use matvar_core::reduction::{self, BlockMethod, Family};
use matvar_core::samplers::{SampleScalar, Sampler as CoreSampler};
use matvar_core::verify::{self, CheckSpec, Oracle, SuiteConfig};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::IntoPyObjectExt;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn case_of(complex: bool) -> Case {
    if complex {
        Case::Complex
    } else {
        Case::Real
    }
}

fn rows<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

/// `log Γ_p(α)`, or `log Γ̃_p(α)` when `complex` is set.
#[pyfunction]
#[pyo3(signature = (p, alpha, complex = false))]
fn log_gamma_p(p: usize, alpha: f64, complex: bool) -> PyResult<f64> {
    gammafn::log_mvgamma(p, alpha, case_of(complex)).map_err(value_error)
}

/// `log B_p(α, β)` in the real or complex case.
#[pyfunction]
#[pyo3(signature = (p, alpha, beta, complex = false))]
fn log_beta_p(p: usize, alpha: f64, beta: f64, complex: bool) -> PyResult<f64> {
    gammafn::log_beta_p(p, alpha, beta, case_of(complex)).map_err(value_error)
}

/// A symbolic reduction of one of the integrals to scalar gamma factors.
#[pyclass(frozen, module = "matvar")]
struct Trace {
    inner: reduction::ReductionTrace,
}

#[pymethods]
impl Trace {
    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.name()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn schedule(&self) -> Vec<usize> {
        self.inner.schedule.clone()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }

    /// Exponent of π in the total, as `(numerator, denominator)`.
    #[getter]
    fn pi_exponent(&self) -> (i64, i64) {
        let r = self.inner.total.pi_exponent();
        (*r.numer(), *r.denom())
    }

    fn matches_closed_form(&self) -> bool {
        self.inner.matches_closed_form()
    }

    #[pyo3(signature = (alpha, beta = None))]
    fn log_value(&self, alpha: f64, beta: Option<f64>) -> PyResult<f64> {
        self.inner.log_value(alpha, beta).map_err(value_error)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(value_error)
    }

    #[pyo3(signature = (audit = false))]
    fn render(&self, audit: bool) -> String {
        reduction::render_text(&self.inner, audit)
    }

    fn __repr__(&self) -> String {
        format!("Trace(family='{}', p={}, schedule={:?})", self.family(), self.inner.p, self.inner.schedule)
    }
}

/// Reduces `family` (`gamma_real`, `gamma_complex`, `beta1_real`,
/// `beta1_complex`, `beta2_real`) at dimension `p`.
#[pyfunction]
#[pyo3(signature = (family, p, schedule = None, method = None))]
fn reduce(family: &str, p: usize, schedule: Option<Vec<usize>>, method: Option<&str>) -> PyResult<Trace> {
    let family: Family = family.parse().map_err(value_error)?;
    let method = method.map(str::parse::<BlockMethod>).transpose().map_err(value_error)?;
    let inner = reduction::reduce(family, p, schedule.as_deref(), method).map_err(value_error)?;
    Ok(Trace { inner })
}

/// Reproducible sampler bound to a `(seed, stream)` pair.
#[pyclass(module = "matvar")]
struct Sampler {
    inner: CoreSampler,
}

impl Sampler {
    fn draws<'py, T, F>(&mut self, py: Python<'py>, n: usize, mut draw: F) -> PyResult<Vec<Bound<'py, PyAny>>>
    where
        T: SampleScalar + for<'a> IntoPyObject<'a>,
        F: FnMut(&mut CoreSampler) -> PyResult<PdMatrix<T>>,
    {
        (0..n).map(|_| rows(draw(&mut self.inner)?.matrix()).into_bound_py_any(py)).collect()
    }
}

#[pymethods]
impl Sampler {
    #[new]
    #[pyo3(signature = (seed, stream = 0))]
    fn new(seed: u64, stream: u64) -> Self {
        Sampler { inner: CoreSampler::from_seed(seed, stream) }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.stream().seed
    }

    #[getter]
    fn stream(&self) -> u64 {
        self.inner.stream().stream_id
    }

    /// `n` draws from the standard matrix gamma distribution.
    #[pyo3(signature = (p, alpha, n = 1, complex = false))]
    fn gamma<'py>(&mut self, py: Python<'py>, p: usize, alpha: f64, n: usize, complex: bool) -> PyResult<Vec<Bound<'py, PyAny>>> {
        gammafn::log_mvgamma(p, alpha, case_of(complex)).map_err(value_error)?;
        if complex {
            self.draws::<Complex64, _>(py, n, |s| s.gamma_matrix(p, alpha).map_err(value_error))
        } else {
            self.draws::<f64, _>(py, n, |s| s.gamma_matrix(p, alpha).map_err(value_error))
        }
    }

    /// `n` matrix beta draws; `kind` is `type1` (`O < U < I`) or `type2` (`V > O`).
    #[pyo3(signature = (p, alpha, beta, n = 1, kind = "type1", complex = false))]
    #[allow(clippy::too_many_arguments)]
    fn beta<'py>(
        &mut self,
        py: Python<'py>,
        p: usize,
        alpha: f64,
        beta: f64,
        n: usize,
        kind: &str,
        complex: bool,
    ) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let kind = match kind {
            "type1" => BetaKind::Type1,
            "type2" => BetaKind::Type2,
            other => return Err(value_error(format!("unknown beta kind '{other}' (expected type1|type2)"))),
        };
        let params = MatrixBetaParams::new(p, alpha, beta, kind, case_of(complex)).map_err(value_error)?;
        if complex {
            self.draws::<Complex64, _>(py, n, |s| s.beta_matrix(&params).map_err(value_error))
        } else {
            self.draws::<f64, _>(py, n, |s| s.beta_matrix(&params).map_err(value_error))
        }
    }
}

/// Runs a verification suite and returns the reports as JSON.
///
/// `config` is a suite in JSON form; without it the built-in suite runs.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn verify_suite(py: Python<'_>, config: Option<&str>) -> PyResult<String> {
    let config = match config {
        Some(text) => SuiteConfig::from_json(text).map_err(value_error)?,
        None => verify::default_config(),
    };
    let reports = py.detach(|| verify::run_suite(&config));
    serde_json::to_string(&reports).map_err(value_error)
}

/// Checks one closed form against an oracle (`quadrature` or `mc`).
#[pyfunction]
#[pyo3(signature = (family, p, alpha, beta = None, oracle = "quadrature", n = None, seed = None))]
#[allow(clippy::too_many_arguments)]
fn verify_check(
    py: Python<'_>,
    family: &str,
    p: usize,
    alpha: f64,
    beta: Option<f64>,
    oracle: &str,
    n: Option<usize>,
    seed: Option<u64>,
) -> PyResult<String> {
    let spec = CheckSpec {
        family: family.parse().map_err(value_error)?,
        p,
        alpha,
        beta,
        oracle: oracle.parse::<Oracle>().map_err(value_error)?,
        n,
        seed,
    };
    let report = py.detach(|| verify::run_check(&spec, &SuiteConfig::default()));
    serde_json::to_string(&report).map_err(value_error)
}

#[pymodule]
fn matvar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(log_gamma_p, m)?)?;
    m.add_function(wrap_pyfunction!(log_beta_p, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    m.add_function(wrap_pyfunction!(verify_check, m)?)?;
    m.add_class::<Trace>()?;
    m.add_class::<Sampler>()?;
    Ok(())
}
