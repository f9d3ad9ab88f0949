//! Python bindings: the model type plus fitting, empirical Bayes and
//! sampling entry points. Vectors cross the boundary as Python lists.

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use simplex_priors as sp;
use simplex_priors::{
    ChainConfig, ChainSummary, CountVector, DirichletParams, FrequencySample, SigmaEstimate, SimplexPoint,
    WeightedDirichletModel,
};

fn to_py(e: sp::Error) -> PyErr {
    match e {
        sp::Error::Numerical(_) | sp::Error::LowAcceptance { .. } => PyArithmeticError::new_err(e.to_string()),
        sp::Error::NonConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn params(alpha: Vec<f64>) -> PyResult<DirichletParams> {
    DirichletParams::new(alpha).map_err(to_py)
}

fn sample(rows: Vec<Vec<f64>>) -> PyResult<FrequencySample> {
    FrequencySample::from_rows(rows).map_err(to_py)
}

fn sigma_pair(s: SigmaEstimate) -> (String, Option<f64>) {
    (s.kind().to_string(), s.value())
}

/// `P_{α,g}` with `g` one of `1`, `1 + σH` or `Σ_i p_i^{r_i}`.
#[pyclass(name = "Model", module = "simplex_priors_py", frozen)]
pub struct PyModel {
    inner: WeightedDirichletModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn dirichlet(alpha: Vec<f64>) -> PyResult<Self> {
        Ok(PyModel { inner: WeightedDirichletModel::dirichlet(params(alpha)?).map_err(to_py)? })
    }

    #[staticmethod]
    fn selection(alpha: Vec<f64>, sigma: f64) -> PyResult<Self> {
        Ok(PyModel { inner: WeightedDirichletModel::selection(params(alpha)?, sigma).map_err(to_py)? })
    }

    #[staticmethod]
    fn mixture(alpha: Vec<f64>, r: Vec<u64>) -> PyResult<Self> {
        Ok(PyModel { inner: WeightedDirichletModel::mixture(params(alpha)?, &r).map_err(to_py)? })
    }

    #[getter]
    fn alpha(&self) -> Vec<f64> {
        self.inner.params().as_slice().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `σ` when the weight is `1 + σH`, else `None`.
    #[getter]
    fn sigma(&self) -> Option<f64> {
        self.inner.weight().selection_sigma()
    }

    fn log_density(&self, p: Vec<f64>) -> PyResult<f64> {
        let p = SimplexPoint::new(p).map_err(to_py)?;
        sp::weighted_log_density(&self.inner, &p).map_err(to_py)
    }

    fn posterior(&self, counts: Vec<u64>) -> PyResult<Self> {
        let inner = sp::posterior_update(&self.inner, &CountVector::new(counts)).map_err(to_py)?;
        Ok(PyModel { inner })
    }

    fn posterior_mean(&self, counts: Vec<u64>) -> PyResult<Vec<f64>> {
        sp::posterior_mean(&self.inner, &CountVector::new(counts)).map_err(to_py)
    }

    fn posterior_covariance(&self, counts: Vec<u64>) -> PyResult<Vec<Vec<f64>>> {
        sp::posterior_covariance(&self.inner, &CountVector::new(counts)).map_err(to_py)
    }

    /// Systematic-scan Gibbs draws; selection and Dirichlet models only.
    #[pyo3(signature = (iterations, seed, burn_in=None, thin=1))]
    fn gibbs<'py>(
        &self,
        py: Python<'py>,
        iterations: usize,
        seed: u64,
        burn_in: Option<usize>,
        thin: usize,
    ) -> PyResult<(Vec<Vec<f64>>, Bound<'py, PyDict>)> {
        let config = ChainConfig {
            iterations,
            burn_in: burn_in.unwrap_or(iterations / 10),
            seed,
            thin,
            stream: 0,
        };
        let out = py.detach(|| sp::gibbs_chain(&self.inner, &config)).map_err(to_py)?;
        let summary = summary_dict(py, &out.summary)?;
        summary.set_item("degenerate_restarts", out.degenerate_restarts)?;
        Ok((out.draws.into_iter().map(SimplexPoint::into_vec).collect(), summary))
    }

    /// Exact draws by rejection from Dirichlet proposals.
    fn rejection<'py>(&self, py: Python<'py>, count: usize, seed: u64) -> PyResult<(Vec<Vec<f64>>, f64)> {
        let out = py.detach(|| sp::rejection_sample(&self.inner, count, seed)).map_err(to_py)?;
        Ok((out.draws.into_iter().map(SimplexPoint::into_vec).collect(), out.acceptance_rate))
    }

    fn __repr__(&self) -> String {
        match self.sigma() {
            Some(s) => format!("Model(alpha={:?}, sigma={s})", self.alpha()),
            None => format!("Model(alpha={:?}, terms={})", self.alpha(), self.inner.weight().terms().len()),
        }
    }
}

fn summary_dict<'py>(py: Python<'py>, s: &ChainSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mean", s.mean.clone())?;
    d.set_item("variance", s.variance.clone())?;
    d.set_item("lag1_autocorrelation", s.lag1_autocorrelation.clone())?;
    d.set_item("mc_standard_error", s.mc_standard_error.clone())?;
    d.set_item("retained", s.retained)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (rows, tol=1e-10, max_iter=200))]
fn dirichlet_mle<'py>(py: Python<'py>, rows: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> PyResult<Bound<'py, PyDict>> {
    let fit = sp::dirichlet_mle(&sample(rows)?, tol, max_iter).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("alpha", fit.params.as_slice().to_vec())?;
    d.set_item("log_likelihood", fit.log_likelihood)?;
    d.set_item("gradient_norm", fit.gradient_norm)?;
    d.set_item("iterations", fit.iterations)?;
    d.set_item("clamped", fit.clamped)?;
    Ok(d)
}

/// σ maximizing the selection likelihood with α fixed, as `(kind, value)`.
#[pyfunction]
fn sigma_mle(rows: Vec<Vec<f64>>, alpha: Vec<f64>) -> PyResult<(String, Option<f64>)> {
    Ok(sigma_pair(sp::sigma_mle(&sample(rows)?, &params(alpha)?).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (rows, tol=1e-9, max_iter=500))]
fn selection_mle<'py>(py: Python<'py>, rows: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> PyResult<Bound<'py, PyDict>> {
    let fit = sp::selection_mle_joint(&sample(rows)?, tol, max_iter).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("alpha", fit.params.as_slice().to_vec())?;
    d.set_item("sigma", sigma_pair(fit.sigma))?;
    d.set_item("log_likelihood", fit.log_likelihood)?;
    d.set_item("gradient_norm", fit.gradient_norm)?;
    d.set_item("iterations", fit.iterations)?;
    Ok(d)
}

#[pyfunction]
fn marginal_likelihood(counts: Vec<u64>, alpha: Vec<f64>, sigma: f64) -> PyResult<f64> {
    sp::marginal_likelihood(&CountVector::new(counts), &params(alpha)?, sigma).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (counts, sigma=0.0, full_alpha=false))]
fn eb_estimate<'py>(py: Python<'py>, counts: Vec<u64>, sigma: f64, full_alpha: bool) -> PyResult<Bound<'py, PyDict>> {
    let e = sp::eb_estimate(&CountVector::new(counts), sigma, sp::EbOptions { full_alpha }).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("estimate", e.estimate)?;
    d.set_item("alpha", e.alpha)?;
    d.set_item("log_marginal", e.log_marginal)?;
    d.set_item("degenerate", e.degenerate)?;
    if let Some(fit) = e.fit {
        d.set_item("theta", (fit.theta_hat.kind(), fit.theta_hat.value()))?;
    }
    Ok(d)
}

#[pyfunction]
fn dirichlet_sample(alpha: Vec<f64>, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let draws = sp::dirichlet_sample(&params(alpha)?, count, seed).map_err(to_py)?;
    Ok(draws.into_iter().map(SimplexPoint::into_vec).collect())
}

#[pymodule]
fn simplex_priors_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(dirichlet_mle, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_mle, m)?)?;
    m.add_function(wrap_pyfunction!(selection_mle, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(eb_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_sample, m)?)?;
    Ok(())
}
