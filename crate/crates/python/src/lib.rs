//! Python bindings: parameters, equilibria, homoclinic lobes, sampling and
//! the verification suites.

use homoclinic::oracle::{self, IntegratorConfig};
use homoclinic::{Branch, CartesianState, Stability};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(homoclinic_py, HomoclinicError, PyException);

fn err(e: homoclinic::Error) -> PyErr {
    HomoclinicError::new_err(e.to_string())
}

fn parse_branch(s: &str) -> PyResult<Branch> {
    match s {
        "lower" => Ok(Branch::Lower),
        "upper" => Ok(Branch::Upper),
        other => {
            Err(pyo3::exceptions::PyValueError::new_err(format!("branch must be 'lower' or 'upper', got {other:?}")))
        }
    }
}

#[pyclass(name = "SystemParams", frozen, from_py_object)]
#[derive(Clone)]
pub struct PySystemParams {
    inner: homoclinic::SystemParams,
}

#[pymethods]
impl PySystemParams {
    /// Defaults are the reference set A=0.1, B=0.001, J=1e-5, gamma=pi/9, C=2.
    #[new]
    #[pyo3(signature = (A=0.1, B=0.001, J=1e-5, gamma=std::f64::consts::PI / 9.0, C=2.0))]
    #[allow(non_snake_case)]
    fn new(A: f64, B: f64, J: f64, gamma: f64, C: f64) -> PyResult<Self> {
        homoclinic::SystemParams::new(A, B, J, gamma, C).map(|inner| PySystemParams { inner }).map_err(err)
    }

    #[getter(A)]
    fn amp_a(&self) -> f64 {
        self.inner.amp_a
    }

    #[getter(B)]
    fn amp_b(&self) -> f64 {
        self.inner.amp_b
    }

    #[getter(J)]
    fn detuning(&self) -> f64 {
        self.inner.detuning
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter(C)]
    fn nonlinearity(&self) -> f64 {
        self.inner.nonlinearity
    }

    #[getter(D)]
    fn derived_d(&self) -> f64 {
        self.inner.derived_d()
    }

    fn three_root_condition(&self) -> bool {
        homoclinic::three_root_condition(&self.inner)
    }

    fn hamiltonian(&self, a: f64, b: f64) -> f64 {
        self.inner.hamiltonian(CartesianState::new(a, b))
    }

    fn vector_field(&self, a: f64, b: f64) -> (f64, f64) {
        self.inner.vector_field(CartesianState::new(a, b))
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("SystemParams(A={}, B={}, J={}, gamma={}, C={})", p.amp_a, p.amp_b, p.detuning, p.gamma, p.nonlinearity)
    }
}

#[pyclass(name = "Equilibrium", frozen)]
pub struct PyEquilibrium {
    inner: homoclinic::Equilibrium,
}

#[pymethods]
impl PyEquilibrium {
    #[getter]
    fn a(&self) -> f64 {
        self.inner.cart.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.cart.b
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.polar.rho
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.polar.theta
    }

    #[getter]
    fn eigenvalues(&self) -> (Complex64, Complex64) {
        (self.inner.eigenvalues[0], self.inner.eigenvalues[1])
    }

    #[getter]
    fn stability(&self) -> String {
        self.inner.stability.to_string()
    }

    #[getter]
    fn is_saddle(&self) -> bool {
        self.inner.stability == Stability::Saddle
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    fn __repr__(&self) -> String {
        format!("Equilibrium({}, rho={}, theta={})", self.inner.stability, self.inner.polar.rho, self.inner.polar.theta)
    }
}

#[pyclass(name = "HomoclinicOrbit", frozen)]
pub struct PyHomoclinicOrbit {
    inner: homoclinic::HomoclinicOrbit,
}

#[pymethods]
impl PyHomoclinicOrbit {
    /// Builds a lobe from raw saddle coordinates (for negative controls).
    #[staticmethod]
    fn from_parts(params: &PySystemParams, rho_star: f64, theta_star: f64, branch: &str) -> PyResult<Self> {
        homoclinic::HomoclinicOrbit::from_parts(&params.inner, rho_star, theta_star, parse_branch(branch)?)
            .map(|inner| PyHomoclinicOrbit { inner })
            .map_err(err)
    }

    #[getter]
    fn branch(&self) -> String {
        self.inner.branch.to_string()
    }

    #[getter]
    fn rho_star(&self) -> f64 {
        self.inner.rho_star
    }

    #[getter]
    fn theta_star(&self) -> f64 {
        self.inner.theta_star
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }

    #[getter]
    fn q_coeff(&self) -> f64 {
        self.inner.q_coeff
    }

    fn rate(&self) -> f64 {
        self.inner.rate()
    }

    fn turning_time(&self) -> f64 {
        self.inner.turning_time()
    }

    fn turning_rho(&self) -> f64 {
        self.inner.turning_rho()
    }

    fn rho(&self, t: f64) -> f64 {
        self.inner.rho(t)
    }

    fn rho_dot(&self, t: f64) -> f64 {
        self.inner.rho_dot(t)
    }

    fn theta(&self, t_grid: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.theta_reconstruct(&t_grid).map_err(err)
    }

    /// Samples as a dict of equal-length column lists.
    fn sample<'py>(&self, py: Python<'py>, t_min: f64, t_max: f64, n: usize) -> PyResult<Bound<'py, PyDict>> {
        let rows = self.inner.sample(t_min, t_max, n).map_err(err)?;
        let d = PyDict::new(py);
        let col = |f: fn(&homoclinic::OrbitSample) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        d.set_item("t", col(|s| s.t))?;
        d.set_item("rho", col(|s| s.rho))?;
        d.set_item("theta", col(|s| s.theta))?;
        d.set_item("a", col(|s| s.a))?;
        d.set_item("b", col(|s| s.b))?;
        d.set_item("energy_err", col(|s| s.energy_err))?;
        d.set_item("ode_residual", col(|s| s.ode_residual))?;
        Ok(d)
    }

    /// Max deviation from direct integration started at `t0`.
    #[pyo3(signature = (t0=None, window=f64::INFINITY, rel_tol=1e-12, abs_tol=1e-14))]
    fn shadow(&self, t0: Option<f64>, window: f64, rel_tol: f64, abs_tol: f64) -> PyResult<f64> {
        let cfg = IntegratorConfig { rel_tol, abs_tol, ..Default::default() };
        let t0 = t0.unwrap_or_else(|| self.inner.turning_time());
        oracle::shadow_compare(&self.inner, t0, window, &cfg).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "HomoclinicOrbit({}, rho_star={}, q_coeff={})",
            self.inner.branch, self.inner.rho_star, self.inner.q_coeff
        )
    }
}

#[pyfunction]
fn solve_equilibria(params: &PySystemParams) -> PyResult<Vec<PyEquilibrium>> {
    let eqs = homoclinic::solve_equilibria(&params.inner).map_err(err)?;
    Ok(eqs.into_iter().map(|inner| PyEquilibrium { inner }).collect())
}

/// Existing lobes of the saddle; raises if there is no saddle.
#[pyfunction]
fn build_orbits(params: &PySystemParams) -> PyResult<Vec<PyHomoclinicOrbit>> {
    let set = homoclinic::build_orbits(&params.inner).map_err(err)?;
    Ok(set.orbits.into_iter().map(|inner| PyHomoclinicOrbit { inner }).collect())
}

#[pyfunction]
#[pyo3(signature = (params, rho_star, n=1000, seed=42))]
fn identity_suite<'py>(
    py: Python<'py>,
    params: &PySystemParams,
    rho_star: f64,
    n: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = oracle::identity_suite(&params.inner, rho_star, n, seed);
    let d = PyDict::new(py);
    d.set_item("flow_square", r.flow_square)?;
    d.set_item("energy_factorization", r.energy_factorization)?;
    d.set_item("product_to_linear", r.product_to_linear)?;
    d.set_item("product_to_separable", r.product_to_separable)?;
    d.set_item("max_error", r.max_error())?;
    Ok(d)
}

/// Runs the full verification; returns `{"passed": bool, "checks": {name: (value, tol, passed)}}`.
#[pyfunction]
#[pyo3(signature = (params, rho_star_scale=1.0, seed=42))]
fn verify<'py>(
    py: Python<'py>,
    params: &PySystemParams,
    rho_star_scale: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = homoclinic::VerifyConfig { rho_star_scale, seed, ..Default::default() };
    let rep = homoclinic::verify(&params.inner, &cfg).map_err(err)?;
    let checks = PyDict::new(py);
    for c in &rep.checks {
        checks.set_item(&c.name, (c.value, c.tolerance, c.passed))?;
    }
    let d = PyDict::new(py);
    d.set_item("passed", rep.passed)?;
    d.set_item("rho_star", rep.rho_star)?;
    d.set_item("checks", checks)?;
    Ok(d)
}

#[pymodule]
fn homoclinic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_class::<PyHomoclinicOrbit>()?;
    m.add_function(wrap_pyfunction!(solve_equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(build_orbits, m)?)?;
    m.add_function(wrap_pyfunction!(identity_suite, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("HomoclinicError", m.py().get_type::<HomoclinicError>())?;
    Ok(())
}
