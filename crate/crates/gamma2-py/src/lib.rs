//! Python bindings: the main types and operations of the gamma2 toolkit.
//!
//! Build with `cargo build -p gamma2-py --release`; the resulting cdylib
//! imports as the `gamma2_py` module (see python/smoke_test.py).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gamma2::bounds;
use gamma2::families::{self, PolyMode};
use gamma2::functionals::{self, FunctionalReport, Rule, SymmetricPositiveFunction};
use gamma2::heatflow;
use gamma2::quadrature::{SphereQuadrature, ZQuadrature};
use gamma2::sphere::AxisymmetricProfile;
use gamma2::verify;
use gamma2::Gamma2Error;

fn err(e: Gamma2Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A positive antipodally symmetric test function on S².
#[pyclass]
struct SymmetricFunction {
    inner: SymmetricPositiveFunction,
}

impl SymmetricFunction {
    fn rule(&self, quad_n: usize) -> PyResult<Rule> {
        use gamma2::functionals::Representation;
        Ok(match self.inner.representation() {
            Representation::Axisymmetric(_) => {
                Rule::Axisym(ZQuadrature::gauss(quad_n, 3).map_err(err)?)
            }
            Representation::AmbientPoly(_) => {
                Rule::Sphere(SphereQuadrature::product(quad_n, 2 * quad_n).map_err(err)?)
            }
        })
    }
}

#[pymethods]
impl SymmetricFunction {
    /// The quartic family (z² + t)², t > 0.
    #[staticmethod]
    fn quartic(t: f64) -> PyResult<Self> {
        Ok(Self {
            inner: families::make_quartic(t).map_err(err)?,
        })
    }

    /// The scale-invariant variant (1 + z²/t)².
    #[staticmethod]
    fn scaled_quartic(t: f64) -> PyResult<Self> {
        Ok(Self {
            inner: families::scaled_quartic(t).map_err(err)?,
        })
    }

    /// Constant function.
    #[staticmethod]
    fn constant(value: f64) -> PyResult<Self> {
        Ok(Self {
            inner: families::make_constant(value).map_err(err)?,
        })
    }

    /// Deterministic random even polynomial draw on S²;
    /// mode is "density" or "log_density".
    #[staticmethod]
    #[pyo3(signature = (seed, amplitude, mode = "log_density", stream = 0, quad_n = 48))]
    fn random(seed: u64, amplitude: f64, mode: &str, stream: u64, quad_n: usize) -> PyResult<Self> {
        let mode = match mode {
            "density" => PolyMode::Density,
            "log_density" => PolyMode::LogDensity,
            other => {
                return Err(PyValueError::new_err(format!(
                    "mode must be 'density' or 'log_density', got {other:?}"
                )))
            }
        };
        let rule = Rule::Sphere(SphereQuadrature::product(quad_n, 2 * quad_n).map_err(err)?);
        Ok(Self {
            inner: families::sample_random_symmetric_stream(seed, stream, amplitude, mode, &rule)
                .map_err(err)?,
        })
    }

    /// Value on the meridian (sqrt(1-z²), 0, z).
    fn value_at_z(&self, z: f64) -> f64 {
        self.inner.value_at_z(z)
    }

    /// JSON descriptor of the family that built this function.
    fn descriptor(&self) -> PyResult<String> {
        serde_json::to_string(self.inner.descriptor())
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Full functional report as a dict.
    #[pyo3(signature = (quad_n = 64))]
    fn report<'py>(&self, py: Python<'py>, quad_n: usize) -> PyResult<Bound<'py, PyDict>> {
        let rule = self.rule(quad_n)?;
        let report = FunctionalReport::evaluate(&self.inner, &rule).map_err(err)?;
        report_dict(py, &report)
    }

    /// gamma2 functional / Fisher information.
    #[pyo3(signature = (quad_n = 64))]
    fn gamma2_ratio(&self, quad_n: usize) -> PyResult<f64> {
        functionals::gamma2_ratio(&self.inner, &self.rule(quad_n)?).map_err(err)
    }

    /// Fisher information / twice the entropy gap.
    #[pyo3(signature = (quad_n = 64))]
    fn log_sobolev_ratio(&self, quad_n: usize) -> PyResult<f64> {
        functionals::log_sobolev_ratio(&self.inner, &self.rule(quad_n)?).map_err(err)
    }

    /// The three Fisher information forms.
    #[pyo3(signature = (quad_n = 64))]
    fn fisher_information(&self, quad_n: usize) -> PyResult<(f64, f64, f64)> {
        functionals::fisher_information(&self.inner, &self.rule(quad_n)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("SymmetricFunction({:?})", self.inner.descriptor())
    }
}

fn report_dict<'py>(py: Python<'py>, r: &FunctionalReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mass", r.mass)?;
    d.set_item("fisher", r.fisher)?;
    d.set_item("entropy", r.entropy)?;
    d.set_item("gamma2_direct", r.gamma2_direct)?;
    d.set_item("gamma2_bochner", r.gamma2_bochner)?;
    d.set_item("hsq", r.hsq)?;
    d.set_item("gamma2_ratio", r.gamma2_ratio)?;
    d.set_item("log_sobolev_ratio", r.log_sobolev_ratio)?;
    d.set_item("poincare_ratio_sqrtf", r.poincare_ratio_sqrtf)?;
    Ok(d)
}

/// Lower bound d + 3 - 1/(d-1) for the Gamma_2 constant of the symmetric class.
#[pyfunction]
fn lambda_lower(d: usize) -> PyResult<f64> {
    bounds::lambda_lower(d).map_err(err)
}

/// Curvature-dimension generalization of the lower bound.
#[pyfunction]
fn cd_lambda_lower(lambda_m: f64, rho: f64, n: f64) -> PyResult<f64> {
    bounds::cd_lambda_lower(lambda_m, rho, n).map_err(err)
}

#[pyfunction]
fn bakry_emery_lower(rho: f64, n: f64) -> PyResult<f64> {
    bounds::bakry_emery_lower(rho, n).map_err(err)
}

#[pyfunction]
fn rothaus_lower(lambda: f64, rho: f64, n: f64) -> PyResult<f64> {
    bounds::rothaus_lower(lambda, rho, n).map_err(err)
}

#[pyfunction]
fn lichnerowicz_lower(rho: f64, n: f64) -> PyResult<f64> {
    bounds::lichnerowicz_lower(rho, n).map_err(err)
}

/// Quartic-family upper-bound expression for the Gamma_2 constant on S².
#[pyfunction]
fn upper_u(t: f64) -> PyResult<f64> {
    bounds::upper_u(t).map_err(err)
}

/// Quartic-family upper-bound expression for the log-Sobolev constant on S².
#[pyfunction]
fn upper_alpha_expr(t: f64) -> PyResult<f64> {
    bounds::upper_alpha_expr(t).map_err(err)
}

/// (t_star, value, evaluations) of the Gamma_2 upper-bound minimization.
#[pyfunction]
fn minimize_lambda3() -> PyResult<(f64, f64, usize)> {
    let r = bounds::minimize_upper_lambda3().map_err(err)?;
    Ok((r.t_star, r.value, r.evaluations))
}

/// (t_star, value, evaluations) of the log-Sobolev upper-bound minimization.
#[pyfunction]
fn minimize_alpha3() -> PyResult<(f64, f64, usize)> {
    let r = bounds::minimize_upper_alpha3().map_err(err)?;
    Ok((r.t_star, r.value, r.evaluations))
}

/// Mixing parameters (theta, tau) of the lower-bound machinery.
#[pyfunction]
fn theta_tau(d: usize, beta: f64) -> PyResult<(f64, f64)> {
    verify::theta_tau(d, beta).map_err(err)
}

/// Residual of the pointwise combination identity.
#[pyfunction]
fn combination_residual(d: usize, beta: f64, a: f64, b: f64) -> PyResult<f64> {
    verify::combination_residual(d, beta, a, b).map_err(err)
}

#[pyfunction]
fn beta_admissible(d: usize, beta: f64) -> PyResult<bool> {
    verify::beta_admissible(d, beta).map_err(err)
}

/// The bound 2d + (d-2)/(2 beta + 1).
#[pyfunction]
fn lower_bound_from_beta(d: usize, beta: f64) -> PyResult<f64> {
    verify::lower_bound_from_beta(d, beta).map_err(err)
}

/// Rayleigh quotient of an axisymmetric Legendre series
/// g = sum_k coeffs[k] P_k(z).
#[pyfunction]
#[pyo3(signature = (coeffs, quad_n = 64))]
fn poincare_ratio(coeffs: Vec<f64>, quad_n: usize) -> PyResult<f64> {
    let g = AxisymmetricProfile::legendre_series(3, coeffs);
    let rule = ZQuadrature::gauss(quad_n, 3).map_err(err)?;
    functionals::poincare_ratio(&g, &rule).map_err(err)
}

/// Run the identity/inequality verification suite; returns
/// {check_name: {"count": ..., "max_residual": ..., "pass": ...}}.
#[pyfunction]
#[pyo3(signature = (seed = 2718, perturb_tau = 0.0))]
fn run_verification(py: Python<'_>, seed: u64, perturb_tau: f64) -> PyResult<Bound<'_, PyDict>> {
    let summary = verify::run_suite(&verify::SuiteConfig {
        seed,
        tau_perturbation: perturb_tau,
    })
    .map_err(err)?;
    let out = PyDict::new(py);
    for (name, check) in &summary.checks {
        let entry = PyDict::new(py);
        entry.set_item("count", check.count)?;
        entry.set_item("max_residual", check.max_residual)?;
        entry.set_item("pass", check.pass)?;
        out.set_item(name, entry)?;
    }
    Ok(out)
}

/// Heat-flow trace of quartic initial data: dict with times, mass, entropy,
/// fisher and gamma2 series plus the integrated slack at lambda = 5.5.
#[pyfunction]
#[pyo3(signature = (t, t_final = 5.0, steps = 20, quad_n = 64))]
fn heatflow_trace(
    py: Python<'_>,
    t: f64,
    t_final: f64,
    steps: usize,
    quad_n: usize,
) -> PyResult<Bound<'_, PyDict>> {
    let rule = ZQuadrature::gauss(quad_n, 3).map_err(err)?;
    let family = families::QuarticFamily::new(t).map_err(err)?;
    let spectrum = heatflow::decompose(&family.profile(), 4, &rule).map_err(err)?;
    let times: Vec<f64> = (0..=steps)
        .map(|i| t_final * i as f64 / steps as f64)
        .collect();
    let trace = heatflow::trace_flow(&spectrum, &times, &rule).map_err(err)?;
    let slack = heatflow::integrated_inequality(&spectrum, t_final, 5.5, &rule).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("times", trace.times)?;
    out.set_item("mass", trace.mass_series)?;
    out.set_item("entropy", trace.entropy_series)?;
    out.set_item("fisher", trace.fisher_series)?;
    out.set_item("gamma2", trace.gamma2_series)?;
    out.set_item("integrated_slack_at_5_5", slack)?;
    Ok(out)
}

#[pymodule]
fn gamma2_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SymmetricFunction>()?;
    m.add_function(wrap_pyfunction!(lambda_lower, m)?)?;
    m.add_function(wrap_pyfunction!(cd_lambda_lower, m)?)?;
    m.add_function(wrap_pyfunction!(bakry_emery_lower, m)?)?;
    m.add_function(wrap_pyfunction!(rothaus_lower, m)?)?;
    m.add_function(wrap_pyfunction!(lichnerowicz_lower, m)?)?;
    m.add_function(wrap_pyfunction!(upper_u, m)?)?;
    m.add_function(wrap_pyfunction!(upper_alpha_expr, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_lambda3, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_alpha3, m)?)?;
    m.add_function(wrap_pyfunction!(theta_tau, m)?)?;
    m.add_function(wrap_pyfunction!(combination_residual, m)?)?;
    m.add_function(wrap_pyfunction!(beta_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_from_beta, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    m.add_function(wrap_pyfunction!(heatflow_trace, m)?)?;
    Ok(())
}
