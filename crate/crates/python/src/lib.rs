//! Python bindings for `latdisc`.

use latdisc::analysis::{self, Field};
use latdisc::hardy::{self, OrderRule, PartSelector, Selectors};
use latdisc::lattice_count::{self, CountMethod, IkMode, ScalarPolicy};
use latdisc::special_fn::{self, BesselParams, MainTermKind, MainTermParams, Mode, SeriesConfig};
use latdisc::vaaler::{self, VaalerKind};
use latdisc::Error;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Ambiguous { .. } | Error::Overflow(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

fn policy(name: &str, guard_eps: f64, exponents: &[f64]) -> PyResult<ScalarPolicy> {
    let mut p = match name {
        "auto" => ScalarPolicy::auto(exponents),
        "exact" => ScalarPolicy::exact(),
        "float" => ScalarPolicy::guarded(guard_eps),
        _ => return Err(PyValueError::new_err(format!("unknown policy `{name}`"))),
    };
    if p.mode == lattice_count::PolicyMode::GuardedFloat {
        p.guard_eps = guard_eps;
    }
    Ok(p)
}

fn series(n_max: usize) -> SeriesConfig {
    SeriesConfig { n_max, ..SeriesConfig::default() }
}

#[pyclass(frozen, skip_from_py_object, name = "BodyParams")]
#[derive(Clone)]
struct PyBody(lattice_count::BodyParams);

#[pymethods]
impl PyBody {
    #[new]
    #[pyo3(signature = (m, k, relaxed = false))]
    fn new(m: f64, k: f64, relaxed: bool) -> PyResult<Self> {
        let p = if relaxed { lattice_count::BodyParams::relaxed(m, k) } else { lattice_count::BodyParams::new(m, k) };
        p.map(PyBody).map_err(to_py)
    }

    #[getter]
    fn m(&self) -> f64 {
        self.0.m
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k
    }

    #[getter]
    fn relaxed(&self) -> bool {
        self.0.relaxed
    }

    #[getter]
    fn mk(&self) -> f64 {
        self.0.a()
    }

    fn volume(&self) -> PyResult<f64> {
        special_fn::body_volume(&self.0).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("BodyParams(m={}, k={}, relaxed={})", self.0.m, self.0.k, self.0.relaxed)
    }

    fn exponents(&self) -> Vec<f64> {
        vec![self.0.m, self.0.k, self.0.a()]
    }
}

#[pyclass(frozen, from_py_object, name = "DiscrepancyRecord")]
#[derive(Clone)]
struct PyRecord(analysis::DiscrepancyRecord);

#[pymethods]
impl PyRecord {
    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }
    #[getter(A)]
    fn a(&self) -> u64 {
        self.0.a
    }
    #[getter]
    fn vol_term(&self) -> f64 {
        self.0.vol_term
    }
    #[getter(H1)]
    fn h1(&self) -> f64 {
        self.0.h1
    }
    #[getter(H2)]
    fn h2(&self) -> f64 {
        self.0.h2
    }
    #[getter(P)]
    fn p(&self) -> f64 {
        self.0.p
    }
    #[getter(R)]
    fn r(&self) -> f64 {
        self.0.r
    }
    #[getter]
    fn h_tail_bound(&self) -> f64 {
        self.0.h_tail_bound
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &self.0)
    }

    fn __repr__(&self) -> String {
        let r = &self.0;
        format!("DiscrepancyRecord(x={}, A={}, P={}, R={})", r.x, r.a, r.p, r.r)
    }
}

#[pyclass(frozen, name = "VaalerApprox")]
struct PyVaaler(vaaler::VaalerApprox);

#[pymethods]
impl PyVaaler {
    #[new]
    #[pyo3(signature = (order, kind = "alpha"))]
    fn new(order: u32, kind: &str) -> PyResult<Self> {
        let kind = match kind {
            "alpha" => VaalerKind::Alpha,
            "beta" => VaalerKind::Beta,
            _ => return Err(PyValueError::new_err(format!("kind must be `alpha` or `beta`, got `{kind}`"))),
        };
        vaaler::build_vaaler(order, kind).map(PyVaaler).map_err(to_py)
    }

    #[getter]
    fn order(&self) -> u32 {
        self.0.order()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.0.coeffs().to_vec()
    }

    fn __call__(&self, w: f64) -> f64 {
        vaaler::vaaler_eval(&self.0, w)
    }
}

#[pyfunction]
fn sawtooth(w: f64) -> f64 {
    vaaler::sawtooth(w)
}

#[pyfunction]
#[pyo3(signature = (order, points, slack = 1e-12))]
fn check_bound<'py>(py: Python<'py>, order: u32, points: Vec<f64>, slack: f64) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &vaaler::check_bound(order, &points, slack).map_err(to_py)?)
}

/// Returns `(count, ambiguous)`.
#[pyfunction]
#[pyo3(signature = (body, x, method = "sliced", policy = "auto", guard_eps = 1e-9))]
fn count_a(py: Python<'_>, body: &PyBody, x: f64, method: &str, policy: &str, guard_eps: f64) -> PyResult<(u64, u64)> {
    let method = match method {
        "sliced" => CountMethod::Sliced,
        "brute" => CountMethod::BruteForce,
        _ => return Err(PyValueError::new_err(format!("unknown method `{method}`"))),
    };
    let pol = self::policy(policy, guard_eps, &body.exponents())?;
    let p = body.0;
    let c = py.detach(|| lattice_count::count_a(&p, x, &pol, method)).map_err(to_py)?;
    Ok((c.count, c.ambiguous))
}

/// Returns `(count, ambiguous)`.
#[pyfunction]
#[pyo3(signature = (k, w, policy = "auto", guard_eps = 1e-9))]
fn lame_count(k: f64, w: f64, policy: &str, guard_eps: f64) -> PyResult<(u64, u64)> {
    let c = lattice_count::lame_count(k, w, &self::policy(policy, guard_eps, &[k])?).map_err(to_py)?;
    Ok((c.count, c.ambiguous))
}

/// Returns `(value, ambiguous)`.
#[pyfunction]
#[pyo3(signature = (k, w, policy = "auto", guard_eps = 1e-9))]
fn delta_k(k: f64, w: f64, policy: &str, guard_eps: f64) -> PyResult<(f64, u64)> {
    let d = lattice_count::delta_k(k, w, &self::policy(policy, guard_eps, &[k])?).map_err(to_py)?;
    Ok((d.value, d.ambiguous))
}

#[pyfunction]
#[pyo3(signature = (k, w, mode = "sum", n_max = 200))]
fn i_k(k: f64, w: f64, mode: &str, n_max: usize) -> PyResult<f64> {
    let mode = match mode {
        "sum" => IkMode::Sum,
        "series" => IkMode::Series,
        _ => return Err(PyValueError::new_err(format!("unknown mode `{mode}`"))),
    };
    lattice_count::i_k(k, w, &ScalarPolicy::auto(&[k]), &series(n_max), mode).map_err(to_py)
}

#[pyfunction]
fn slice_identity_residual(k: f64, w: f64) -> PyResult<f64> {
    lattice_count::slice_identity_residual(k, w, &ScalarPolicy::auto(&[k])).map_err(to_py)
}

#[pyfunction]
fn r_count(body: &PyBody, n: u128) -> PyResult<u64> {
    lattice_count::r_count(&body.0, n).map_err(to_py)
}

#[pyfunction]
fn s_sum(py: Python<'_>, body: &PyBody, x: f64) -> PyResult<f64> {
    let p = body.0;
    py.detach(|| lattice_count::s_sum(&p, x, &ScalarPolicy::for_body(&p))).map_err(to_py)
}

#[pyfunction]
fn lame_area(k: f64) -> PyResult<f64> {
    special_fn::lame_area(k).map_err(to_py)
}

#[pyfunction]
fn body_volume(body: &PyBody) -> PyResult<f64> {
    body.volume()
}

#[pyfunction]
#[pyo3(signature = (eta, nu, x, quad_tol = 1e-12))]
fn gen_bessel(eta: f64, nu: f64, x: f64, quad_tol: f64) -> PyResult<f64> {
    let cfg = SeriesConfig { quad_tol, ..SeriesConfig::default() };
    special_fn::gen_bessel(BesselParams::new(eta, nu).map_err(to_py)?, x, &cfg).map_err(to_py)
}

/// Returns `(value, tail_bound)`.
#[pyfunction]
#[pyo3(signature = (eta, nu, x, n_max = 200))]
fn psi_eta_series(eta: f64, nu: f64, x: f64, n_max: usize) -> PyResult<(f64, f64)> {
    let v = special_fn::psi_eta_series(BesselParams::new(eta, nu).map_err(to_py)?, x, &series(n_max)).map_err(to_py)?;
    Ok((v.value, v.tail_bound))
}

#[pyfunction]
#[pyo3(signature = (a, b, x, kind = 1, mode = "asymptotic", n_max = 200))]
fn main_term(a: f64, b: f64, x: f64, kind: u8, mode: &str, n_max: usize) -> PyResult<f64> {
    let kind = MainTermKind::try_from(kind).map_err(to_py)?;
    let mode = match mode {
        "asymptotic" => Mode::Asymptotic,
        "exact" => Mode::Exact,
        _ => return Err(PyValueError::new_err(format!("unknown mode `{mode}`"))),
    };
    special_fn::main_term(MainTermParams::new(a, b).map_err(to_py)?, x, kind, mode, &series(n_max)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (body, x, n_max = 200))]
fn discrepancy_record(py: Python<'_>, body: &PyBody, x: f64, n_max: usize) -> PyResult<PyRecord> {
    let p = body.0;
    py.detach(|| analysis::discrepancy_record(&p, x, &ScalarPolicy::for_body(&p), &series(n_max)))
        .map(PyRecord)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (body, grid, n_max = 200))]
fn sweep(py: Python<'_>, body: &PyBody, grid: Vec<f64>, n_max: usize) -> PyResult<Vec<PyRecord>> {
    let p = body.0;
    let recs = py.detach(|| analysis::sweep(&p, &grid, &ScalarPolicy::for_body(&p), &series(n_max))).map_err(to_py)?;
    Ok(recs.into_iter().map(PyRecord).collect())
}

#[pyfunction]
fn records_to_csv(records: Vec<PyRecord>) -> String {
    let recs: Vec<_> = records.into_iter().map(|r| r.0).collect();
    latdisc::output::records_to_csv(&recs)
}

#[pyfunction]
fn proposition_check(body: &PyBody, x: f64) -> PyResult<f64> {
    let p = body.0;
    analysis::proposition_check(&p, x, &ScalarPolicy::for_body(&p), &SeriesConfig::default()).map_err(to_py)
}

#[pyfunction]
fn classify_exponent<'py>(py: Python<'py>, body: &PyBody) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &analysis::classify_exponent(&body.0).map_err(to_py)?)
}

/// Returns `(slope, intercept, used, dropped)`.
#[pyfunction]
#[pyo3(signature = (records, field = "R"))]
fn fit_exponent(records: Vec<PyRecord>, field: &str) -> PyResult<(f64, f64, usize, usize)> {
    let field = match field {
        "P" => Field::P,
        "R" => Field::R,
        _ => return Err(PyValueError::new_err(format!("field must be `P` or `R`, got `{field}`"))),
    };
    let recs: Vec<_> = records.into_iter().map(|r| r.0).collect();
    let f = analysis::fit_exponent(&recs, field).map_err(to_py)?;
    Ok((f.slope, f.intercept, f.used, f.dropped))
}

fn part(name: &str) -> PyResult<PartSelector> {
    match name {
        "real" => Ok(PartSelector::Real),
        "imag" => Ok(PartSelector::Imag),
        "neg-imag" => Ok(PartSelector::NegImag),
        _ => Err(PyValueError::new_err(format!("unknown part `{name}`"))),
    }
}

#[pyfunction]
#[pyo3(signature = (k, w, lambda_ = 0.47, order = "quarter", alpha_part = "neg-imag", beta_part = "real"))]
fn theorem2_check<'py>(
    py: Python<'py>,
    k: f64,
    w: f64,
    lambda_: f64,
    order: &str,
    alpha_part: &str,
    beta_part: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let rule: OrderRule = order.parse().map_err(to_py)?;
    let sel = Selectors { alpha: part(alpha_part)?, beta: part(beta_part)? };
    to_dict(py, &hardy::theorem2_check(k, w, lambda_, &rule, sel).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (k, w, lambda_ = 0.0, order = "quarter"))]
fn transform_report<'py>(py: Python<'py>, k: f64, w: f64, lambda_: f64, order: &str) -> PyResult<Bound<'py, PyAny>> {
    let rule: OrderRule = order.parse().map_err(to_py)?;
    let s = hardy::build_scheme(k, w, lambda_, 1.0, &rule).map_err(to_py)?;
    to_dict(py, &hardy::transform_report(&s).map_err(to_py)?)
}

#[pymodule]
fn pylatdisc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBody>()?;
    m.add_class::<PyRecord>()?;
    m.add_class::<PyVaaler>()?;
    m.add_function(wrap_pyfunction!(sawtooth, m)?)?;
    m.add_function(wrap_pyfunction!(check_bound, m)?)?;
    m.add_function(wrap_pyfunction!(count_a, m)?)?;
    m.add_function(wrap_pyfunction!(lame_count, m)?)?;
    m.add_function(wrap_pyfunction!(delta_k, m)?)?;
    m.add_function(wrap_pyfunction!(i_k, m)?)?;
    m.add_function(wrap_pyfunction!(slice_identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(r_count, m)?)?;
    m.add_function(wrap_pyfunction!(s_sum, m)?)?;
    m.add_function(wrap_pyfunction!(lame_area, m)?)?;
    m.add_function(wrap_pyfunction!(body_volume, m)?)?;
    m.add_function(wrap_pyfunction!(gen_bessel, m)?)?;
    m.add_function(wrap_pyfunction!(psi_eta_series, m)?)?;
    m.add_function(wrap_pyfunction!(main_term, m)?)?;
    m.add_function(wrap_pyfunction!(discrepancy_record, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(records_to_csv, m)?)?;
    m.add_function(wrap_pyfunction!(proposition_check, m)?)?;
    m.add_function(wrap_pyfunction!(classify_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(theorem2_check, m)?)?;
    m.add_function(wrap_pyfunction!(transform_report, m)?)?;
    Ok(())
}
