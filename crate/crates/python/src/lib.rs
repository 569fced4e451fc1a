//! Python bindings: instances, schedules, exact simulation, the four
//! parameter-setting strategies and landscape scans.

use linxfer::landscape::{self, best_point, Plane, ScanConfig};
use linxfer::oracle::{self, Method};
use linxfer::problems::{self, gen_maxcut, gen_random_ising, gen_sk, Edge};
use linxfer::schedules::{fit_linear, fourier_to_schedule, interp_extend, linear_schedule};
use linxfer::simulator;
use linxfer::strategies::{self, Reference, StrategyName, Target};
use linxfer::{AngleConvention, CostTable, FourierCoeffs, NormalizationMode};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

/// `(slope, intercept, r_squared)`.
type FitTuple = (f64, f64, f64);

fn to_py_err(err: linxfer::Error) -> PyErr {
    use linxfer::Error;
    match err {
        Error::InvalidArgument(_) | Error::LengthMismatch { .. } | Error::TooManyQubits { .. } | Error::Json(_) => {
            PyValueError::new_err(err.to_string())
        }
        Error::NotNormalized(_) | Error::MissingReference => PyRuntimeError::new_err(err.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for linxfer::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

fn convention(name: &str) -> PyResult<AngleConvention> {
    match name {
        "gate" => Ok(AngleConvention::Gate),
        "hamiltonian" => Ok(AngleConvention::Hamiltonian),
        _ => Err(PyValueError::new_err(format!(
            "unknown convention {name:?}; use 'gate' or 'hamiltonian'"
        ))),
    }
}

fn convention_name(c: AngleConvention) -> &'static str {
    match c {
        AngleConvention::Gate => "gate",
        AngleConvention::Hamiltonian => "hamiltonian",
    }
}

/// `None`, `"sqrt_edges"` or a float X for `|e_ref| / X`.
fn normalization(mode: Option<&Bound<'_, PyAny>>) -> PyResult<Option<NormalizationMode>> {
    let Some(mode) = mode else { return Ok(None) };
    if mode.is_none() {
        return Ok(None);
    }
    if let Ok(name) = mode.extract::<String>() {
        return match name.as_str() {
            "sqrt_edges" => Ok(Some(NormalizationMode::SqrtEdges)),
            _ => Err(PyValueError::new_err(format!("unknown normalization {name:?}"))),
        };
    }
    let x: f64 = mode.extract()?;
    Ok(Some(NormalizationMode::FixedX { x }))
}

#[pyclass(name = "IsingInstance", module = "pylinxfer", frozen, from_py_object)]
#[derive(Clone)]
struct PyIsingInstance {
    inner: problems::IsingInstance,
}

#[pymethods]
impl PyIsingInstance {
    #[new]
    #[pyo3(signature = (n_qubits, edges, offset = 0.0, label = String::new()))]
    fn new(n_qubits: usize, edges: Vec<(usize, usize, f64)>, offset: f64, label: String) -> PyResult<Self> {
        let edges = edges
            .into_iter()
            .map(|(i, j, coupling)| Edge { i, j, coupling })
            .collect();
        let inner = problems::IsingInstance::new(n_qubits, edges, offset, label).py()?;
        Ok(PyIsingInstance { inner })
    }

    #[staticmethod]
    fn random_ising(n_qubits: usize, d_edges: f64, seed: u64) -> PyResult<Self> {
        Ok(PyIsingInstance {
            inner: gen_random_ising(n_qubits, d_edges, seed).py()?,
        })
    }

    #[staticmethod]
    fn maxcut(n_qubits: usize, d_edges: f64, seed: u64) -> PyResult<Self> {
        Ok(PyIsingInstance {
            inner: gen_maxcut(n_qubits, d_edges, seed).py()?,
        })
    }

    #[staticmethod]
    fn sk(n_qubits: usize, variance: f64, seed: u64) -> PyResult<Self> {
        Ok(PyIsingInstance {
            inner: gen_sk(n_qubits, variance, seed).py()?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyIsingInstance {
            inner: problems::IsingInstance::from_json(text).py()?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.inner.n_edges()
    }

    #[getter]
    fn offset(&self) -> f64 {
        self.inner.offset()
    }

    #[getter]
    fn label(&self) -> &str {
        self.inner.label()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.i, e.j, e.coupling)).collect()
    }

    /// Energy of a bitstring; character k is qubit k, `'1'` is spin −1.
    fn energy(&self, bitstring: &str) -> PyResult<f64> {
        let config = problems::SpinConfig::from_bitstring(bitstring).py()?;
        problems::energy(&self.inner, &config).py()
    }

    fn __repr__(&self) -> String {
        format!(
            "IsingInstance({:?}, n_qubits={}, n_edges={})",
            self.inner.label(),
            self.n_qubits(),
            self.n_edges()
        )
    }
}

#[pyclass(name = "LinearParams", module = "pylinxfer", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyLinearParams {
    inner: linxfer::LinearParams,
}

#[pymethods]
impl PyLinearParams {
    #[new]
    fn new(gamma_slope: f64, gamma_intcp: f64, beta_slope: f64, beta_intcp: f64) -> PyResult<Self> {
        let inner = linxfer::LinearParams::new(gamma_slope, gamma_intcp, beta_slope, beta_intcp).py()?;
        Ok(PyLinearParams { inner })
    }

    /// Trained on a 16-qubit random Ising instance at p = 8.
    #[staticmethod]
    fn reference() -> Self {
        PyLinearParams {
            inner: linxfer::LinearParams::REFERENCE,
        }
    }

    #[staticmethod]
    fn rough_guess() -> Self {
        PyLinearParams {
            inner: linxfer::LinearParams::ROUGH_GUESS,
        }
    }

    fn schedule(&self, p: usize) -> PyResult<PySchedule> {
        Ok(PySchedule {
            inner: linear_schedule(&self.inner, p).py()?,
        })
    }

    /// `[gamma_slope, gamma_intcp, beta_slope, beta_intcp]`.
    #[allow(clippy::wrong_self_convention)]
    fn to_list(&self) -> Vec<f64> {
        self.inner.to_array().to_vec()
    }

    #[getter]
    fn gamma_slope(&self) -> f64 {
        self.inner.gamma_slope
    }

    #[getter]
    fn gamma_intcp(&self) -> f64 {
        self.inner.gamma_intcp
    }

    #[getter]
    fn beta_slope(&self) -> f64 {
        self.inner.beta_slope
    }

    #[getter]
    fn beta_intcp(&self) -> f64 {
        self.inner.beta_intcp
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.inner.to_array();
        format!("LinearParams(gamma_slope={a}, gamma_intcp={b}, beta_slope={c}, beta_intcp={d})")
    }
}

#[pyclass(name = "Schedule", module = "pylinxfer", frozen, from_py_object)]
#[derive(Clone)]
struct PySchedule {
    inner: linxfer::Schedule,
}

#[pymethods]
impl PySchedule {
    #[new]
    fn new(gammas: Vec<f64>, betas: Vec<f64>) -> PyResult<Self> {
        Ok(PySchedule {
            inner: linxfer::Schedule::new(gammas, betas).py()?,
        })
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn gammas(&self) -> Vec<f64> {
        self.inner.gammas().to_vec()
    }

    #[getter]
    fn betas(&self) -> Vec<f64> {
        self.inner.betas().to_vec()
    }

    /// `((gamma_slope, gamma_intcp, r2), (beta_slope, beta_intcp, r2))`.
    fn fit_line(&self) -> PyResult<(FitTuple, FitTuple)> {
        let p = self.inner.p();
        let g = fit_linear(self.inner.gammas(), p).py()?;
        let b = fit_linear(self.inner.betas(), p).py()?;
        Ok(((g.slope, g.intercept, g.r_squared), (b.slope, b.intercept, b.r_squared)))
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule(gammas={:?}, betas={:?})",
            self.inner.gammas(),
            self.inner.betas()
        )
    }
}

#[pyclass(name = "GroundTruth", module = "pylinxfer", frozen, get_all)]
struct PyGroundTruth {
    energy: f64,
    bitstring: String,
    method: &'static str,
    degeneracy: Option<u64>,
}

#[pyclass(name = "StrategyReport", module = "pylinxfer", frozen)]
struct PyStrategyReport {
    inner: strategies::StrategyReport,
}

#[pymethods]
impl PyStrategyReport {
    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name.as_str()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn expectation(&self) -> f64 {
        self.inner.expectation
    }

    #[getter]
    fn ratio(&self) -> Option<f64> {
        self.inner.ratio
    }

    #[getter]
    fn e_ref(&self) -> Option<f64> {
        self.inner.e_ref
    }

    #[getter]
    fn eval_count(&self) -> usize {
        self.inner.eval_count
    }

    #[getter]
    fn tunable_params(&self) -> usize {
        self.inner.tunable_params
    }

    #[getter]
    fn normalization_factor(&self) -> Option<f64> {
        self.inner.normalization_factor
    }

    #[getter]
    fn convention(&self) -> &'static str {
        convention_name(self.inner.convention)
    }

    #[getter]
    fn schedule(&self) -> PySchedule {
        PySchedule {
            inner: self.inner.schedule.clone(),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    fn __repr__(&self) -> String {
        format!(
            "StrategyReport({}, p={}, expectation={}, ratio={:?}, eval_count={})",
            self.inner.name, self.inner.p, self.inner.expectation, self.inner.ratio, self.inner.eval_count
        )
    }
}

#[pyclass(name = "Landscape", module = "pylinxfer", frozen)]
struct PyLandscape {
    inner: landscape::LandscapeGrid,
}

#[pymethods]
impl PyLandscape {
    #[getter]
    fn slope_axis(&self) -> Vec<f64> {
        self.inner.slope_axis.clone()
    }

    #[getter]
    fn intcp_axis(&self) -> Vec<f64> {
        self.inner.intcp_axis.clone()
    }

    /// Rows follow the slope axis, columns the intercept axis.
    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.inner
            .values
            .chunks(self.inner.intcp_axis.len())
            .map(<[f64]>::to_vec)
            .collect()
    }

    #[getter]
    fn normalization_factor(&self) -> Option<f64> {
        self.inner.normalization.map(|n| n.factor)
    }

    /// `(slope, intcp, value)` of the lowest cell.
    fn best(&self) -> (f64, f64, f64) {
        let b = best_point(&self.inner);
        (b.slope, b.intcp, b.value)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Exhaustive => "exhaustive",
        Method::Annealing => "annealing",
    }
}

/// Ground state by enumeration (`"exhaustive"`), annealing, or `"auto"`
/// (enumeration up to 24 qubits).
#[pyfunction]
#[pyo3(signature = (instance, method = "auto", sweeps = 1000, restarts = 16, seed = 0))]
fn ground_truth(
    py: Python<'_>,
    instance: &PyIsingInstance,
    method: &str,
    sweeps: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<PyGroundTruth> {
    let inst = &instance.inner;
    let exact = match method {
        "exhaustive" => true,
        "annealing" => false,
        "auto" => inst.n_qubits() <= oracle::DEFAULT_ENUMERATION_CAP,
        _ => return Err(PyValueError::new_err(format!("unknown method {method:?}"))),
    };
    let truth = py
        .detach(|| {
            if exact {
                oracle::brute_force_min(inst)
            } else {
                oracle::simulated_annealing(inst, sweeps, restarts, seed)
            }
        })
        .py()?;
    Ok(PyGroundTruth {
        energy: truth.energy,
        bitstring: truth.config.to_bitstring(),
        method: method_name(truth.method),
        degeneracy: truth.degeneracy,
    })
}

/// Exact `<C>` of the QAOA state.
#[pyfunction]
#[pyo3(signature = (instance, schedule, convention = "gate"))]
fn expectation(py: Python<'_>, instance: &PyIsingInstance, schedule: &PySchedule, convention: &str) -> PyResult<f64> {
    let conv = self::convention(convention)?;
    py.detach(|| {
        let table = CostTable::build(&instance.inner)?;
        Ok(simulator::qaoa_expectation(
            &table,
            &conv.to_hamiltonian(&schedule.inner),
        ))
    })
    .py()
}

/// Measurement histogram as `[(bitstring, count, energy), ...]`.
#[pyfunction]
#[pyo3(signature = (instance, schedule, shots = 1024, seed = 0, convention = "gate"))]
fn sample(
    py: Python<'_>,
    instance: &PyIsingInstance,
    schedule: &PySchedule,
    shots: u64,
    seed: u64,
    convention: &str,
) -> PyResult<Vec<(String, u64, f64)>> {
    let conv = self::convention(convention)?;
    let set = py
        .detach(|| {
            let table = CostTable::build(&instance.inner)?;
            let state = simulator::evolve(&table, &conv.to_hamiltonian(&schedule.inner));
            simulator::sample(&state, shots, seed, &table)
        })
        .py()?;
    Ok(set
        .records
        .into_iter()
        .map(|r| (r.bitstring, r.count, r.energy))
        .collect())
}

fn target(instance: &problems::IsingInstance, e_ref: Option<f64>, conv: AngleConvention) -> linxfer::Result<Target> {
    let t = match e_ref {
        Some(energy) => Target::with_reference(
            instance.clone(),
            Reference {
                energy,
                method: Method::Annealing,
            },
        )?,
        None => Target::new(instance.clone())?,
    };
    Ok(t.with_convention(conv))
}

/// Runs `standard`, `interp`, `fourier` or `linxfer` at depth `p`. The
/// reference energy is exact up to 24 qubits unless `e_ref` is given.
#[pyfunction]
#[pyo3(signature = (instance, strategy, p, budget = strategies::DEFAULT_BUDGET, fourier_terms = strategies::DEFAULT_FOURIER_TERMS, params = None, e_ref = None, convention = "gate"))]
#[allow(clippy::too_many_arguments)]
fn run_strategy(
    py: Python<'_>,
    instance: &PyIsingInstance,
    strategy: &str,
    p: usize,
    budget: usize,
    fourier_terms: usize,
    params: Option<PyLinearParams>,
    e_ref: Option<f64>,
    convention: &str,
) -> PyResult<PyStrategyReport> {
    let name: StrategyName = strategy.parse().py()?;
    let conv = self::convention(convention)?;
    let lp = params.map_or(linxfer::LinearParams::REFERENCE, |p| p.inner);
    let inner = py
        .detach(|| {
            let t = target(&instance.inner, e_ref, conv)?;
            match name {
                StrategyName::Standard => strategies::run_standard(&t, p, budget),
                StrategyName::Interp => strategies::run_interp(&t, p, budget),
                StrategyName::Fourier => strategies::run_fourier(&t, p, fourier_terms, budget),
                StrategyName::Linxfer => strategies::linxfer_apply(&lp, &t, p, None),
            }
        })
        .py()?;
    Ok(PyStrategyReport { inner })
}

/// Applies linear parameters without optimization; `normalization` is
/// `None`, `"sqrt_edges"` or a float X.
#[pyfunction]
#[pyo3(signature = (params, instance, p, normalization = None, e_ref = None, convention = "gate"))]
fn transfer(
    py: Python<'_>,
    params: &PyLinearParams,
    instance: &PyIsingInstance,
    p: usize,
    normalization: Option<&Bound<'_, PyAny>>,
    e_ref: Option<f64>,
    convention: &str,
) -> PyResult<PyStrategyReport> {
    let mode = self::normalization(normalization)?;
    let conv = self::convention(convention)?;
    let inner = py
        .detach(|| strategies::linxfer_apply(&params.inner, &target(&instance.inner, e_ref, conv)?, p, mode))
        .py()?;
    Ok(PyStrategyReport { inner })
}

/// Trains the four linear parameters with the Parzen-estimator search.
#[pyfunction]
#[pyo3(signature = (instance, p, trials = strategies::DEFAULT_TRIALS, seed = 0, convention = "gate"))]
fn train(
    py: Python<'_>,
    instance: &PyIsingInstance,
    p: usize,
    trials: usize,
    seed: u64,
    convention: &str,
) -> PyResult<(PyLinearParams, f64)> {
    let conv = self::convention(convention)?;
    let training = py
        .detach(|| {
            let t = Target::unreferenced(instance.inner.clone())?.with_convention(conv);
            strategies::linxfer_train(&t, p, trials, seed)
        })
        .py()?;
    Ok((PyLinearParams { inner: training.params }, training.value))
}

/// Exact expectation over the gamma or beta plane of linear parameters.
#[pyfunction]
#[pyo3(signature = (
    instance, p, plane = "gamma", slope_range = landscape::DEFAULT_RANGE, intcp_range = landscape::DEFAULT_RANGE,
    resolution = landscape::DEFAULT_RESOLUTION, fixed = None, normalization = None, e_ref = None, convention = "gate"
))]
#[allow(clippy::too_many_arguments)]
fn scan_plane(
    py: Python<'_>,
    instance: &PyIsingInstance,
    p: usize,
    plane: &str,
    slope_range: (f64, f64),
    intcp_range: (f64, f64),
    resolution: usize,
    fixed: Option<(f64, f64)>,
    normalization: Option<&Bound<'_, PyAny>>,
    e_ref: Option<f64>,
    convention: &str,
) -> PyResult<PyLandscape> {
    let plane = match plane {
        "gamma" => Plane::GammaPlane,
        "beta" => Plane::BetaPlane,
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown plane {plane:?}; use 'gamma' or 'beta'"
            )))
        }
    };
    let mode = self::normalization(normalization)?;
    let conv = self::convention(convention)?;
    let config = ScanConfig {
        plane,
        fixed_other: fixed.unwrap_or_else(|| plane.default_fixed()),
        slope_range,
        intcp_range,
        resolution,
    };
    let inner = py
        .detach(|| {
            let t = Target::unreferenced(instance.inner.clone())?.with_convention(conv);
            match (mode, e_ref) {
                (None, _) => landscape::scan_plane(&t, p, &config),
                (Some(mode), Some(e)) => landscape::scan_normalized(&t, p, &config, mode, e),
                (Some(_), None) => Err(linxfer::Error::MissingReference),
            }
        })
        .py()?;
    Ok(PyLandscape { inner })
}

/// Extends one angle vector (gammas or betas) from depth p − 1 to p.
#[pyfunction]
fn interp_step(params: Vec<f64>) -> PyResult<Vec<f64>> {
    interp_extend(&params).py()
}

#[pyfunction]
fn fourier_schedule(u: Vec<f64>, v: Vec<f64>, p: usize) -> PyResult<PySchedule> {
    let coeffs = FourierCoeffs::new(u, v).py()?;
    Ok(PySchedule {
        inner: fourier_to_schedule(&coeffs, p).py()?,
    })
}

#[pymodule]
fn pylinxfer(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIsingInstance>()?;
    m.add_class::<PyLinearParams>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyGroundTruth>()?;
    m.add_class::<PyStrategyReport>()?;
    m.add_class::<PyLandscape>()?;
    m.add_function(wrap_pyfunction!(ground_truth, m)?)?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_strategy, m)?)?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(scan_plane, m)?)?;
    m.add_function(wrap_pyfunction!(interp_step, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_schedule, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
