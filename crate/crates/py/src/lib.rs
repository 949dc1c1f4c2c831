//! Python bindings for `qsense_core`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qsense_core::control::{controlled_qsl, eigenframe_track, simulate_controlled, uniform_grid, ParamHamiltonian};
use qsense_core::distinguishability::{self as dist, SampleBudget};
use qsense_core::envelope::EnvelopeSpec;
use qsense_core::montecarlo::{run_experiment, sweep_time, McConfig};
use qsense_core::pauli::{self, PauliHamiltonian, QubitState};
use qsense_core::qsl::{self, BoundResult, Crossing};
use qsense_core::scenarios::{self, ProbeKind, RotatingScenario, TargetParam};

fn err(e: qsense_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn budget(n: u64) -> PyResult<SampleBudget> {
    SampleBudget::new(n).map_err(err)
}

fn probe_kind(kind: &str) -> PyResult<ProbeKind> {
    match kind {
        "single" => Ok(ProbeKind::Single),
        "product" => Ok(ProbeKind::Product),
        "ghz" => Ok(ProbeKind::Ghz),
        other => Err(PyValueError::new_err(format!("unknown probe kind `{other}`"))),
    }
}

fn target_param(target: &str) -> PyResult<TargetParam> {
    match target {
        "omega" => Ok(TargetParam::Omega),
        "k" => Ok(TargetParam::K),
        other => Err(PyValueError::new_err(format!("unknown target `{other}`"))),
    }
}

/// Qubit Hamiltonian `a0·I + ax·σx + ay·σy + az·σz`.
#[pyclass(name = "PauliHamiltonian", frozen)]
struct PyHamiltonian(PauliHamiltonian);

#[pymethods]
impl PyHamiltonian {
    #[new]
    fn new(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self(PauliHamiltonian::new(a0, ax, ay, az))
    }

    #[getter]
    fn coefficients(&self) -> (f64, f64, f64, f64) {
        let h = self.0;
        (h.a0, h.ax, h.ay, h.az)
    }

    fn ground_energy(&self) -> f64 {
        self.0.ground_energy()
    }

    /// `(⟨H⟩, ΔH, E_g)` in `state`.
    fn stats(&self, state: &PyState) -> (f64, f64, f64) {
        let s = pauli::stats(&self.0, &state.0);
        (s.mean, s.stddev, s.e_ground)
    }

    /// State after evolving under `H·r(t)` with `∫r = phase_integral`.
    fn evolve(&self, state: &PyState, phase_integral: f64) -> PyState {
        PyState(pauli::evolve_fixed_axis(&self.0, phase_integral, &state.0))
    }

    fn __repr__(&self) -> String {
        let h = self.0;
        format!("PauliHamiltonian({}, {}, {}, {})", h.a0, h.ax, h.ay, h.az)
    }
}

#[pyclass(name = "QubitState", frozen)]
struct PyState(QubitState);

#[pymethods]
impl PyState {
    /// Normalizes `(amp0, amp1)`.
    #[new]
    fn new(amp0: Complex64, amp1: Complex64) -> PyResult<Self> {
        QubitState::normalized(amp0, amp1).map(Self).map_err(err)
    }

    /// `√c0_sq·|0⟩ + √(1 − c0_sq)·|1⟩`.
    #[staticmethod]
    fn from_weight(c0_sq: f64) -> PyResult<Self> {
        QubitState::from_weight(c0_sq).map(Self).map_err(err)
    }

    #[staticmethod]
    fn plus() -> Self {
        Self(QubitState::plus())
    }

    #[getter]
    fn amplitudes(&self) -> (Complex64, Complex64) {
        (self.0.amp0(), self.0.amp1())
    }

    fn fidelity(&self, other: &PyState) -> f64 {
        pauli::fidelity(&self.0, &other.0)
    }

    fn bloch(&self) -> [f64; 3] {
        self.0.bloch()
    }
}

/// Time-dependent amplitude `r(t)` on `[0, horizon]`.
#[pyclass(name = "Envelope", frozen)]
struct PyEnvelope(EnvelopeSpec);

#[pymethods]
impl PyEnvelope {
    #[staticmethod]
    fn constant(value: f64, horizon: f64) -> PyResult<Self> {
        EnvelopeSpec::constant(value, horizon).map(Self).map_err(err)
    }

    #[staticmethod]
    fn sinusoid(k: f64, horizon: f64) -> PyResult<Self> {
        EnvelopeSpec::sinusoid(k, horizon).map(Self).map_err(err)
    }

    /// Piecewise-linear through `(times, values)`.
    #[staticmethod]
    fn samples(times: Vec<f64>, values: Vec<f64>, horizon: f64) -> PyResult<Self> {
        EnvelopeSpec::samples(times, values, horizon).map(Self).map_err(err)
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }

    fn __call__(&self, t: f64) -> f64 {
        self.0.eval(t)
    }
}

/// Speed limits of one configuration; `None` marks an unreachable bound.
#[pyclass(name = "Bound", frozen, get_all)]
struct PyBound {
    tau_mt: Option<f64>,
    tau_ml: Option<f64>,
    t_min: Option<f64>,
    alpha: f64,
    beta: f64,
    feasible: bool,
}

#[pymethods]
impl PyBound {
    fn __repr__(&self) -> String {
        format!(
            "Bound(tau_mt={:?}, tau_ml={:?}, t_min={:?}, feasible={})",
            self.tau_mt, self.tau_ml, self.t_min, self.feasible
        )
    }
}

impl From<BoundResult> for PyBound {
    fn from(b: BoundResult) -> Self {
        Self {
            tau_mt: b.tau_mt.time(),
            tau_ml: b.tau_ml.time(),
            t_min: b.t_min,
            alpha: b.distances.alpha,
            beta: b.distances.beta,
            feasible: b.feasible,
        }
    }
}

#[pyfunction]
fn critical_fidelity(n: u64) -> PyResult<f64> {
    Ok(dist::critical_fidelity(budget(n)?))
}

/// Probability that `n` projective measurements flag a change.
#[pyfunction]
fn detection_probability(true_fidelity: f64, n: u64) -> PyResult<f64> {
    dist::detection_probability(true_fidelity, budget(n)?).map_err(err)
}

/// `(β, α)` at fidelity `f0`.
#[pyfunction]
fn distances(f0: f64) -> PyResult<(f64, f64)> {
    let d = qsl::distances(f0).map_err(err)?;
    Ok((d.beta, d.alpha))
}

#[pyfunction]
fn bound_static(h: &PyHamiltonian, state: &PyState, f0: f64) -> PyResult<PyBound> {
    qsl::bound_static(&pauli::stats(&h.0, &state.0), f0).map(Into::into).map_err(err)
}

#[pyfunction]
fn bound_envelope(omega: f64, c0_sq: f64, envelope: &PyEnvelope, f0: f64) -> PyResult<PyBound> {
    qsl::bound_envelope(omega, c0_sq, &envelope.0, f0).map(Into::into).map_err(err)
}

/// First time the probe fidelity reaches `f0`, or `None`.
#[pyfunction]
fn actual_crossing_time(omega: f64, c0_sq: f64, envelope: &PyEnvelope, f0: f64) -> PyResult<Option<f64>> {
    qsl::actual_crossing_time(omega, c0_sq, &envelope.0, f0).map(Crossing::time).map_err(err)
}

#[pyclass(name = "AcScenario", frozen)]
struct PyAc(scenarios::AcScenario);

#[pymethods]
impl PyAc {
    #[new]
    #[pyo3(signature = (omega, k, n=1, m=1, kind="single"))]
    fn new(omega: f64, k: f64, n: u64, m: u32, kind: &str) -> PyResult<Self> {
        scenarios::AcScenario::new(omega, k, budget(n)?, m, probe_kind(kind)?)
            .map(Self)
            .map_err(err)
    }

    fn t_min(&self) -> Option<f64> {
        scenarios::ac_tmin(&self.0).time()
    }

    fn t_min_quadrature(&self) -> PyResult<Option<f64>> {
        scenarios::ac_tmin_numeric(&self.0).map(Crossing::time).map_err(err)
    }

    fn k_max(&self) -> f64 {
        scenarios::ac_kmax(&self.0)
    }

    fn fidelity_at(&self, t: f64) -> f64 {
        self.0.fidelity_at(t)
    }

    /// Monte Carlo sweep over `times`: rows of `(t, detection_rate, exact_rate)`.
    #[pyo3(signature = (times, replicates, seed=0))]
    fn sweep(&self, py: Python<'_>, times: Vec<f64>, replicates: u64, seed: u64) -> PyResult<Vec<(f64, f64, f64)>> {
        let s = self.0;
        let sw = py
            .detach(|| sweep_time(|t| s.fidelity_at(t), &times, s.budget, replicates, seed))
            .map_err(err)?;
        Ok(sw.rows.iter().map(|r| (r.t, r.detection_rate, r.exact_rate)).collect())
    }
}

/// Closed-form `(τ_MT, τ_ML)` for a rotating field.
#[pyfunction]
#[pyo3(signature = (omega, epsilon, target="omega", n=1))]
fn rotating_tmin(omega: f64, epsilon: f64, target: &str, n: u64) -> PyResult<(f64, f64)> {
    let s = RotatingScenario::new(omega, epsilon, target_param(target)?, budget(n)?).map_err(err)?;
    let b = scenarios::rotating_tmin(&s);
    Ok((b.tau_mt, b.tau_ml))
}

/// Controlled amplitude detection of a rotating field: `(τ_MT, crossing)`
/// where `crossing` is the simulated time the fidelity reaches `F₀`.
#[pyfunction]
#[pyo3(signature = (k, omega_c, omega_true, horizon, n=1, steps=4000))]
fn controlled_rotating(
    py: Python<'_>,
    k: f64,
    omega_c: f64,
    omega_true: f64,
    horizon: f64,
    n: u64,
    steps: usize,
) -> PyResult<(f64, Option<f64>)> {
    let f0 = dist::critical_fidelity(budget(n)?);
    py.detach(|| {
        let ph = ParamHamiltonian::rotating_field_amplitude(k);
        let tr = eigenframe_track(&ph, omega_c, &uniform_grid(0.0, horizon, steps))?;
        let bound = controlled_qsl(&tr, (omega_true - omega_c).abs(), f0)?;
        let ft = simulate_controlled(&ph, omega_true, omega_c, &tr, horizon, steps)?;
        Ok((bound.tau_mt, ft.crossing(f0)))
    })
    .map_err(err)
}

/// Smallest resolvable AC field amplitude in tesla.
#[pyfunction]
#[pyo3(signature = (frequency_hz, n=1, m=1, kind="single"))]
fn biomagnetic_threshold(frequency_hz: f64, n: u64, m: u32, kind: &str) -> PyResult<f64> {
    scenarios::biomagnetic_threshold(frequency_hz, budget(n)?, m, probe_kind(kind)?).map_err(err)
}

/// Empirical detection rate over `replicates` seeded experiments.
#[pyfunction]
#[pyo3(signature = (true_fidelity, n, replicates, seed=0))]
fn monte_carlo(py: Python<'_>, true_fidelity: f64, n: u64, replicates: u64, seed: u64) -> PyResult<f64> {
    let cfg = McConfig::new(true_fidelity, budget(n)?, replicates, seed).map_err(err)?;
    py.detach(|| run_experiment(&cfg)).map_err(err)
}

#[pymodule]
fn qsense(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyEnvelope>()?;
    m.add_class::<PyBound>()?;
    m.add_class::<PyAc>()?;
    m.add_function(wrap_pyfunction!(critical_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(detection_probability, m)?)?;
    m.add_function(wrap_pyfunction!(distances, m)?)?;
    m.add_function(wrap_pyfunction!(bound_static, m)?)?;
    m.add_function(wrap_pyfunction!(bound_envelope, m)?)?;
    m.add_function(wrap_pyfunction!(actual_crossing_time, m)?)?;
    m.add_function(wrap_pyfunction!(rotating_tmin, m)?)?;
    m.add_function(wrap_pyfunction!(controlled_rotating, m)?)?;
    m.add_function(wrap_pyfunction!(biomagnetic_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    Ok(())
}
