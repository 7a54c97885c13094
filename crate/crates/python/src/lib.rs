//! Python bindings: `import cqdsim`.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cqdsim_core::collapse::Branch;
use cqdsim_core::dynamics::{chamber_entry_state, integrate_atom as integrate_core};
use cqdsim_core::harness::{self, ReferenceDataset};
use cqdsim_core::sampling::sample_post_sg1 as sample_core;
use cqdsim_core::{field, ChamberGeometry, Error, PhysicalConstants, RandomStream};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Integration { .. } | Error::Singularity { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Chamber parameters; defaults describe the 1933 apparatus.
#[pyclass(name = "Geometry", from_py_object)]
#[derive(Clone)]
struct PyGeometry {
    inner: ChamberGeometry,
}

#[pymethods]
impl PyGeometry {
    #[new]
    #[pyo3(signature = (wire_depth=105e-6, length=16.3e-3, speed=800.0, remnant_field=42e-6))]
    fn new(wire_depth: f64, length: f64, speed: f64, remnant_field: f64) -> PyResult<Self> {
        let inner = ChamberGeometry::new(wire_depth, length, speed, remnant_field).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn wire_depth(&self) -> f64 {
        self.inner.wire_depth
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length
    }

    #[getter]
    fn speed(&self) -> f64 {
        self.inner.speed
    }

    #[getter]
    fn remnant_field(&self) -> f64 {
        self.inner.remnant_field
    }

    fn half_transit_time(&self) -> f64 {
        self.inner.half_transit_time()
    }

    fn __repr__(&self) -> String {
        let g = &self.inner;
        format!(
            "Geometry(wire_depth={}, length={}, speed={}, remnant_field={})",
            g.wire_depth, g.length, g.speed, g.remnant_field
        )
    }
}

fn geometry_or_default(g: Option<&PyGeometry>) -> ChamberGeometry {
    g.map_or_else(ChamberGeometry::frisch_segre, |g| g.inner)
}

/// θ_e(t) through the chamber for one atom.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    #[pyo3(get)]
    times: Vec<f64>,
    #[pyo3(get)]
    theta_e: Vec<f64>,
    #[pyo3(get)]
    phi_e: Vec<f64>,
    #[pyo3(get)]
    phi_n: Vec<f64>,
    #[pyo3(get)]
    theta_n0: f64,
    #[pyo3(get)]
    theta_e_final: f64,
    #[pyo3(get)]
    norm_drift: f64,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.times.len()
    }

    /// 1 when the atom ends in the flipped branch, else 0.
    fn branch(&self) -> PyResult<u8> {
        branch(self.theta_e_final, self.theta_n0)
    }
}

/// Sweep configuration, mirroring the TOML file accepted by the CLI.
#[pyclass(name = "SweepConfig", from_py_object)]
#[derive(Clone)]
struct PySweepConfig {
    inner: harness::SweepConfig,
}

#[pymethods]
impl PySweepConfig {
    #[new]
    #[pyo3(signature = (currents=None, atoms_per_current=None, seed=None, geometry=None, rel_tol=None, abs_tol=None))]
    fn new(
        currents: Option<Vec<f64>>,
        atoms_per_current: Option<usize>,
        seed: Option<u64>,
        geometry: Option<PyGeometry>,
        rel_tol: Option<f64>,
        abs_tol: Option<f64>,
    ) -> PyResult<Self> {
        let mut inner = harness::SweepConfig::default();
        if let Some(c) = currents {
            inner.currents = c;
        }
        if let Some(n) = atoms_per_current {
            inner.atoms_per_current = n;
        }
        if let Some(s) = seed {
            inner.seed = s;
        }
        if let Some(g) = geometry {
            inner.geometry = g.inner;
        }
        if let Some(t) = rel_tol {
            inner.ode.rel_tol = t;
        }
        if let Some(t) = abs_tol {
            inner.ode.abs_tol = t;
        }
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        harness::SweepConfig::from_toml_str(text)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml_string()
    }

    #[getter]
    fn currents(&self) -> Vec<f64> {
        self.inner.currents.clone()
    }

    #[getter]
    fn atoms_per_current(&self) -> usize {
        self.inner.atoms_per_current
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
}

/// Per-current flip fractions of a finished sweep.
#[pyclass(name = "SweepResult", frozen)]
struct PySweepResult {
    inner: harness::SweepResult,
}

#[pymethods]
impl PySweepResult {
    /// Rows of (current, W_num, W_num_stderr, W_ana, atoms). Failed rows
    /// carry NaN fractions.
    fn rows(&self) -> Vec<(f64, f64, f64, f64, usize)> {
        self.inner
            .rows
            .iter()
            .map(|r| match (&r.flip, r.failed()) {
                (Some(f), false) => (r.current, f.value, f.std_error, r.w_analytic, f.atoms),
                _ => (r.current, f64::NAN, f64::NAN, r.w_analytic, 0),
            })
            .collect()
    }

    fn any_failed(&self) -> bool {
        self.inner.any_failed()
    }

    #[getter]
    fn wall_time(&self) -> f64 {
        self.inner.wall_time.as_secs_f64()
    }

    /// The results file exactly as `cqdsim simulate` writes it.
    fn to_csv(&self) -> String {
        harness::render_results(&self.inner)
    }
}

#[pyfunction]
fn branch(theta_e_final: f64, theta_n0: f64) -> PyResult<u8> {
    let b = cqdsim_core::collapse::branch(theta_e_final, theta_n0).map_err(to_py)?;
    Ok(u8::from(b == Branch::Flipped))
}

/// (y_NP in m, t_NP in s).
#[pyfunction]
#[pyo3(signature = (current, geometry=None))]
fn null_point(current: f64, geometry: Option<PyRef<'_, PyGeometry>>) -> PyResult<(f64, f64)> {
    let np = field::null_point(current, &geometry_or_default(geometry.as_deref())).map_err(to_py)?;
    Ok((np.position, np.time))
}

/// Full wire + remnant field on the beam line at time t.
#[pyfunction]
#[pyo3(signature = (t, current, geometry=None))]
fn field_on_path(
    t: f64,
    current: f64,
    geometry: Option<PyRef<'_, PyGeometry>>,
) -> PyResult<(f64, f64, f64)> {
    let b = field::field_on_path(t, current, &geometry_or_default(geometry.as_deref())).map_err(to_py)?;
    Ok((b.x, b.y, b.z))
}

/// Linearized field around the null point on the beam line at time t.
#[pyfunction]
#[pyo3(signature = (t, current, geometry=None))]
fn quadrupole_on_path(
    t: f64,
    current: f64,
    geometry: Option<PyRef<'_, PyGeometry>>,
) -> PyResult<(f64, f64, f64)> {
    let b = field::quadrupole_on_path(t, current, &geometry_or_default(geometry.as_deref()))
        .map_err(to_py)?;
    Ok((b.x, b.y, b.z))
}

#[pyfunction]
#[pyo3(signature = (t, current, geometry=None))]
fn adiabaticity(t: f64, current: f64, geometry: Option<PyRef<'_, PyGeometry>>) -> f64 {
    field::adiabaticity(
        t,
        current,
        &geometry_or_default(geometry.as_deref()),
        &PhysicalConstants::potassium39(),
    )
}

/// (B_e, B_n) in T.
#[pyfunction]
fn hyperfine_fields() -> (f64, f64) {
    let h = PhysicalConstants::potassium39().hyperfine_fields();
    (h.electron, h.nuclear)
}

#[pyfunction]
fn mean_theta_n() -> f64 {
    cqdsim_core::mean_theta_n()
}

/// (c_r0 in A, c_rs, c_rr in A⁻³).
#[pyfunction]
#[pyo3(signature = (geometry=None))]
fn coefficients(geometry: Option<PyRef<'_, PyGeometry>>) -> PyResult<(f64, f64, f64)> {
    let c = PhysicalConstants::potassium39();
    let k = cqdsim_core::coefficients(
        &geometry_or_default(geometry.as_deref()),
        &c,
        &c.hyperfine_fields(),
    )
    .map_err(to_py)?;
    Ok((k.c_r0, k.c_rs, k.c_rr))
}

#[pyfunction]
#[pyo3(signature = (current, geometry=None))]
fn w_analytic(current: f64, geometry: Option<PyRef<'_, PyGeometry>>) -> PyResult<f64> {
    let (c_r0, c_rs, c_rr) = coefficients(geometry)?;
    let k = cqdsim_core::ClosedFormCoefficients { c_r0, c_rs, c_rr };
    cqdsim_core::w_analytic(current, &k).map_err(to_py)
}

/// Post-SG1 nuclear orientation (θ_n, φ_n) of atom `atom` at `current`.
#[pyfunction]
fn sample_post_sg1(seed: u64, current: f64, atom: u64) -> (f64, f64) {
    sample_core(&mut RandomStream::for_current(seed, current, atom))
}

/// Integrate one atom entering with θ_e = π.
#[pyfunction]
#[pyo3(signature = (current, phi_e0, theta_n0, phi_n0, geometry=None, rel_tol=1e-8, abs_tol=1e-8))]
#[allow(clippy::too_many_arguments)]
fn integrate_atom(
    py: Python<'_>,
    current: f64,
    phi_e0: f64,
    theta_n0: f64,
    phi_n0: f64,
    geometry: Option<PyRef<'_, PyGeometry>>,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<PyTrajectory> {
    let geom = geometry_or_default(geometry.as_deref());
    let settings = cqdsim_core::OdeSettings {
        rel_tol,
        abs_tol,
        ..Default::default()
    };
    settings.validate().map_err(to_py)?;
    let init = chamber_entry_state(phi_e0, theta_n0, phi_n0);
    let traj = py
        .detach(|| integrate_core(&init, current, &geom, &PhysicalConstants::potassium39(), &settings))
        .map_err(to_py)?;
    Ok(PyTrajectory {
        times: traj.times,
        theta_e: traj.theta_e,
        phi_e: traj.phi_e,
        phi_n: traj.phi_n,
        theta_n0: traj.theta_n0,
        theta_e_final: traj.theta_e_final,
        norm_drift: traj.norm_drift,
    })
}

#[pyfunction]
#[pyo3(signature = (config, workers=1))]
fn run_sweep(py: Python<'_>, config: PyRef<'_, PySweepConfig>, workers: usize) -> PyResult<PySweepResult> {
    let cfg = config.inner.clone();
    let inner = py.detach(|| harness::run_sweep(&cfg, workers)).map_err(to_py)?;
    Ok(PySweepResult { inner })
}

/// R² of `model` [(current, W)] against `data` [(current, W)].
#[pyfunction]
fn r_squared(model: Vec<(f64, f64)>, data: Vec<(f64, f64)>) -> PyResult<f64> {
    harness::r_squared(&model, &ReferenceDataset { rows: data }).map_err(to_py)
}

#[pymodule]
fn cqdsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PySweepConfig>()?;
    m.add_class::<PySweepResult>()?;
    m.add_function(wrap_pyfunction!(branch, m)?)?;
    m.add_function(wrap_pyfunction!(null_point, m)?)?;
    m.add_function(wrap_pyfunction!(field_on_path, m)?)?;
    m.add_function(wrap_pyfunction!(quadrupole_on_path, m)?)?;
    m.add_function(wrap_pyfunction!(adiabaticity, m)?)?;
    m.add_function(wrap_pyfunction!(hyperfine_fields, m)?)?;
    m.add_function(wrap_pyfunction!(mean_theta_n, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(w_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(sample_post_sg1, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_atom, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(r_squared, m)?)?;
    Ok(())
}
