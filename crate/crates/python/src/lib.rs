//! Python bindings: plants, partitions, shapes, controllers, the simulator,
//! certificate search and trajectory analysis.
//!
//! ```python
//! import pde_ssc as ps
//! plant = ps.Plant.preset("paper-parabolic")
//! ctrl = ps.Controller(100.0, ps.Shape.bump(1000.0, 1 / 80), ps.Partition.uniform(1.0, 10))
//! traj = ps.simulate(plant, ctrl, t_end=0.5)
//! cert = ps.search_certificate(plant, ctrl)
//! print(ps.verify_decay(traj, cert)["violation"])
//! ```

use std::collections::HashMap;

use pde_ssc_core::analysis;
use pde_ssc_core::lmi::{self, GammaInputs, SearchGrid, SearchProblem, DEFAULT_TOLERANCE};
use pde_ssc_core::plant::FieldKind;
use pde_ssc_core::scenarios::{self, InitialCondition};
use pde_ssc_core::shapes::{BumpForm, BumpWidth, EdgePolicy};
use pde_ssc_core::simulator::DiffusionForm;
use pde_ssc_core::{
    ActuationPartition, BoundaryCondition, CoefficientField, ControllerSpec, Error, Interval, LmiCertificate, Order,
    PlantSpec, SensorFrame, ShapeSpec, SimulationOptions, TrajectoryRecord,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pde_ssc, DivergenceError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Divergence { .. } => DivergenceError::new_err(e.to_string()),
        Error::NoConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for pde_ssc_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn interval(lo: f64, hi: f64) -> PyResult<Interval> {
    Interval::new(lo, hi).py()
}

#[pyclass(frozen, skip_from_py_object, module = "pde_ssc")]
#[derive(Clone)]
struct Plant {
    inner: PlantSpec,
}

#[pymethods]
impl Plant {
    /// One of the built-in scenarios, e.g. "paper-parabolic".
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Plant {
            inner: scenarios::preset(name).py()?,
        })
    }

    #[staticmethod]
    fn preset_names() -> Vec<&'static str> {
        scenarios::PRESET_NAMES.to_vec()
    }

    /// A plant with constant coefficients. Passing `b` makes it a damped wave.
    #[staticmethod]
    #[pyo3(signature = (a1, a2=0.0, phi=0.0, b=None, f=0.0, length=1.0, mixed_gamma=None))]
    fn constant(
        a1: f64,
        a2: f64,
        phi: f64,
        b: Option<f64>,
        f: f64,
        length: f64,
        mixed_gamma: Option<f64>,
    ) -> PyResult<Self> {
        let c = |kind, v: f64| CoefficientField::constant(kind, v, Interval::point(v)).py();
        let bc = mixed_gamma.map_or(BoundaryCondition::Dirichlet, |gamma| BoundaryCondition::Mixed { gamma });
        let (a1, a2, phi, f) = (
            c(FieldKind::Diffusion, a1)?,
            c(FieldKind::Convection, a2)?,
            c(FieldKind::Reaction, phi)?,
            c(FieldKind::Disturbance, f)?,
        );
        let inner = match b {
            None => PlantSpec::parabolic(length, a1, a2, phi, f, bc),
            Some(b) => PlantSpec::hyperbolic(length, a1, a2, phi, c(FieldKind::Damping, b)?, f, bc),
        }
        .py()?;
        Ok(Plant { inner })
    }

    #[getter]
    fn order(&self) -> &'static str {
        match self.inner.order() {
            Order::Parabolic => "parabolic",
            Order::Hyperbolic => "hyperbolic",
        }
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    /// Declared coefficient bounds as `{name: (lo, hi)}`, plus `f_abs_max`.
    fn bounds(&self) -> HashMap<&'static str, (f64, f64)> {
        let b = self.inner.bounds();
        let mut out = HashMap::from([
            ("a1", (b.a1.lo, b.a1.hi)),
            ("a2", (b.a2.lo, b.a2.hi)),
            ("phi", (b.phi.lo, b.phi.hi)),
            ("f_abs_max", (b.f_abs_max, b.f_abs_max)),
        ]);
        if let Some(d) = b.b {
            out.insert("b", (d.lo, d.hi));
        }
        out
    }

    fn __repr__(&self) -> String {
        format!("Plant(order={:?}, length={})", self.order(), self.length())
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pde_ssc")]
#[derive(Clone)]
struct Partition {
    inner: ActuationPartition,
}

#[pymethods]
impl Partition {
    #[new]
    fn new(breakpoints: Vec<f64>, sensors: Vec<f64>) -> PyResult<Self> {
        Ok(Partition {
            inner: ActuationPartition::new(breakpoints, sensors).py()?,
        })
    }

    /// `n` equal intervals with midpoint sensors.
    #[staticmethod]
    fn uniform(length: f64, n: usize) -> PyResult<Self> {
        Ok(Partition {
            inner: pde_ssc_core::uniform_partition(length, n).py()?,
        })
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().to_vec()
    }

    #[getter]
    fn sensors(&self) -> Vec<f64> {
        self.inner.sensors().to_vec()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Partition(n={}, delta={})", self.inner.len(), self.inner.delta())
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pde_ssc")]
#[derive(Clone)]
struct Shape {
    inner: ShapeSpec,
}

#[pymethods]
impl Shape {
    #[staticmethod]
    fn constant() -> Self {
        Shape {
            inner: ShapeSpec::Constant,
        }
    }

    /// `policy` is "clamp" or "reject".
    #[staticmethod]
    #[pyo3(signature = (alpha, policy="clamp"))]
    fn raised_cosine(alpha: f64, policy: &str) -> PyResult<Self> {
        let policy = match policy {
            "clamp" => EdgePolicy::Clamp,
            "reject" => EdgePolicy::Reject,
            other => return Err(PyValueError::new_err(format!("unknown edge policy {other:?}"))),
        };
        Ok(Shape {
            inner: ShapeSpec::RaisedCosine { alpha, policy },
        })
    }

    /// `form` is "normalized" or "literal".
    #[staticmethod]
    #[pyo3(signature = (alpha, beta, form="normalized"))]
    fn bump(alpha: f64, beta: f64, form: &str) -> PyResult<Self> {
        let form = match form {
            "normalized" => BumpForm::Normalized,
            "literal" => BumpForm::Literal,
            other => return Err(PyValueError::new_err(format!("unknown bump form {other:?}"))),
        };
        Ok(Shape {
            inner: ShapeSpec::Bump {
                alpha,
                beta: BumpWidth::Uniform(beta),
                form,
            },
        })
    }

    #[getter]
    fn label(&self) -> &'static str {
        self.inner.label()
    }

    /// Shape value on interval `j` of `partition` at `x` for reading `zbar`.
    fn value(&self, partition: &Partition, j: usize, x: f64, zbar: f64) -> PyResult<f64> {
        if j >= partition.inner.len() {
            return Err(PyValueError::new_err(format!("interval {j} out of range")));
        }
        Ok(self.inner.value(&partition.inner.cell(j), x, zbar))
    }

    fn derivative(&self, partition: &Partition, j: usize, x: f64, zbar: f64) -> PyResult<f64> {
        if j >= partition.inner.len() {
            return Err(PyValueError::new_err(format!("interval {j} out of range")));
        }
        Ok(self.inner.derivative(&partition.inner.cell(j), x, zbar))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pde_ssc")]
#[derive(Clone)]
struct Controller {
    inner: ControllerSpec,
}

#[pymethods]
impl Controller {
    #[new]
    fn new(gain: f64, shape: &Shape, partition: &Partition) -> PyResult<Self> {
        Ok(Controller {
            inner: ControllerSpec::new(gain, shape.inner.clone(), partition.inner.clone()).py()?,
        })
    }

    #[getter]
    fn gain(&self) -> f64 {
        self.inner.gain()
    }

    #[getter]
    fn shape(&self) -> Shape {
        Shape {
            inner: self.inner.shape().clone(),
        }
    }

    #[getter]
    fn partition(&self) -> Partition {
        Partition {
            inner: self.inner.partition().clone(),
        }
    }

    /// `u(x)` for one reading per interval.
    fn control_field(&self, readings: Vec<f64>, x: f64) -> PyResult<f64> {
        self.inner.control_field(&SensorFrame::new(0.0, readings), x).py()
    }

    fn control_profile(&self, readings: Vec<f64>, xs: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.control_profile(&SensorFrame::new(0.0, readings), &xs).py()
    }

    fn __repr__(&self) -> String {
        format!("Controller(gain={}, shape={:?}, n={})", self.inner.gain(), self.inner.shape().label(), self.inner.partition().len())
    }
}

#[pyclass(frozen, module = "pde_ssc")]
struct Trajectory {
    inner: TrajectoryRecord,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times()
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.mesh.nodes()
    }

    /// State at each recorded time, one row per time.
    #[getter]
    fn z(&self) -> Vec<Vec<f64>> {
        self.inner.snapshots.iter().map(|s| s.z.clone()).collect()
    }

    /// Velocity rows for damped-wave runs, `None` otherwise.
    #[getter]
    fn zt(&self) -> Option<Vec<Vec<f64>>> {
        self.inner.snapshots.iter().map(|s| s.zt.clone()).collect()
    }

    #[getter]
    fn controls(&self) -> Vec<Vec<f64>> {
        self.inner.controls.clone()
    }

    #[getter]
    fn readings(&self) -> Vec<Vec<f64>> {
        self.inner.readings.iter().map(|f| f.readings.clone()).collect()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps
    }

    /// `int z^2 dx` at each recorded time.
    fn l2_norm_sq(&self) -> Vec<f64> {
        self.inner
            .snapshots
            .iter()
            .map(|s| analysis::l2_norm_sq(s, &self.inner.mesh))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.snapshots.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Trajectory(records={}, steps={}, dt={})",
            self.inner.snapshots.len(),
            self.inner.steps,
            self.inner.dt
        )
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pde_ssc")]
#[derive(Clone)]
struct Certificate {
    inner: LmiCertificate,
}

#[pymethods]
impl Certificate {
    #[getter]
    fn feasible(&self) -> bool {
        self.inner.feasible
    }

    #[getter]
    fn gain(&self) -> f64 {
        self.inner.tuning().gain
    }

    #[getter]
    fn young_weight(&self) -> f64 {
        self.inner.tuning().young_weight
    }

    #[getter]
    fn decay_rate(&self) -> f64 {
        self.inner.decay_rate()
    }

    #[getter]
    fn beta_disturbance(&self) -> f64 {
        self.inner.tuning().beta_disturbance
    }

    #[getter]
    fn beta_shape(&self) -> f64 {
        self.inner.tuning().beta_shape
    }

    /// Cross weight of the damped-wave functional, `None` for parabolic certificates.
    #[getter]
    fn p(&self) -> Option<f64> {
        self.inner.params.cross_weight()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.params.spacing()
    }

    #[getter]
    fn vertex_eigenvalues(&self) -> Vec<f64> {
        self.inner.vertices.iter().map(|v| v.max_eigenvalue).collect()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn bound(&self) -> f64 {
        self.inner.bound
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(feasible={}, K={}, delta={}, worst_eigenvalue={})",
            self.inner.feasible,
            self.gain(),
            self.decay_rate(),
            self.inner.worst_eigenvalue()
        )
    }
}

/// Runs the plant, closed loop if `controller` is given.
#[pyfunction]
#[pyo3(signature = (plant, controller=None, *, cells=160, t_end=1.0, dt=None, record_every=100, initial="sine", conservative=false))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    plant: &Plant,
    controller: Option<&Controller>,
    cells: usize,
    t_end: f64,
    dt: Option<f64>,
    record_every: usize,
    initial: &str,
    conservative: bool,
) -> PyResult<Trajectory> {
    let initial = match initial {
        "sine" => InitialCondition::Sine,
        "zero" => InitialCondition::Zero,
        other => return Err(PyValueError::new_err(format!("unknown initial condition {other:?}"))),
    };
    let opts = SimulationOptions {
        cells,
        dt,
        t_end,
        record_every,
        initial,
        diffusion: if conservative {
            DiffusionForm::Conservative
        } else {
            DiffusionForm::Expanded
        },
    };
    let spec = plant.inner.clone();
    let ctrl = controller.map(|c| c.inner.clone());
    let inner = py.detach(|| pde_ssc_core::simulate(&spec, ctrl.as_ref(), &opts)).py()?;
    Ok(Trajectory { inner })
}

/// Grid search for a certificate covering `plant` under `controller`.
///
/// Grids not given default to a moderate log-spaced grid. `gamma` uses
/// `f_abs_max^2 * length` and the shape slope bound at `reading_bound`.
#[pyfunction]
#[pyo3(signature = (plant, controller, *, gains=None, decay_rates=None, reading_bound=1.0, tolerance=DEFAULT_TOLERANCE))]
fn search_certificate(
    py: Python<'_>,
    plant: &Plant,
    controller: &Controller,
    gains: Option<Vec<f64>>,
    decay_rates: Option<Vec<f64>>,
    reading_bound: f64,
    tolerance: f64,
) -> PyResult<Certificate> {
    let bounds = plant.inner.bounds();
    let c = &controller.inner;
    let spacing = c.partition().delta();
    let problem = match plant.inner.order() {
        Order::Parabolic => SearchProblem::parabolic(&bounds, spacing),
        Order::Hyperbolic => SearchProblem::hyperbolic(&bounds, spacing).py()?,
    };
    let mut grid = SearchGrid::around_gains(gains.unwrap_or_else(|| vec![c.gain()]));
    if let Some(d) = decay_rates {
        grid.decay_rate = d;
    }
    let inputs = GammaInputs {
        f_sq_sup: bounds.f_abs_max.powi(2) * plant.inner.length(),
        fx_sq_sup: c.shape().fx_sq_sup(c.partition(), reading_bound, 33),
    };
    let report = py.detach(|| lmi::search_feasible(&problem, &grid, inputs, tolerance)).py()?;
    Ok(Certificate { inner: report.best })
}

/// Vertex test of the parabolic certificate at one tuning point.
#[pyfunction]
#[pyo3(signature = (gain, young_weight, decay_rate, beta_disturbance, beta_shape, spacing, a1_lower, phi_upper, a2, tolerance=DEFAULT_TOLERANCE))]
#[allow(clippy::too_many_arguments)]
fn check_parabolic(
    gain: f64,
    young_weight: f64,
    decay_rate: f64,
    beta_disturbance: f64,
    beta_shape: f64,
    spacing: f64,
    a1_lower: f64,
    phi_upper: f64,
    a2: (f64, f64),
    tolerance: f64,
) -> PyResult<Certificate> {
    let params = lmi::ParabolicLmiParams {
        tuning: lmi::Tuning {
            gain,
            young_weight,
            decay_rate,
            beta_disturbance,
            beta_shape,
        },
        spacing,
        a1_lower,
        phi_upper,
        a2: interval(a2.0, a2.1)?,
    };
    Ok(Certificate {
        inner: lmi::check_parabolic(&params, tolerance).py()?,
    })
}

/// Vertex test of the damped-wave certificate at one tuning point.
#[pyfunction]
#[pyo3(signature = (gain, young_weight, decay_rate, beta_disturbance, beta_shape, p, spacing, a1_lower, a2, phi, b, tolerance=DEFAULT_TOLERANCE))]
#[allow(clippy::too_many_arguments)]
fn check_hyperbolic(
    gain: f64,
    young_weight: f64,
    decay_rate: f64,
    beta_disturbance: f64,
    beta_shape: f64,
    p: f64,
    spacing: f64,
    a1_lower: f64,
    a2: (f64, f64),
    phi: (f64, f64),
    b: (f64, f64),
    tolerance: f64,
) -> PyResult<Certificate> {
    let params = lmi::HyperbolicLmiParams {
        tuning: lmi::Tuning {
            gain,
            young_weight,
            decay_rate,
            beta_disturbance,
            beta_shape,
        },
        p,
        spacing,
        a1_lower,
        a2: interval(a2.0, a2.1)?,
        phi: interval(phi.0, phi.1)?,
        b: interval(b.0, b.1)?,
    };
    Ok(Certificate {
        inner: lmi::check_hyperbolic(&params, tolerance).py()?,
    })
}

/// Decay check against a feasible certificate: `{delta, gamma, violation, times, values, bounds}`.
#[pyfunction]
fn verify_decay(py: Python<'_>, trajectory: &Trajectory, certificate: &Certificate) -> PyResult<Py<PyAny>> {
    let r = analysis::verify_decay(&trajectory.inner, &certificate.inner).py()?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("delta", r.delta)?;
    d.set_item("gamma", r.gamma)?;
    d.set_item("gamma_declared", r.gamma_declared)?;
    d.set_item("violation", r.violation)?;
    d.set_item("times", r.times)?;
    d.set_item("values", r.values)?;
    d.set_item("bounds", r.bounds)?;
    Ok(d.into_any().unbind())
}

/// Sensor-point cost difference `I(t)` of baseline `a` against `b`.
#[pyfunction]
fn cost_integral(py: Python<'_>, a: &Trajectory, b: &Trajectory) -> PyResult<Py<PyAny>> {
    let r = analysis::cost_integral_i(&a.inner, &b.inner).py()?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("label_a", r.label_a)?;
    d.set_item("label_b", r.label_b)?;
    d.set_item("times", r.times)?;
    d.set_item("I", r.i)?;
    d.set_item("int_abs_u_a", r.int_abs_u_a)?;
    d.set_item("int_abs_u_b", r.int_abs_u_b)?;
    Ok(d.into_any().unbind())
}

/// `(times, int |u| dx, int u^2 dx)` per recorded time.
#[pyfunction]
fn actuation_energy(trajectory: &Trajectory) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let e = analysis::actuation_energy(&trajectory.inner);
    (e.times, e.abs, e.sq)
}

#[pyfunction]
fn wirtinger_factor(spacing: f64) -> f64 {
    lmi::wirtinger_factor(spacing)
}

#[pyfunction]
fn decay_bound(v0: f64, delta: f64, gamma: f64, t: f64) -> PyResult<f64> {
    lmi::decay_bound(v0, delta, gamma, t).py()
}

#[pymodule]
fn pde_ssc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Plant>()?;
    m.add_class::<Partition>()?;
    m.add_class::<Shape>()?;
    m.add_class::<Controller>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(search_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(check_parabolic, m)?)?;
    m.add_function(wrap_pyfunction!(check_hyperbolic, m)?)?;
    m.add_function(wrap_pyfunction!(verify_decay, m)?)?;
    m.add_function(wrap_pyfunction!(cost_integral, m)?)?;
    m.add_function(wrap_pyfunction!(actuation_energy, m)?)?;
    m.add_function(wrap_pyfunction!(wirtinger_factor, m)?)?;
    m.add_function(wrap_pyfunction!(decay_bound, m)?)?;
    m.add("DivergenceError", m.py().get_type::<DivergenceError>())?;
    Ok(())
}
