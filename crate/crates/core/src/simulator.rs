//! Method-of-lines simulation of the closed loop.
//!
//! Interior nodes use `z_x = (z[k+1] - z[k]) / D` and the three-point
//! second difference; the diffusion term is expanded as
//! `a1 z_xx + a1' z_x` unless the conservative flux form is selected.
//! Time stepping is classical RK4; boundary values are imposed
//! algebraically on every stage.

use serde::{Deserialize, Serialize};

use crate::controller::{ControllerSpec, SensorFrame};
use crate::error::{Error, Result};
use crate::plant::{BoundaryCondition, Order, PlantSpec};
use crate::sampling::ActuationPartition;
use crate::scenarios::InitialCondition;

/// Magnitude beyond which a run counts as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    cells: usize,
    length: f64,
}

impl Mesh {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        if cells < 4 {
            return Err(Error::config(format!("mesh needs at least 4 cells, got {cells}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::config(format!("mesh length must be positive, got {length}")));
        }
        Ok(Mesh { cells, length })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.cells {
            self.length
        } else {
            k as f64 * self.length / self.cells as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells).map(|k| self.node(k)).collect()
    }

    /// Index of the node nearest `x`; ties go to the lower index.
    pub fn nearest_node(&self, x: f64) -> usize {
        let r = (x / self.length * self.cells as f64).clamp(0.0, self.cells as f64);
        let lo = r.floor();
        let k = if r - lo <= 0.5 { lo } else { lo + 1.0 };
        (k as usize).min(self.cells)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub t: f64,
    pub z: Vec<f64>,
    /// Nodal velocity, hyperbolic runs only.
    pub zt: Option<Vec<f64>>,
}

impl StateSnapshot {
    pub fn from_initial(spec: &PlantSpec, mesh: &Mesh, ic: InitialCondition) -> Self {
        let mut z: Vec<f64> = mesh.nodes().iter().map(|&x| ic.value(x, mesh.length())).collect();
        apply_boundary(spec.boundary(), mesh.spacing(), &mut z);
        let zt = (spec.order() == Order::Hyperbolic).then(|| vec![0.0; z.len()]);
        StateSnapshot { t: 0.0, z, zt }
    }
}

/// How `(a1 z_x)_x` is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionForm {
    /// `a1(x_k) z_xx + a1'(x_k) z_x` with the forward-difference `z_x`.
    #[default]
    Expanded,
    /// `(a1(x_{k+1/2}) (z[k+1] - z[k]) - a1(x_{k-1/2}) (z[k] - z[k-1])) / D^2`.
    Conservative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub cells: usize,
    /// Time step; `None` picks the largest step under the stability guard
    /// that divides `t_end` evenly.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub record_every: usize,
    pub initial: InitialCondition,
    pub diffusion: DiffusionForm,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            cells: 160,
            dt: None,
            t_end: 1.0,
            record_every: 100,
            initial: InitialCondition::Sine,
            diffusion: DiffusionForm::Expanded,
        }
    }
}

/// Largest step the explicit scheme is run with by default:
/// `0.2 D^2 / a1_max` (parabolic) or `0.5 D / sqrt(a1_max)` (hyperbolic).
pub fn stable_dt(spec: &PlantSpec, mesh: &Mesh) -> f64 {
    let d = mesh.spacing();
    let a1_max = spec.a1().bounds().hi;
    match spec.order() {
        Order::Parabolic => 0.2 * d * d / a1_max,
        Order::Hyperbolic => 0.5 * d / a1_max.sqrt(),
    }
}

fn apply_boundary(bc: BoundaryCondition, d: f64, z: &mut [f64]) {
    let m = z.len() - 1;
    z[m] = 0.0;
    z[0] = match bc {
        BoundaryCondition::Dirichlet => 0.0,
        BoundaryCondition::Mixed { gamma } => z[1] / (1.0 + gamma * d),
    };
}

/// Mesh nodes the sensors read from. Fails if a sensor is farther than
/// `D / 2` from every node or the partition does not span the mesh.
pub fn sensor_nodes(partition: &ActuationPartition, mesh: &Mesh) -> Result<Vec<usize>> {
    if (partition.length() - mesh.length()).abs() > 1e-12 * mesh.length() {
        return Err(Error::config(format!(
            "partition length {} differs from domain length {}",
            partition.length(),
            mesh.length()
        )));
    }
    let half = 0.5 * mesh.spacing() * (1.0 + 1e-9);
    partition
        .sensors()
        .iter()
        .map(|&s| {
            let k = mesh.nearest_node(s);
            if (mesh.node(k) - s).abs() > half {
                return Err(Error::config(format!("sensor at {s} is not within D/2 of a mesh node")));
            }
            Ok(k)
        })
        .collect()
}

/// `z` at the node nearest each sensor.
pub fn sensor_readings(snapshot: &StateSnapshot, partition: &ActuationPartition, mesh: &Mesh) -> Result<SensorFrame> {
    let nodes = sensor_nodes(partition, mesh)?;
    Ok(read_sensors(snapshot.t, &snapshot.z, &nodes))
}

fn read_sensors(t: f64, z: &[f64], nodes: &[usize]) -> SensorFrame {
    SensorFrame::new(t, nodes.iter().map(|&k| z[k]).collect())
}

/// The closed loop reduced to ODEs on the mesh nodes.
pub struct Semidiscrete<'a> {
    spec: &'a PlantSpec,
    controller: Option<&'a ControllerSpec>,
    mesh: Mesh,
    form: DiffusionForm,
    xs: Vec<f64>,
    a1: Vec<f64>,
    a1_x: Vec<f64>,
    /// `a1` at `x_{k - 1/2}`, index `k` (conservative form only).
    a1_half: Vec<f64>,
    a2: Vec<f64>,
    intervals: Vec<usize>,
    sensors: Vec<usize>,
}

/// Builds the right-hand side of the semidiscrete closed loop. Pass
/// `None` for the open loop `u = 0`.
pub fn semidiscretize<'a>(
    spec: &'a PlantSpec,
    mesh: Mesh,
    controller: Option<&'a ControllerSpec>,
    form: DiffusionForm,
) -> Result<Semidiscrete<'a>> {
    if (spec.length() - mesh.length()).abs() > 1e-12 * spec.length() {
        return Err(Error::config(format!(
            "mesh length {} differs from domain length {}",
            mesh.length(),
            spec.length()
        )));
    }
    let xs = mesh.nodes();
    let h = spec.derivative_step();
    let a1: Vec<f64> = xs.iter().map(|&x| spec.a1().eval(0.0, x, 0.0)).collect();
    let a1_x = xs.iter().map(|&x| spec.a1().derivative_x(0.0, x, 0.0, h)).collect();
    let d = mesh.spacing();
    let a1_half = xs.iter().map(|&x| spec.a1().eval(0.0, x - 0.5 * d, 0.0)).collect();
    let a2 = xs.iter().map(|&x| spec.a2().eval(0.0, x, 0.0)).collect();
    let (intervals, sensors) = match controller {
        Some(c) => (
            xs.iter().map(|&x| c.partition().locate(x)).collect::<Result<Vec<_>>>()?,
            sensor_nodes(c.partition(), &mesh)?,
        ),
        None => (Vec::new(), Vec::new()),
    };
    Ok(Semidiscrete {
        spec,
        controller,
        mesh,
        form,
        xs,
        a1,
        a1_x,
        a1_half,
        a2,
        intervals,
        sensors,
    })
}

impl Semidiscrete<'_> {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn sensor_nodes(&self) -> &[usize] {
        &self.sensors
    }

    /// Control profile for the current state; returns the clamp count.
    fn control(&self, t: f64, z: &[f64], u: &mut [f64]) -> Result<usize> {
        match self.controller {
            None => {
                u.fill(0.0);
                Ok(0)
            }
            Some(c) => {
                let frame = read_sensors(t, z, &self.sensors);
                c.profile_into(&frame, &self.xs, &self.intervals, u)
            }
        }
    }

    /// Writes `dz` (and `dv` for hyperbolic plants) at interior nodes;
    /// boundary entries are zero. `u` is scratch of mesh length.
    fn eval_into(
        &self,
        t: f64,
        z: &[f64],
        v: Option<&[f64]>,
        dz: &mut [f64],
        dv: Option<&mut [f64]>,
        u: &mut [f64],
    ) -> Result<usize> {
        let m = self.mesh.cells();
        let d = self.mesh.spacing();
        let (inv_d, inv_d2) = (1.0 / d, 1.0 / (d * d));
        let clamped = self.control(t, z, u)?;
        let spec = self.spec;
        // a disturbance uniform in x and z is evaluated once per call
        let f = spec.disturbance();
        let f_uniform = (!f.varies_with_x() && !f.varies_with_z()).then(|| f.eval(0.0, 0.0, t));
        let accel = |k: usize| -> f64 {
            let zx = (z[k + 1] - z[k]) * inv_d;
            let diffusion = match self.form {
                DiffusionForm::Expanded => self.a1[k] * (z[k + 1] - 2.0 * z[k] + z[k - 1]) * inv_d2 + self.a1_x[k] * zx,
                DiffusionForm::Conservative => {
                    (self.a1_half[k + 1] * (z[k + 1] - z[k]) - self.a1_half[k] * (z[k] - z[k - 1])) * inv_d2
                }
            };
            let x = self.xs[k];
            diffusion
                + self.a2[k] * zx
                + spec.phi().eval(z[k], x, t) * z[k]
                + u[k]
                + f_uniform.unwrap_or_else(|| f.eval(z[k], x, t))
        };
        match (v, dv) {
            (None, _) => {
                dz[0] = 0.0;
                dz[m] = 0.0;
                for k in 1..m {
                    dz[k] = accel(k);
                }
            }
            (Some(v), Some(dv)) => {
                let b = spec.damping().expect("hyperbolic plant carries damping");
                dz.copy_from_slice(v);
                dz[0] = 0.0;
                dz[m] = 0.0;
                dv[0] = 0.0;
                dv[m] = 0.0;
                for k in 1..m {
                    dv[k] = accel(k) - b.eval(z[k], self.xs[k], t) * v[k];
                }
            }
            (Some(_), None) => unreachable!("velocity derivative buffer missing"),
        }
        Ok(clamped)
    }

    /// Time derivative of `state` as given (boundary values are used as is).
    pub fn rhs(&self, state: &StateSnapshot) -> Result<StateSnapshot> {
        let n = self.mesh.len();
        if state.z.len() != n {
            return Err(Error::arg(format!("state has {} nodes, mesh has {n}", state.z.len())));
        }
        let hyperbolic = self.spec.order() == Order::Hyperbolic;
        if hyperbolic != state.zt.is_some() {
            return Err(Error::arg("velocity must be present exactly for hyperbolic plants"));
        }
        let mut dz = vec![0.0; n];
        let mut dv = state.zt.as_ref().map(|_| vec![0.0; n]);
        let mut u = vec![0.0; n];
        self.eval_into(state.t, &state.z, state.zt.as_deref(), &mut dz, dv.as_deref_mut(), &mut u)?;
        Ok(StateSnapshot {
            t: state.t,
            z: dz,
            zt: dv,
        })
    }
}

/// Write-once result of a run.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub mesh: Mesh,
    pub snapshots: Vec<StateSnapshot>,
    /// Sensor readings at each recorded time.
    pub readings: Vec<SensorFrame>,
    /// Control profile on the mesh at each recorded time.
    pub controls: Vec<Vec<f64>>,
    pub spec: PlantSpec,
    pub controller: Option<ControllerSpec>,
    pub sensor_nodes: Vec<usize>,
    pub dt: f64,
    pub steps: usize,
}

impl TrajectoryRecord {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn final_state(&self) -> &StateSnapshot {
        self.snapshots.last().expect("a record holds at least the initial state")
    }

    /// Gain of the controller, 0 for open-loop runs.
    pub fn gain(&self) -> f64 {
        self.controller.as_ref().map_or(0.0, |c| c.gain())
    }
}

/// Runs from the configured initial condition.
pub fn simulate(
    spec: &PlantSpec,
    controller: Option<&ControllerSpec>,
    opts: &SimulationOptions,
) -> Result<TrajectoryRecord> {
    let mesh = Mesh::new(spec.length(), opts.cells)?;
    let initial = StateSnapshot::from_initial(spec, &mesh, opts.initial);
    simulate_from(spec, controller, opts, initial)
}

/// Runs from an explicit initial state on an `opts.cells` mesh.
pub fn simulate_from(
    spec: &PlantSpec,
    controller: Option<&ControllerSpec>,
    opts: &SimulationOptions,
    initial: StateSnapshot,
) -> Result<TrajectoryRecord> {
    if !(opts.t_end > 0.0 && opts.t_end.is_finite()) {
        return Err(Error::config(format!("t_end must be positive, got {}", opts.t_end)));
    }
    if opts.record_every == 0 {
        return Err(Error::config("record_every must be at least 1"));
    }
    let mesh = Mesh::new(spec.length(), opts.cells)?;
    let sys = semidiscretize(spec, mesh, controller, opts.diffusion)?;
    let n = mesh.len();
    let hyperbolic = spec.order() == Order::Hyperbolic;
    if initial.z.len() != n || hyperbolic != initial.zt.is_some() {
        return Err(Error::arg("initial state does not match the mesh or plant order"));
    }

    let guard = stable_dt(spec, &mesh);
    let target = match opts.dt {
        Some(dt) if !(dt > 0.0) => return Err(Error::config(format!("dt must be positive, got {dt}"))),
        Some(dt) => {
            if dt > guard {
                log::warn!("dt = {dt} exceeds the stability guard {guard}");
            }
            dt
        }
        None => guard,
    };
    let steps = ((opts.t_end / target) - 1e-9).ceil().max(1.0) as usize;
    let dt = opts.t_end / steps as f64;
    let bc = spec.boundary();
    let d = mesh.spacing();

    let mut z = initial.z;
    let mut v = initial.zt;
    let t0 = initial.t;
    apply_boundary(bc, d, &mut z);
    if let Some(v) = v.as_mut() {
        apply_boundary(bc, d, v);
    }

    let buf = || vec![0.0; n];
    let vbuf = || if hyperbolic { Some(vec![0.0; n]) } else { None };
    let (mut k1, mut k2, mut k3, mut k4) = (buf(), buf(), buf(), buf());
    let (mut l1, mut l2, mut l3, mut l4) = (vbuf(), vbuf(), vbuf(), vbuf());
    let (mut zs, mut vs) = (buf(), vbuf());
    let mut u = buf();
    let mut clamped_total = 0usize;

    let mut record = TrajectoryRecord {
        mesh,
        snapshots: Vec::new(),
        readings: Vec::new(),
        controls: Vec::new(),
        spec: spec.clone(),
        controller: controller.cloned(),
        sensor_nodes: sys.sensor_nodes().to_vec(),
        dt,
        steps,
    };
    let push = |record: &mut TrajectoryRecord, t: f64, z: &[f64], v: &Option<Vec<f64>>| -> Result<()> {
        let frame = read_sensors(t, z, &record.sensor_nodes);
        let mut profile = vec![0.0; n];
        sys.control(t, z, &mut profile)?;
        record.snapshots.push(StateSnapshot {
            t,
            z: z.to_vec(),
            zt: v.clone(),
        });
        record.readings.push(frame);
        record.controls.push(profile);
        Ok(())
    };
    push(&mut record, t0, &z, &v)?;

    // stage state = base + h * k, with boundary values re-imposed
    let stage = |out: &mut [f64], base: &[f64], k: &[f64], h: f64| {
        for ((o, b), k) in out.iter_mut().zip(base).zip(k) {
            *o = b + h * k;
        }
        apply_boundary(bc, d, out);
    };

    for step in 1..=steps {
        let t = t0 + (step - 1) as f64 * dt;
        clamped_total += sys.eval_into(t, &z, v.as_deref(), &mut k1, l1.as_deref_mut(), &mut u)?;

        stage(&mut zs, &z, &k1, 0.5 * dt);
        if let (Some(vs), Some(v), Some(l)) = (vs.as_mut(), v.as_ref(), l1.as_ref()) {
            stage(vs, v, l, 0.5 * dt);
        }
        clamped_total += sys.eval_into(t + 0.5 * dt, &zs, vs.as_deref(), &mut k2, l2.as_deref_mut(), &mut u)?;

        stage(&mut zs, &z, &k2, 0.5 * dt);
        if let (Some(vs), Some(v), Some(l)) = (vs.as_mut(), v.as_ref(), l2.as_ref()) {
            stage(vs, v, l, 0.5 * dt);
        }
        clamped_total += sys.eval_into(t + 0.5 * dt, &zs, vs.as_deref(), &mut k3, l3.as_deref_mut(), &mut u)?;

        stage(&mut zs, &z, &k3, dt);
        if let (Some(vs), Some(v), Some(l)) = (vs.as_mut(), v.as_ref(), l3.as_ref()) {
            stage(vs, v, l, dt);
        }
        clamped_total += sys.eval_into(t + dt, &zs, vs.as_deref(), &mut k4, l4.as_deref_mut(), &mut u)?;

        let w = dt / 6.0;
        for i in 0..n {
            z[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        apply_boundary(bc, d, &mut z);
        if let (Some(v), Some(a), Some(b), Some(c), Some(e)) = (v.as_mut(), &l1, &l2, &l3, &l4) {
            for i in 0..n {
                v[i] += w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + e[i]);
            }
            apply_boundary(bc, d, v);
        }

        let t_now = t0 + step as f64 * dt;
        let bad = |s: &[f64]| s.iter().any(|x| !(x.abs() <= DIVERGENCE_LIMIT));
        if bad(&z) || v.as_deref().is_some_and(bad) {
            return Err(Error::Divergence {
                step,
                t: t_now,
                limit: DIVERGENCE_LIMIT,
            });
        }
        if step % opts.record_every == 0 || step == steps {
            push(&mut record, t_now, &z, &v)?;
        }
    }
    if clamped_total > 0 {
        log::warn!("raised-cosine support was clamped at {clamped_total} node evaluations");
    }
    Ok(record)
}
