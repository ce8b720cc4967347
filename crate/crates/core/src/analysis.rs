//! Norms, energy functionals, decay verification and control-cost
//! comparison over simulated trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lmi::{decay_bound, gamma_bound, CertificateParams, LmiCertificate};
use crate::plant::Order;
use crate::quadrature::{cumulative_trapezoid, trapezoid_uniform};
use crate::simulator::{Mesh, StateSnapshot, TrajectoryRecord};

/// `int_0^l z^2 dx` by the composite trapezoid rule.
pub fn l2_norm_sq(snapshot: &StateSnapshot, mesh: &Mesh) -> f64 {
    let sq: Vec<f64> = snapshot.z.iter().map(|v| v * v).collect();
    trapezoid_uniform(&sq, mesh.spacing())
}

/// `int_0^l [a z_x^2 + z^2 + p z z_t + z_t^2] dx`, with the forward
/// difference for `z_x` (one value per cell).
pub fn lyapunov_hyperbolic(snapshot: &StateSnapshot, mesh: &Mesh, a_lower: f64, p: f64) -> Result<f64> {
    if !(p.abs() < 0.5) {
        return Err(Error::arg(format!("cross weight p must lie in (-0.5, 0.5), got {p}")));
    }
    let zt = snapshot
        .zt
        .as_ref()
        .ok_or_else(|| Error::arg("snapshot carries no velocity"))?;
    let d = mesh.spacing();
    let z = &snapshot.z;
    let gradient: f64 = z.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() / d;
    let rest: Vec<f64> = z.iter().zip(zt).map(|(a, b)| a * a + p * a * b + b * b).collect();
    Ok(a_lower * gradient + trapezoid_uniform(&rest, d))
}

/// Which energy functional a decay check uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Functional {
    /// `int z^2`
    L2,
    /// The mixed energy of [`lyapunov_hyperbolic`].
    Mixed { a_lower: f64, p: f64 },
}

impl Functional {
    pub fn eval(&self, s: &StateSnapshot, mesh: &Mesh) -> Result<f64> {
        match *self {
            Functional::L2 => Ok(l2_norm_sq(s, mesh)),
            Functional::Mixed { a_lower, p } => lyapunov_hyperbolic(s, mesh, a_lower, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub delta: f64,
    /// `gamma` from the realised sup-integrals along the record.
    pub gamma: f64,
    /// `gamma` from declared amplitude bounds (`|f| <= f_max`, readings up
    /// to their recorded maximum); reported, not used in the check.
    pub gamma_declared: Option<f64>,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub bounds: Vec<f64>,
    /// `max_t V(t) - bound(t)`.
    pub violation: f64,
}

impl DecayReport {
    pub fn initial_value(&self) -> f64 {
        self.values[0]
    }
}

/// Checks `V(t) <= V(0) exp(-2 delta t) + gamma / (2 delta)` at every
/// recorded time, with `V` the chosen functional.
pub fn check_decay(record: &TrajectoryRecord, functional: Functional, delta: f64, gamma: f64) -> Result<DecayReport> {
    let t0 = record.snapshots[0].t;
    let values = record
        .snapshots
        .iter()
        .map(|s| functional.eval(s, &record.mesh))
        .collect::<Result<Vec<_>>>()?;
    let times = record.times();
    let bounds = times
        .iter()
        .map(|t| decay_bound(values[0], delta, gamma, t - t0))
        .collect::<Result<Vec<_>>>()?;
    let violation = values
        .iter()
        .zip(&bounds)
        .map(|(v, b)| v - b)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayReport {
        delta,
        gamma,
        gamma_declared: None,
        times,
        values,
        bounds,
        violation,
    })
}

/// `max_t int f^2 dx` over the recorded times.
pub fn disturbance_sq_sup(record: &TrajectoryRecord) -> f64 {
    let xs = record.mesh.nodes();
    let f = record.spec.disturbance();
    record
        .snapshots
        .iter()
        .map(|s| {
            let sq: Vec<f64> = xs.iter().zip(&s.z).map(|(&x, &z)| f.eval(z, x, s.t).powi(2)).collect();
            trapezoid_uniform(&sq, record.mesh.spacing())
        })
        .fold(0.0, f64::max)
}

/// `max_t sum_j int (F_j)_x^2 dx` over the recorded sensor readings.
pub fn shape_slope_sq_sup(record: &TrajectoryRecord) -> f64 {
    let Some(c) = &record.controller else {
        return 0.0;
    };
    record
        .readings
        .iter()
        .map(|frame| {
            c.partition()
                .cells()
                .zip(&frame.readings)
                .map(|(cell, &z)| c.shape().fx_sq_integral(&cell, z))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn check_compatible(record: &TrajectoryRecord, cert: &LmiCertificate) -> Result<()> {
    let bounds = record.spec.bounds();
    let mismatch = |what: &str| Err(Error::arg(format!("certificate does not cover the record: {what}")));
    let inside = |inner: crate::plant::Interval, outer: crate::plant::Interval| {
        inner.lo >= outer.lo && inner.hi <= outer.hi
    };
    let spacing = cert.params.spacing();
    if let Some(c) = &record.controller {
        if c.partition().delta() > spacing * (1.0 + 1e-12) {
            return mismatch("partition spacing exceeds the certified spacing");
        }
        if c.gain() != cert.tuning().gain {
            return mismatch("controller gain differs from the certified gain");
        }
    }
    match (&cert.params, record.spec.order()) {
        (CertificateParams::Parabolic(p), Order::Parabolic) => {
            if bounds.a1.lo < p.a1_lower || bounds.phi.hi > p.phi_upper || !inside(bounds.a2, p.a2) {
                return mismatch("plant bounds lie outside the certified box");
            }
        }
        (CertificateParams::Hyperbolic(p), Order::Hyperbolic) => {
            let b = bounds.b.expect("hyperbolic plant carries damping");
            if bounds.a1.lo < p.a1_lower || !inside(bounds.a2, p.a2) || !inside(bounds.phi, p.phi) || !inside(b, p.b)
            {
                return mismatch("plant bounds lie outside the certified box");
            }
        }
        _ => return mismatch("plant order differs from the certificate family"),
    }
    Ok(())
}

/// Decay check of a record against a feasible certificate. `gamma` is
/// rebuilt from the sup-integrals realised along the record.
pub fn verify_decay(record: &TrajectoryRecord, cert: &LmiCertificate) -> Result<DecayReport> {
    if !cert.feasible {
        return Err(Error::arg("decay verification needs a feasible certificate"));
    }
    check_compatible(record, cert)?;
    let t = cert.tuning();
    let gamma = gamma_bound(
        t.beta_disturbance,
        t.beta_shape,
        disturbance_sq_sup(record),
        shape_slope_sq_sup(record),
    )?;
    let functional = match cert.params {
        CertificateParams::Parabolic(_) => Functional::L2,
        CertificateParams::Hyperbolic(p) => Functional::Mixed {
            a_lower: p.a1_lower,
            p: p.p,
        },
    };
    let mut report = check_decay(record, functional, t.decay_rate, gamma)?;
    let f_max = record.spec.bounds().f_abs_max;
    let reading_max = record
        .readings
        .iter()
        .flat_map(|f| f.readings.iter())
        .fold(0.0f64, |m, r| m.max(r.abs()));
    let fx_declared = record
        .controller
        .as_ref()
        .map_or(0.0, |c| c.shape().fx_sq_sup(c.partition(), reading_max, 33));
    report.gamma_declared = Some(gamma_bound(
        t.beta_disturbance,
        t.beta_shape,
        f_max * f_max * record.mesh.length(),
        fx_declared,
    )?);
    Ok(report)
}

/// Spatial actuation integrals at each recorded time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuationEnergy {
    pub times: Vec<f64>,
    /// `int_0^l |u| dx`
    pub abs: Vec<f64>,
    /// `int_0^l u^2 dx`
    pub sq: Vec<f64>,
}

impl ActuationEnergy {
    /// `int int |u| dx dt` over the record.
    pub fn total_abs(&self) -> f64 {
        crate::quadrature::trapezoid(&self.times, &self.abs)
    }
}

pub fn actuation_energy(record: &TrajectoryRecord) -> ActuationEnergy {
    let d = record.mesh.spacing();
    let (abs, sq) = record
        .controls
        .iter()
        .map(|u| {
            let a: Vec<f64> = u.iter().map(|v| v.abs()).collect();
            let s: Vec<f64> = u.iter().map(|v| v * v).collect();
            (trapezoid_uniform(&a, d), trapezoid_uniform(&s, d))
        })
        .unzip();
    ActuationEnergy {
        times: record.times(),
        abs,
        sq,
    }
}

/// Sensor-point cost difference between two runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub label_a: String,
    pub label_b: String,
    pub times: Vec<f64>,
    /// `I(t) = sum_j int_0^t (|u_A(s_j)| - |u_B(s_j)|) ds`
    pub i: Vec<f64>,
    pub int_abs_u_a: Vec<f64>,
    pub int_abs_u_b: Vec<f64>,
    pub int_sq_u_a: Vec<f64>,
    pub int_sq_u_b: Vec<f64>,
}

impl CostReport {
    pub fn final_i(&self) -> f64 {
        *self.i.last().expect("records hold at least one sample")
    }
}

/// `sum_j |u(s_j, t)|` at each recorded time.
fn sensor_point_cost(record: &TrajectoryRecord) -> Result<Vec<f64>> {
    let Some(c) = &record.controller else {
        return Ok(vec![0.0; record.snapshots.len()]);
    };
    record
        .readings
        .iter()
        .map(|frame| {
            c.partition()
                .sensors()
                .iter()
                .map(|&s| c.control_field(frame, s).map(f64::abs))
                .sum::<Result<f64>>()
        })
        .collect()
}

fn label(record: &TrajectoryRecord) -> String {
    record
        .controller
        .as_ref()
        .map_or_else(|| "open-loop".to_string(), |c| c.shape().label().to_string())
}

/// Compares a baseline run `a` with a run `b` of the same plant, partition,
/// gain, mesh and time grid.
pub fn cost_integral_i(a: &TrajectoryRecord, b: &TrajectoryRecord) -> Result<CostReport> {
    let mismatch = |what: &str| Err(Error::arg(format!("records differ in {what}")));
    if a.mesh != b.mesh {
        return mismatch("mesh");
    }
    if a.times() != b.times() {
        return mismatch("time grid");
    }
    if a.sensor_nodes != b.sensor_nodes {
        return mismatch("sensor nodes");
    }
    match (&a.controller, &b.controller) {
        (Some(x), Some(y)) => {
            if x.partition() != y.partition() {
                return mismatch("partition");
            }
            if x.gain() != y.gain() {
                return mismatch("gain");
            }
        }
        (None, None) => {}
        _ => return mismatch("controller presence"),
    }
    if a.spec.order() != b.spec.order() || a.spec.bounds() != b.spec.bounds() {
        return mismatch("plant");
    }
    let times = a.times();
    let ca = sensor_point_cost(a)?;
    let cb = sensor_point_cost(b)?;
    let diff: Vec<f64> = ca.iter().zip(&cb).map(|(x, y)| x - y).collect();
    let ea = actuation_energy(a);
    let eb = actuation_energy(b);
    Ok(CostReport {
        label_a: label(a),
        label_b: label(b),
        i: cumulative_trapezoid(&times, &diff),
        times,
        int_abs_u_a: ea.abs,
        int_abs_u_b: eb.abs,
        int_sq_u_a: ea.sq,
        int_sq_u_b: eb.sq,
    })
}
