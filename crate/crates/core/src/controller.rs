//! Sampled-in-space feedback `u(x, t) = -K phi_j(x) z(s_j, t)` for
//! `x` in the `j`-th actuation interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::ActuationPartition;
use crate::shapes::{EdgePolicy, ShapeSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerSpec {
    gain: f64,
    shape: ShapeSpec,
    partition: ActuationPartition,
}

/// Sensor readings `z(s_j, t)`, one per interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorFrame {
    pub t: f64,
    pub readings: Vec<f64>,
}

impl SensorFrame {
    pub fn new(t: f64, readings: Vec<f64>) -> Self {
        SensorFrame { t, readings }
    }
}

impl ControllerSpec {
    pub fn new(gain: f64, shape: ShapeSpec, partition: ActuationPartition) -> Result<Self> {
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(Error::config(format!("controller gain K must satisfy K > 0, got {gain}")));
        }
        shape.validate(&partition)?;
        Ok(ControllerSpec {
            gain,
            shape,
            partition,
        })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn shape(&self) -> &ShapeSpec {
        &self.shape
    }

    pub fn partition(&self) -> &ActuationPartition {
        &self.partition
    }

    /// Same shape and partition with another gain.
    pub fn with_gain(&self, gain: f64) -> Result<Self> {
        ControllerSpec::new(gain, self.shape.clone(), self.partition.clone())
    }

    fn check_frame(&self, frame: &SensorFrame) -> Result<()> {
        if frame.readings.len() != self.partition.len() {
            return Err(Error::arg(format!(
                "sensor frame has {} readings, partition has {} intervals",
                frame.readings.len(),
                self.partition.len()
            )));
        }
        Ok(())
    }

    /// `u` at `x` for interval `j`, also reporting whether the support was clamped.
    #[inline]
    fn eval_in(&self, j: usize, x: f64, zbar: f64) -> Result<(f64, bool)> {
        let cell = self.partition.cell(j);
        let mut clamped = false;
        if let ShapeSpec::RaisedCosine { alpha, policy } = &self.shape {
            if self.shape.support(&cell, zbar).clamped {
                if *policy == EdgePolicy::Reject {
                    let half = std::f64::consts::PI * (1.0 + zbar * zbar) / alpha;
                    return Err(Error::SupportExceedsInterval {
                        interval: j,
                        lo: cell.sensor - half,
                        hi: cell.sensor + half,
                        cell_lo: cell.lo,
                        cell_hi: cell.hi,
                    });
                }
                clamped = true;
            }
        }
        if zbar == 0.0 {
            return Ok((0.0, clamped));
        }
        Ok((-self.gain * self.shape.value(&cell, x, zbar) * zbar, clamped))
    }

    pub fn control_field(&self, frame: &SensorFrame, x: f64) -> Result<f64> {
        self.check_frame(frame)?;
        let j = self.partition.locate(x)?;
        Ok(self.eval_in(j, x, frame.readings[j])?.0)
    }

    pub fn control_profile(&self, frame: &SensorFrame, mesh_points: &[f64]) -> Result<Vec<f64>> {
        self.check_frame(frame)?;
        let intervals = mesh_points
            .iter()
            .map(|&x| self.partition.locate(x))
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![0.0; mesh_points.len()];
        let clamped = self.profile_into(frame, mesh_points, &intervals, &mut out)?;
        if clamped > 0 {
            log::warn!(
                "raised-cosine support clamped at {clamped} points at t = {}",
                frame.t
            );
        }
        Ok(out)
    }

    /// Fills `out` with `u` at `xs`, whose intervals are already located.
    /// Returns how many points had a clamped shape support.
    pub(crate) fn profile_into(
        &self,
        frame: &SensorFrame,
        xs: &[f64],
        intervals: &[usize],
        out: &mut [f64],
    ) -> Result<usize> {
        let mut clamped = 0;
        for ((&x, &j), u) in xs.iter().zip(intervals).zip(out.iter_mut()) {
            let (v, c) = self.eval_in(j, x, frame.readings[j])?;
            *u = v;
            clamped += c as usize;
        }
        Ok(clamped)
    }
}

pub fn control_field(c: &ControllerSpec, frame: &SensorFrame, x: f64) -> Result<f64> {
    c.control_field(frame, x)
}

pub fn control_profile(c: &ControllerSpec, frame: &SensorFrame, mesh_points: &[f64]) -> Result<Vec<f64>> {
    c.control_profile(frame, mesh_points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::uniform_partition;
    use proptest::prelude::*;

    fn ctl(shape: ShapeSpec, n: usize) -> ControllerSpec {
        ControllerSpec::new(100.0, shape, uniform_partition(1.0, n).unwrap()).unwrap()
    }

    #[test]
    fn zero_readings_give_zero_control() {
        let c = ctl(ShapeSpec::bump(1000.0, 1.0 / 80.0), 10);
        let frame = SensorFrame::new(0.0, vec![0.0; 10]);
        let xs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        assert!(c.control_profile(&frame, &xs).unwrap().iter().all(|&u| u == 0.0));
    }

    #[test]
    fn constant_shape_is_piecewise_constant() {
        let c = ctl(ShapeSpec::Constant, 10);
        let mut r = vec![0.0; 10];
        r[3] = 0.4;
        let frame = SensorFrame::new(0.0, r);
        for x in [0.31, 0.33, 0.3999] {
            assert!((c.control_field(&frame, x).unwrap() + 40.0).abs() < 1e-12);
        }
        assert_eq!(c.control_field(&frame, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn sensor_consistency_for_every_family() {
        for shape in [
            ShapeSpec::Constant,
            ShapeSpec::raised_cosine(100.0),
            ShapeSpec::bump(1000.0, 1.0 / 80.0),
        ] {
            let c = ctl(shape, 10);
            let readings: Vec<f64> = (0..10).map(|j| 0.1 * j as f64 - 0.35).collect();
            let frame = SensorFrame::new(0.0, readings.clone());
            for (j, &s) in c.partition().sensors().iter().enumerate() {
                assert_eq!(c.control_field(&frame, s).unwrap(), -100.0 * readings[j]);
            }
        }
    }

    #[test]
    fn profile_edge_cases() {
        let c = ctl(ShapeSpec::Constant, 10);
        let frame = SensorFrame::new(0.0, {
            let mut r = vec![0.0; 10];
            r[0] = 1.0;
            r
        });
        assert!(c.control_profile(&frame, &[]).unwrap().is_empty());
        assert_eq!(c.control_profile(&frame, &[0.05]).unwrap(), vec![-100.0]);
        let short = SensorFrame::new(0.0, vec![1.0; 9]);
        assert!(c.control_field(&short, 0.5).is_err());
        assert!(c.control_profile(&frame, &[1.5]).is_err());
    }

    #[test]
    fn bump_support_fraction_on_fine_mesh() {
        let beta = 0.02;
        // small alpha keeps the bump above underflow across almost all of its support
        let c = ctl(ShapeSpec::bump(1e-4, beta), 10);
        let frame = SensorFrame::new(0.0, vec![0.5; 10]);
        let m = 100_000;
        let xs: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let u = c.control_profile(&frame, &xs).unwrap();
        let frac = u.iter().filter(|&&v| v != 0.0).count() as f64 / xs.len() as f64;
        assert!((frac - 2.0 * beta * 10.0).abs() < 1e-3, "{frac}");
    }

    #[test]
    fn rejects_nonpositive_gain() {
        let p = uniform_partition(1.0, 2).unwrap();
        assert!(ControllerSpec::new(-100.0, ShapeSpec::Constant, p.clone()).is_err());
        assert!(ControllerSpec::new(0.0, ShapeSpec::Constant, p).is_err());
    }

    #[test]
    fn strict_edge_policy_surfaces_clamping() {
        let p = uniform_partition(1.0, 10).unwrap();
        let c = ControllerSpec::new(
            100.0,
            ShapeSpec::RaisedCosine {
                alpha: 70.0,
                policy: EdgePolicy::Reject,
            },
            p,
        )
        .unwrap();
        let ok = SensorFrame::new(0.0, vec![0.1; 10]);
        assert!(c.control_field(&ok, 0.05).is_ok());
        let big = SensorFrame::new(0.0, vec![1.0; 10]);
        assert!(matches!(
            c.control_field(&big, 0.05),
            Err(Error::SupportExceedsInterval { interval: 0, .. })
        ));
    }

    proptest! {
        #[test]
        fn constant_shape_is_linear_in_readings(
            a in proptest::collection::vec(-2.0f64..2.0, 10),
            b in proptest::collection::vec(-2.0f64..2.0, 10),
            x in 0.0f64..=1.0,
            s in -3.0f64..3.0,
        ) {
            let c = ctl(ShapeSpec::Constant, 10);
            let combo: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + s * q).collect();
            let ua = c.control_field(&SensorFrame::new(0.0, a.clone()), x).unwrap();
            let ub = c.control_field(&SensorFrame::new(0.0, b.clone()), x).unwrap();
            let uc = c.control_field(&SensorFrame::new(0.0, combo), x).unwrap();
            prop_assert!((uc - (ua + s * ub)).abs() < 1e-9);
        }

        #[test]
        fn control_vanishes_outside_shape_support(
            r in proptest::collection::vec(-1.5f64..1.5, 10),
            x in 0.0f64..=1.0,
        ) {
            for shape in [ShapeSpec::raised_cosine(200.0), ShapeSpec::bump(5.0, 0.03)] {
                let c = ctl(shape.clone(), 10);
                let j = c.partition().locate(x).unwrap();
                let sup = shape.support(&c.partition().cell(j), r[j]);
                let u = c.control_field(&SensorFrame::new(0.0, r.clone()), x).unwrap();
                if x < sup.lo || x > sup.hi {
                    prop_assert_eq!(u, 0.0);
                }
            }
        }
    }
}
