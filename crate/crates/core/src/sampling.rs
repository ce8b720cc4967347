//! Spatial partition of `[0, l]` into actuation intervals with one sensor
//! strictly inside each interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One actuation interval `[lo, hi)` and its sensor point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub sensor: f64,
}

impl Cell {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Distance from the sensor to the nearer interval edge.
    pub fn edge_clearance(&self) -> f64 {
        (self.sensor - self.lo).min(self.hi - self.sensor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuationPartition {
    breakpoints: Vec<f64>,
    sensors: Vec<f64>,
    delta: f64,
}

impl ActuationPartition {
    /// Builds a partition from explicit breakpoints `0 = x_0 < ... < x_N = l`
    /// and sensors `x_j < s_j < x_{j+1}`. `delta` becomes the true max spacing.
    pub fn new(breakpoints: Vec<f64>, sensors: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::arg("a partition needs at least two breakpoints"));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::arg(format!("first breakpoint must be 0, got {}", breakpoints[0])));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::arg("breakpoints must be finite"));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::arg(format!(
                "breakpoints must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let n = breakpoints.len() - 1;
        if sensors.len() != n {
            return Err(Error::arg(format!("expected {n} sensors, got {}", sensors.len())));
        }
        for (j, &s) in sensors.iter().enumerate() {
            if !(s > breakpoints[j] && s < breakpoints[j + 1]) {
                return Err(Error::arg(format!(
                    "sensor {j} at {s} is not strictly inside ({}, {})",
                    breakpoints[j],
                    breakpoints[j + 1]
                )));
            }
        }
        let delta = breakpoints
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        Ok(ActuationPartition {
            breakpoints,
            sensors,
            delta,
        })
    }

    /// Like [`new`](Self::new) but with a declared spacing bound `delta`,
    /// which must dominate every interval width.
    pub fn with_delta(breakpoints: Vec<f64>, sensors: Vec<f64>, delta: f64) -> Result<Self> {
        let mut p = Self::new(breakpoints, sensors)?;
        if delta < p.delta {
            return Err(Error::arg(format!(
                "declared delta {delta} is smaller than the max spacing {}",
                p.delta
            )));
        }
        p.delta = delta;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn sensors(&self) -> &[f64] {
        &self.sensors
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn cell(&self, j: usize) -> Cell {
        Cell {
            index: j,
            lo: self.breakpoints[j],
            hi: self.breakpoints[j + 1],
            sensor: self.sensors[j],
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.len()).map(|j| self.cell(j))
    }

    /// Index `j` with `x_j <= x < x_{j+1}`; `x = l` belongs to the last interval.
    pub fn locate(&self, x: f64) -> Result<usize> {
        let l = self.length();
        if !(0.0..=l).contains(&x) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: 0.0,
                hi: l,
            });
        }
        let j = self.breakpoints.partition_point(|&b| b <= x);
        Ok((j - 1).min(self.len() - 1))
    }
}

/// `n` equal intervals on `[0, l]` with midpoint sensors.
pub fn uniform_partition(l: f64, n: usize) -> Result<ActuationPartition> {
    if n < 1 {
        return Err(Error::arg("number of intervals must be at least 1"));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::arg(format!("domain length must be positive, got {l}")));
    }
    let w = l / n as f64;
    let mut breakpoints: Vec<f64> = (0..=n).map(|j| j as f64 * w).collect();
    breakpoints[n] = l;
    let sensors = breakpoints.windows(2).map(|b| 0.5 * (b[0] + b[1])).collect();
    let mut p = ActuationPartition::new(breakpoints, sensors)?;
    p.delta = w;
    Ok(p)
}

pub fn locate_interval(p: &ActuationPartition, x: f64) -> Result<usize> {
    p.locate(x)
}
