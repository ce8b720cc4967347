//! Shape functions `phi_j(x)` that spread a sensor reading over its
//! actuation interval: `F_j(x) = phi_j(x) * z(s_j)`.
//!
//! Three families are provided:
//!
//! * [`ShapeSpec::Constant`]: `phi = 1` on the whole interval.
//! * [`ShapeSpec::RaisedCosine`]: `0.5 + 0.5 cos(alpha (x - s) / (1 + zbar^2))`
//!   on `|x - s| <= pi (1 + zbar^2) / alpha`, zero elsewhere.
//! * [`ShapeSpec::Bump`]: a smooth compactly supported bump of radius
//!   `beta_j`, sharpened by `alpha / (1 + zbar^2)`.
//!
//! Every family equals 1 at the sensor, stays in `[0, 1]`, and (unless a
//! raised-cosine support has to be clamped) is C1 across its support edges.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::graded_integral;
use crate::sampling::{ActuationPartition, Cell};

/// What to do when a raised-cosine support does not fit inside its interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgePolicy {
    /// Truncate the support at the interval edge and log a warning.
    #[default]
    Clamp,
    /// Treat the overflow as an error, and require at construction that the
    /// support fits for `zbar = 0`.
    Reject,
}

/// Normalisation of the bump exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpForm {
    /// `exp(A/beta^2 - A/(beta^2 - s^2))`, equal to 1 at the sensor.
    #[default]
    Normalized,
    /// `exp(A/beta - A/(beta^2 - s^2))`. Its value at the sensor is
    /// `exp(A (1/beta - 1/beta^2))`, which is 1 only when `beta = 1`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BumpWidth {
    Uniform(f64),
    PerInterval(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShapeSpec {
    Constant,
    RaisedCosine { alpha: f64, policy: EdgePolicy },
    Bump { alpha: f64, beta: BumpWidth, form: BumpForm },
}

/// Closed support `[lo, hi]` of a shape on one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    /// The unclamped support would have left the interval.
    pub clamped: bool,
}

impl ShapeSpec {
    pub fn raised_cosine(alpha: f64) -> Self {
        ShapeSpec::RaisedCosine {
            alpha,
            policy: EdgePolicy::Clamp,
        }
    }

    pub fn bump(alpha: f64, beta: f64) -> Self {
        ShapeSpec::Bump {
            alpha,
            beta: BumpWidth::Uniform(beta),
            form: BumpForm::Normalized,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ShapeSpec::Constant => "constant",
            ShapeSpec::RaisedCosine { .. } => "raised-cosine",
            ShapeSpec::Bump { .. } => "bump",
        }
    }

    /// Checks the shape against the partition it will be used with.
    pub fn validate(&self, partition: &ActuationPartition) -> Result<()> {
        match self {
            ShapeSpec::Constant => Ok(()),
            ShapeSpec::RaisedCosine { alpha, policy } => {
                check_alpha(*alpha)?;
                if *policy == EdgePolicy::Reject {
                    for cell in partition.cells() {
                        let need = PI / cell.edge_clearance();
                        if *alpha < need {
                            return Err(Error::config(format!(
                                "raised-cosine alpha = {alpha} is below {need} required to keep the \
                                 support inside interval {}",
                                cell.index
                            )));
                        }
                    }
                }
                Ok(())
            }
            ShapeSpec::Bump { alpha, beta, .. } => {
                check_alpha(*alpha)?;
                if let BumpWidth::PerInterval(v) = beta {
                    if v.len() != partition.len() {
                        return Err(Error::config(format!(
                            "bump needs one beta per interval ({}), got {}",
                            partition.len(),
                            v.len()
                        )));
                    }
                }
                for cell in partition.cells() {
                    let b = self.beta(cell.index);
                    let room = cell.edge_clearance();
                    if !(b > 0.0) {
                        return Err(Error::config(format!("bump beta must be positive, got {b}")));
                    }
                    if b > room * (1.0 + 1e-12) {
                        return Err(Error::config(format!(
                            "bump beta = {b} exceeds the sensor-to-edge distance {room} in interval {}",
                            cell.index
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    fn beta(&self, j: usize) -> f64 {
        match self {
            ShapeSpec::Bump { beta: BumpWidth::Uniform(b), .. } => *b,
            ShapeSpec::Bump { beta: BumpWidth::PerInterval(v), .. } => v[j],
            _ => f64::NAN,
        }
    }

    pub fn support(&self, cell: &Cell, zbar: f64) -> Support {
        let half = match self {
            ShapeSpec::Constant => {
                return Support {
                    lo: cell.lo,
                    hi: cell.hi,
                    clamped: false,
                }
            }
            ShapeSpec::RaisedCosine { alpha, .. } => PI * (1.0 + zbar * zbar) / alpha,
            ShapeSpec::Bump { .. } => self.beta(cell.index),
        };
        let (lo, hi) = (cell.sensor - half, cell.sensor + half);
        Support {
            lo: lo.max(cell.lo),
            hi: hi.min(cell.hi),
            clamped: lo < cell.lo || hi > cell.hi,
        }
    }

    /// `phi_j(x)` for sensor reading `zbar`.
    pub fn value(&self, cell: &Cell, x: f64, zbar: f64) -> f64 {
        let s = x - cell.sensor;
        match self {
            ShapeSpec::Constant => 1.0,
            ShapeSpec::RaisedCosine { alpha, .. } => {
                let k = alpha / (1.0 + zbar * zbar);
                let sup = self.support(cell, zbar);
                if x < sup.lo || x > sup.hi {
                    0.0
                } else {
                    0.5 + 0.5 * (k * s).cos()
                }
            }
            ShapeSpec::Bump { alpha, form, .. } => {
                let b = self.beta(cell.index);
                if s.abs() >= b {
                    return 0.0;
                }
                bump_exponent(*alpha / (1.0 + zbar * zbar), b, s, *form).exp()
            }
        }
    }

    /// `d phi_j / dx`.
    pub fn derivative(&self, cell: &Cell, x: f64, zbar: f64) -> f64 {
        let s = x - cell.sensor;
        match self {
            ShapeSpec::Constant => 0.0,
            ShapeSpec::RaisedCosine { alpha, .. } => {
                let k = alpha / (1.0 + zbar * zbar);
                let sup = self.support(cell, zbar);
                if x < sup.lo || x > sup.hi {
                    0.0
                } else {
                    -0.5 * k * (k * s).sin()
                }
            }
            ShapeSpec::Bump { alpha, form, .. } => {
                let b = self.beta(cell.index);
                if s.abs() >= b {
                    return 0.0;
                }
                let a = *alpha / (1.0 + zbar * zbar);
                let value = bump_exponent(a, b, s, *form).exp();
                if value == 0.0 {
                    return 0.0;
                }
                let gap = b * b - s * s;
                value * (-2.0 * a * s / (gap * gap))
            }
        }
    }

    /// Length scale over which the shape varies; used to grade quadrature.
    pub fn feature_width(&self, cell: &Cell, zbar: f64) -> f64 {
        match self {
            ShapeSpec::Constant => cell.width(),
            ShapeSpec::RaisedCosine { alpha, .. } => PI * (1.0 + zbar * zbar) / alpha,
            ShapeSpec::Bump { alpha, .. } => {
                let b = self.beta(cell.index);
                let a = alpha / (1.0 + zbar * zbar);
                (b * b / a.sqrt()).min(b)
            }
        }
    }

    /// `int_{x_j}^{x_{j+1}} (d/dx F_j)^2 dx` with `F_j = phi_j * zbar`.
    pub fn fx_sq_integral(&self, cell: &Cell, zbar: f64) -> f64 {
        if matches!(self, ShapeSpec::Constant) || zbar == 0.0 {
            return 0.0;
        }
        let sup = self.support(cell, zbar);
        let scale = self.feature_width(cell, zbar);
        let center = cell.sensor.clamp(sup.lo, sup.hi);
        let integral = graded_integral(
            |x| {
                let d = self.derivative(cell, x, zbar);
                d * d
            },
            sup.lo,
            center,
            sup.hi,
            scale,
        );
        integral * zbar * zbar
    }

    /// Largest `sum_j int (F_j)_x^2` over readings with `|zbar| <= reading_bound`,
    /// scanned on `n_scan` levels per interval.
    pub fn fx_sq_sup(&self, partition: &ActuationPartition, reading_bound: f64, n_scan: usize) -> f64 {
        let n_scan = n_scan.max(2);
        partition
            .cells()
            .map(|cell| {
                (0..n_scan)
                    .map(|i| reading_bound.abs() * i as f64 / (n_scan - 1) as f64)
                    .map(|z| self.fx_sq_integral(&cell, z))
                    .fold(0.0, f64::max)
            })
            .sum()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::config(format!("shape alpha must be positive, got {alpha}")));
    }
    Ok(())
}

#[inline]
fn bump_exponent(a: f64, b: f64, s: f64, form: BumpForm) -> f64 {
    let gap = b * b - s * s;
    match form {
        // A/b^2 - A/(b^2 - s^2), written to vanish exactly at s = 0
        BumpForm::Normalized => -a * s * s / (b * b * gap),
        BumpForm::Literal => a / b - a / gap,
    }
}

pub fn shape_value(shape: &ShapeSpec, cell: &Cell, x: f64, zbar: f64) -> f64 {
    shape.value(cell, x, zbar)
}

pub fn shape_derivative(shape: &ShapeSpec, cell: &Cell, x: f64, zbar: f64) -> f64 {
    shape.derivative(cell, x, zbar)
}

pub fn support(shape: &ShapeSpec, cell: &Cell, zbar: f64) -> Support {
    shape.support(cell, zbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::uniform_partition;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn cell10() -> Cell {
        uniform_partition(1.0, 10).unwrap().cell(0)
    }

    #[test]
    fn constant_is_identically_one() {
        let c = cell10();
        for &(x, z) in &[(0.0, 0.0), (0.03, 5.0), (0.0999, -2.0)] {
            assert_eq!(ShapeSpec::Constant.value(&c, x, z), 1.0);
            assert_eq!(ShapeSpec::Constant.derivative(&c, x, z), 0.0);
        }
        let s = ShapeSpec::Constant.support(&c, 1.0);
        assert_eq!((s.lo, s.hi, s.clamped), (0.0, 0.1, false));
    }

    #[test]
    fn raised_cosine_peak_and_edges() {
        let c = cell10();
        let rc = ShapeSpec::raised_cosine(100.0);
        assert_eq!(rc.value(&c, c.sensor, 0.3), 1.0);
        assert_eq!(rc.derivative(&c, c.sensor, 0.3), 0.0);
        let zbar: f64 = 0.2;
        let edge = c.sensor + PI * (1.0 + zbar * zbar) / 100.0;
        assert!(rc.value(&c, edge, zbar).abs() < 1e-15);
        assert_eq!(rc.value(&c, edge + 1e-9, zbar), 0.0);
    }

    #[test]
    fn raised_cosine_support_clamps() {
        let c = cell10();
        let rc = ShapeSpec::raised_cosine(100.0);
        let s = rc.support(&c, 0.0);
        assert!((s.lo - (0.05 - PI / 100.0)).abs() < 1e-15);
        assert!((s.hi - (0.05 + PI / 100.0)).abs() < 1e-15);
        assert!(!s.clamped);
        // 1 + zbar^2 = 2 makes the half-width 0.0628 > 0.05
        let s = rc.support(&c, 1.0);
        assert!(s.clamped);
        assert_eq!((s.lo, s.hi), (0.0, 0.1));
    }

    #[test]
    fn larger_alpha_shrinks_raised_cosine_support() {
        let c = cell10();
        let mut last = f64::INFINITY;
        for alpha in [70.0, 100.0, 200.0, 400.0, 1000.0] {
            let s = ShapeSpec::raised_cosine(alpha).support(&c, 0.5);
            let w = s.hi - s.lo;
            assert!(w < last);
            last = w;
        }
    }

    #[test]
    fn bump_support_and_peak() {
        let c = cell10();
        let bump = ShapeSpec::bump(1000.0, 1.0 / 80.0);
        let s = bump.support(&c, 0.7);
        assert!((s.lo - 0.0375).abs() < 1e-15 && (s.hi - 0.0625).abs() < 1e-15);
        assert_eq!(bump.value(&c, c.sensor, 0.7), 1.0);
        assert_eq!(bump.value(&c, c.sensor + 1.0 / 80.0, 0.7), 0.0);
        assert_eq!(bump.derivative(&c, c.sensor - 1.0 / 80.0, 0.7), 0.0);
    }

    #[test]
    fn literal_bump_misses_unity_at_sensor() {
        let c = cell10();
        let beta = 0.04;
        let alpha = 0.01;
        let lit = ShapeSpec::Bump {
            alpha,
            beta: BumpWidth::Uniform(beta),
            form: BumpForm::Literal,
        };
        let expected = (alpha * (1.0 / beta - 1.0 / (beta * beta))).exp();
        assert!((lit.value(&c, c.sensor, 0.0) - expected).abs() < 1e-14);
        assert!(lit.value(&c, c.sensor, 0.0) < 1.0);
    }

    #[test]
    fn bump_validation() {
        let p = uniform_partition(1.0, 10).unwrap();
        assert!(ShapeSpec::bump(1000.0, 1.0 / 80.0).validate(&p).is_ok());
        assert!(ShapeSpec::bump(1000.0, 0.05).validate(&p).is_ok());
        assert!(ShapeSpec::bump(1000.0, 0.06).validate(&p).is_err());
        assert!(ShapeSpec::bump(-1.0, 0.01).validate(&p).is_err());
        assert!(ShapeSpec::bump(1.0, 0.0).validate(&p).is_err());
        let wrong_len = ShapeSpec::Bump {
            alpha: 1.0,
            beta: BumpWidth::PerInterval(vec![0.01; 3]),
            form: BumpForm::Normalized,
        };
        assert!(wrong_len.validate(&p).is_err());
        let strict = ShapeSpec::RaisedCosine {
            alpha: 50.0,
            policy: EdgePolicy::Reject,
        };
        assert!(strict.validate(&p).is_err());
        let strict = ShapeSpec::RaisedCosine {
            alpha: 70.0,
            policy: EdgePolicy::Reject,
        };
        assert!(strict.validate(&p).is_ok());
    }

    fn families() -> Vec<ShapeSpec> {
        vec![
            ShapeSpec::Constant,
            ShapeSpec::raised_cosine(100.0),
            ShapeSpec::raised_cosine(1000.0),
            ShapeSpec::bump(1.0, 0.04),
            ShapeSpec::bump(0.05, 0.05),
            ShapeSpec::Bump {
                alpha: 1e-3,
                beta: BumpWidth::PerInterval((0..10).map(|j| 0.01 + 0.003 * j as f64).collect()),
                form: BumpForm::Normalized,
            },
        ]
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = uniform_partition(1.0, 10).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let h = 1e-7;
        for shape in families() {
            for _ in 0..1000 {
                let cell = p.cell(rng.random_range(0..10));
                let x = rng.random_range(cell.lo..cell.hi);
                let z = rng.random_range(-0.7..0.7);
                let fd = (shape.value(&cell, x + h, z) - shape.value(&cell, x - h, z)) / (2.0 * h);
                let d = shape.derivative(&cell, x, z);
                // skip the kink of a clamped raised-cosine at the interval edge
                let sup = shape.support(&cell, z);
                if sup.clamped && ((x - sup.lo).abs() < 2.0 * h || (x - sup.hi).abs() < 2.0 * h) {
                    continue;
                }
                assert!((fd - d).abs() < 1e-4, "{shape:?} x={x} z={z}: fd={fd} d={d}");
            }
        }
    }

    #[test]
    fn steep_reference_bump_derivative_matches_relative_difference() {
        // alpha = 1000, beta = 1/80 varies on a 1e-5 scale; compare relative to the peak slope
        let p = uniform_partition(1.0, 10).unwrap();
        let shape = ShapeSpec::bump(1000.0, 1.0 / 80.0);
        let cell = p.cell(4);
        let h = 1e-9;
        let xs: Vec<f64> = (-200..=200).map(|i| cell.sensor + i as f64 * 5e-8).collect();
        let peak = xs.iter().map(|&x| shape.derivative(&cell, x, 0.3).abs()).fold(0.0, f64::max);
        assert!(peak > 1e4);
        for &x in &xs {
            let fd = (shape.value(&cell, x + h, 0.3) - shape.value(&cell, x - h, 0.3)) / (2.0 * h);
            assert!((fd - shape.derivative(&cell, x, 0.3)).abs() < 1e-3 * peak, "x={x}");
        }
    }

    #[test]
    fn fx_integral_of_raised_cosine_is_closed_form() {
        // int (0.5 k sin(k s))^2 ds over |s| <= pi/k equals k pi / 4
        let c = cell10();
        let alpha = 100.0;
        let z: f64 = 0.5;
        let k = alpha / (1.0 + z * z);
        let got = ShapeSpec::raised_cosine(alpha).fx_sq_integral(&c, z);
        assert!((got - z * z * k * PI / 4.0).abs() < 1e-10 * got);
        assert_eq!(ShapeSpec::Constant.fx_sq_integral(&c, 3.0), 0.0);
    }

    #[test]
    fn thin_bump_integral_matches_gaussian_limit() {
        // for a very sharp bump phi ~ exp(-s^2/w^2), w = beta^2/sqrt(A):
        // int phi_x^2 ds -> sqrt(pi/2) / w
        let c = cell10();
        let beta = 1.0 / 80.0;
        let got = ShapeSpec::bump(1000.0, beta).fx_sq_integral(&c, 1.0);
        let w = beta * beta / (1000.0f64 / 2.0).sqrt();
        let approx = (PI / 2.0).sqrt() / w;
        assert!((got / approx - 1.0).abs() < 1e-3, "{got} vs {approx}");
    }
}
