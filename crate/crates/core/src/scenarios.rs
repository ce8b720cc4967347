//! Built-in reference plants and initial conditions.
//!
//! Coefficients of the reference plants:
//!
//! ```text
//! a1 = 1 + sin x          a2 = -2 - sin(1.3 x)
//! phi = 5 + cos(3 z)      f  = 0.2 (sin 30t + sin 2t)
//! b  = 2 + sin(1.1 z)     (damped wave only)
//! ```
//!
//! on `[0, 1]` with Dirichlet ends.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{CatalogExpr, Factor, Func, Term};
use crate::plant::{BoundaryCondition, CoefficientField, FieldKind, Interval, PlantBounds, PlantSpec};

fn sin(x: f64, z: f64, t: f64) -> Factor {
    Factor::new(Func::Sin, x, z, t, 0.0)
}

fn cos(x: f64, z: f64, t: f64) -> Factor {
    Factor::new(Func::Cos, x, z, t, 0.0)
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).expect("static interval")
}

pub fn reference_a1() -> Result<CoefficientField> {
    let e = CatalogExpr::new(vec![Term::constant(1.0), Term::with(1.0, sin(1.0, 0.0, 0.0))]);
    CoefficientField::catalog(FieldKind::Diffusion, e, iv(0.5, 2.0))
}

pub fn reference_a2() -> Result<CoefficientField> {
    let e = CatalogExpr::new(vec![Term::constant(-2.0), Term::with(-1.0, sin(1.3, 0.0, 0.0))]);
    CoefficientField::catalog(FieldKind::Convection, e, iv(-5.0, 5.0))
}

/// `5 + cos 3z` ranges over `[4, 6]`, so that is what gets declared.
pub fn reference_phi() -> Result<CoefficientField> {
    let e = CatalogExpr::new(vec![Term::constant(5.0), Term::with(1.0, cos(0.0, 3.0, 0.0))]);
    CoefficientField::catalog(FieldKind::Reaction, e, iv(4.0, 6.0))
}

pub fn reference_disturbance() -> Result<CoefficientField> {
    let e = CatalogExpr::new(vec![
        Term::with(0.2, sin(0.0, 0.0, 30.0)),
        Term::with(0.2, sin(0.0, 0.0, 2.0)),
    ]);
    CoefficientField::catalog(FieldKind::Disturbance, e, iv(-0.4, 0.4))
}

pub fn reference_parabolic() -> Result<PlantSpec> {
    PlantSpec::parabolic(
        1.0,
        reference_a1()?,
        reference_a2()?,
        reference_phi()?,
        reference_disturbance()?,
        BoundaryCondition::Dirichlet,
    )
}

/// Damped wave with `b = 2 + sin(1.1 z)` in `[1, 3]`.
pub fn reference_hyperbolic() -> Result<PlantSpec> {
    let b = CatalogExpr::new(vec![Term::constant(2.0), Term::with(1.0, sin(0.0, 1.1, 0.0))]);
    PlantSpec::hyperbolic(
        1.0,
        reference_a1()?,
        reference_a2()?,
        reference_phi()?,
        CoefficientField::catalog(FieldKind::Damping, b, iv(1.0, 3.0))?,
        reference_disturbance()?,
        BoundaryCondition::Dirichlet,
    )
}

/// The wave scenario with `b = -2 - sin(1.1 z)`, declared in `[-5, -1]`,
/// i.e. with anti-damping. No certificate applies to it.
pub fn reference_hyperbolic_literal() -> Result<PlantSpec> {
    let b = CatalogExpr::new(vec![Term::constant(-2.0), Term::with(-1.0, sin(0.0, 1.1, 0.0))]);
    PlantSpec::hyperbolic_any_damping(
        1.0,
        reference_a1()?,
        reference_a2()?,
        reference_phi()?,
        CoefficientField::catalog(FieldKind::Damping, b, iv(-5.0, -1.0))?,
        reference_disturbance()?,
        BoundaryCondition::Dirichlet,
    )
}

/// The coarse coefficient box quoted for the reference plants:
/// `a1 in [0.5, 2]`, `a2 in [-5, 5]`, `phi in [-5, 5]`, `b in [-5, -1]`, `|f| <= 20`.
pub fn quoted_bounds() -> PlantBounds {
    PlantBounds {
        a1: iv(0.5, 2.0),
        a2: iv(-5.0, 5.0),
        phi: iv(-5.0, 5.0),
        b: Some(iv(-5.0, -1.0)),
        f_abs_max: 20.0,
    }
}

pub const PRESET_NAMES: [&str; 3] = ["paper-parabolic", "paper-hyperbolic", "paper-hyperbolic-literal"];

pub fn preset(name: &str) -> Result<PlantSpec> {
    match name {
        "paper-parabolic" => reference_parabolic(),
        "paper-hyperbolic" => reference_hyperbolic(),
        "paper-hyperbolic-literal" => reference_hyperbolic_literal(),
        other => Err(Error::config(format!(
            "unknown plant preset {other:?} (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// Initial displacement; the initial velocity is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    /// `sin(pi x / l)`
    #[default]
    Sine,
    Zero,
}

impl InitialCondition {
    pub fn value(self, x: f64, length: f64) -> f64 {
        match self {
            InitialCondition::Sine => (PI * x / length).sin(),
            InitialCondition::Zero => 0.0,
        }
    }
}
