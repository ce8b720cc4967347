//! Stability certificates for the closed loop.
//!
//! For the parabolic loop the certificate is a 4x4 matrix in the variables
//! `(z, z_x, f, (F_j)_x)`, affine in `a2`; for the hyperbolic loop a 5x5
//! matrix in `(z, z_x, z_t, f, (F_j)_x)`, affine in `(phi, a2, b)`. Both
//! must be negative semidefinite at every vertex of the coefficient box,
//! which by convexity covers the whole box. A feasible certificate yields
//!
//! ```text
//! V(t) <= V(0) exp(-2 delta t) + gamma / (2 delta)
//! ```

mod matrix;
mod search;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use matrix::{is_negative_semidefinite, SemidefiniteVerdict, SymMatrix};
pub use search::{geometric, search_feasible, SearchGrid, SearchProblem, SearchReport};

use crate::error::{Error, Result};
use crate::plant::Interval;

/// Default feasibility tolerance on the largest vertex eigenvalue.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Free parameters shared by both certificate families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    /// Feedback gain `K`.
    pub gain: f64,
    /// Young's-inequality weight `R`.
    pub young_weight: f64,
    /// Decay rate `delta`.
    pub decay_rate: f64,
    /// Weight `beta_1` on the disturbance energy.
    pub beta_disturbance: f64,
    /// Weight `beta_2` on the shape-slope energy.
    pub beta_shape: f64,
}

impl Tuning {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("K", self.gain),
            ("R", self.young_weight),
            ("delta", self.decay_rate),
            ("beta1", self.beta_disturbance),
            ("beta2", self.beta_shape),
        ];
        for (name, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `4 delta^2 / pi^2`: the extended Wirtinger constant for spacing `delta`.
pub fn wirtinger_factor(spacing: f64) -> f64 {
    4.0 * spacing * spacing / (PI * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicLmiParams {
    pub tuning: Tuning,
    /// Max actuation-interval width `Delta`.
    pub spacing: f64,
    pub a1_lower: f64,
    pub phi_upper: f64,
    pub a2: Interval,
}

impl ParabolicLmiParams {
    pub fn validate(&self) -> Result<()> {
        self.tuning.validate()?;
        if !(self.spacing > 0.0) {
            return Err(Error::arg(format!("spacing must be positive, got {}", self.spacing)));
        }
        if !(self.a1_lower > 0.0) {
            return Err(Error::arg(format!("a1 lower bound must be positive, got {}", self.a1_lower)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicLmiParams {
    pub tuning: Tuning,
    /// Cross-term weight `p` of the energy functional, `|p| < 0.5`.
    pub p: f64,
    pub spacing: f64,
    pub a1_lower: f64,
    pub a2: Interval,
    pub phi: Interval,
    pub b: Interval,
}

impl HyperbolicLmiParams {
    pub fn validate(&self) -> Result<()> {
        self.tuning.validate()?;
        if !(self.p.abs() < 0.5) {
            return Err(Error::arg(format!("p must lie in (-0.5, 0.5), got {}", self.p)));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::arg(format!("spacing must be positive, got {}", self.spacing)));
        }
        if !(self.a1_lower > 0.0) {
            return Err(Error::arg(format!("a1 lower bound must be positive, got {}", self.a1_lower)));
        }
        if !(self.b.lo > 0.0) {
            return Err(Error::arg(format!("damping lower bound must be positive, got {}", self.b.lo)));
        }
        Ok(())
    }
}

pub fn build_psi_parabolic(p: &ParabolicLmiParams, a2: f64) -> SymMatrix {
    let t = &p.tuning;
    let (k, r) = (t.gain, t.young_weight);
    let w = wirtinger_factor(p.spacing) * k / r;
    let mut m = SymMatrix::zeros(4);
    m.set(0, 0, -2.0 * k + 2.0 * p.phi_upper + 2.0 * t.decay_rate + k * r);
    m.set(0, 1, a2);
    m.set(0, 2, 1.0);
    m.set(1, 1, -2.0 * p.a1_lower + w);
    m.set(1, 3, -w);
    m.set(2, 2, -t.beta_disturbance);
    m.set(3, 3, -t.beta_shape + w);
    m
}

pub fn build_psi_hyperbolic(p: &HyperbolicLmiParams, phi: f64, a2: f64, b: f64) -> SymMatrix {
    let t = &p.tuning;
    let (k, r, q) = (t.gain, t.young_weight, p.p);
    let w = wirtinger_factor(p.spacing) * k / r;
    let mut m = SymMatrix::zeros(5);
    m.set(0, 0, -0.5 * q * (k - p.phi.hi) + 0.25 * k * r * q * q + 2.0 * t.decay_rate);
    m.set(0, 1, 0.5 * q * a2);
    m.set(0, 2, 1.0 - 0.5 * q * b - k + phi + k * r * q);
    m.set(0, 3, 0.5 * q);
    m.set(1, 1, -q * p.a1_lower + w);
    m.set(1, 2, a2);
    m.set(1, 4, -w);
    m.set(2, 2, 0.5 * q - 2.0 * p.b.lo + 0.5 * k * r);
    m.set(2, 3, 1.0);
    m.set(3, 3, -t.beta_disturbance);
    m.set(4, 4, -t.beta_shape + w);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CertificateParams {
    Parabolic(ParabolicLmiParams),
    Hyperbolic(HyperbolicLmiParams),
}

impl CertificateParams {
    pub fn tuning(&self) -> &Tuning {
        match self {
            CertificateParams::Parabolic(p) => &p.tuning,
            CertificateParams::Hyperbolic(p) => &p.tuning,
        }
    }

    pub fn spacing(&self) -> f64 {
        match self {
            CertificateParams::Parabolic(p) => p.spacing,
            CertificateParams::Hyperbolic(p) => p.spacing,
        }
    }

    pub fn cross_weight(&self) -> Option<f64> {
        match self {
            CertificateParams::Parabolic(_) => None,
            CertificateParams::Hyperbolic(p) => Some(p.p),
        }
    }
}

/// Largest eigenvalue of the certificate matrix at one coefficient vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexVerdict {
    pub a2: f64,
    pub phi: Option<f64>,
    pub b: Option<f64>,
    pub max_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmiCertificate {
    pub params: CertificateParams,
    pub vertices: Vec<VertexVerdict>,
    pub tolerance: f64,
    pub feasible: bool,
    /// Residual numerator `gamma`; zero until [`with_gamma`](Self::with_gamma).
    pub gamma: f64,
    /// Ultimate bound `gamma / (2 delta)`.
    pub bound: f64,
}

/// Suprema entering `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GammaInputs {
    /// `sup_t int_0^l f^2 dx`
    pub f_sq_sup: f64,
    /// `sup_t sum_j int (F_j)_x^2 dx`
    pub fx_sq_sup: f64,
}

impl LmiCertificate {
    fn from_vertices(params: CertificateParams, vertices: Vec<VertexVerdict>, tolerance: f64) -> Self {
        let feasible = vertices.iter().all(|v| v.max_eigenvalue <= tolerance);
        LmiCertificate {
            params,
            vertices,
            tolerance,
            feasible,
            gamma: 0.0,
            bound: 0.0,
        }
    }

    pub fn tuning(&self) -> &Tuning {
        self.params.tuning()
    }

    pub fn decay_rate(&self) -> f64 {
        self.tuning().decay_rate
    }

    pub fn worst_eigenvalue(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.max_eigenvalue)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fills `gamma` and the ultimate bound `gamma / (2 delta)`.
    pub fn with_gamma(mut self, inputs: GammaInputs) -> Result<Self> {
        let t = *self.tuning();
        self.gamma = gamma_bound(t.beta_disturbance, t.beta_shape, inputs.f_sq_sup, inputs.fx_sq_sup)?;
        self.bound = if t.decay_rate > 0.0 {
            self.gamma / (2.0 * t.decay_rate)
        } else {
            f64::INFINITY
        };
        Ok(self)
    }
}

/// Vertex test of the parabolic certificate at `a2 in {lo, hi}`.
pub fn check_parabolic(p: &ParabolicLmiParams, tol: f64) -> Result<LmiCertificate> {
    let mut a2s = vec![p.a2.lo];
    if p.a2.hi != p.a2.lo {
        a2s.push(p.a2.hi);
    }
    let vertices = a2s
        .into_iter()
        .map(|a2| {
            Ok(VertexVerdict {
                a2,
                phi: None,
                b: None,
                max_eigenvalue: build_psi_parabolic(p, a2).max_eigenvalue()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LmiCertificate::from_vertices(CertificateParams::Parabolic(*p), vertices, tol))
}

fn ends(i: Interval) -> Vec<f64> {
    if i.lo == i.hi {
        vec![i.lo]
    } else {
        vec![i.lo, i.hi]
    }
}

/// Vertex test of the hyperbolic certificate on the `(phi, a2, b)` box.
pub fn check_hyperbolic(p: &HyperbolicLmiParams, tol: f64) -> Result<LmiCertificate> {
    let mut vertices = Vec::with_capacity(8);
    for &phi in &ends(p.phi) {
        for &a2 in &ends(p.a2) {
            for &b in &ends(p.b) {
                vertices.push(VertexVerdict {
                    a2,
                    phi: Some(phi),
                    b: Some(b),
                    max_eigenvalue: build_psi_hyperbolic(p, phi, a2, b).max_eigenvalue()?,
                });
            }
        }
    }
    Ok(LmiCertificate::from_vertices(CertificateParams::Hyperbolic(*p), vertices, tol))
}

/// `gamma = beta1 * sup int f^2 + beta2 * sup sum_j int (F_j)_x^2`.
pub fn gamma_bound(beta1: f64, beta2: f64, f_sq_integral_sup: f64, fx_shape_sq_integral_sup: f64) -> Result<f64> {
    for (name, v) in [
        ("beta1", beta1),
        ("beta2", beta2),
        ("sup int f^2", f_sq_integral_sup),
        ("sup sum int F_x^2", fx_shape_sq_integral_sup),
    ] {
        if !(v >= 0.0) {
            return Err(Error::arg(format!("{name} must be nonnegative, got {v}")));
        }
    }
    Ok(beta1 * f_sq_integral_sup + beta2 * fx_shape_sq_integral_sup)
}

/// `V0 exp(-2 delta t) + gamma / (2 delta)`.
pub fn decay_bound(v0: f64, delta: f64, gamma: f64, t: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::arg(format!("decay rate must be positive, got {delta}")));
    }
    if !(v0 >= 0.0 && gamma >= 0.0 && t >= 0.0) {
        return Err(Error::arg(format!(
            "decay bound needs V0, gamma, t >= 0 (got {v0}, {gamma}, {t})"
        )));
    }
    Ok(v0 * (-2.0 * delta * t).exp() + gamma / (2.0 * delta))
}
