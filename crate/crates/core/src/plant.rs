//! Controlled PDE models: the semilinear parabolic equation
//!
//! ```text
//! z_t = (a1(x) z_x)_x + a2(x) z_x + phi(z,x,t) z + u + f
//! ```
//!
//! and its hyperbolic counterpart with `z_tt` on the left and a damping term
//! `- b(z,x,t) z_t`, on `[0, l]` with Dirichlet or mixed boundary conditions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::CatalogExpr;

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::arg(format!("[{lo}, {hi}] is not a valid interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub const fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// `[-r, r]`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Interval::new(-r.abs(), r.abs())
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn abs_max(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// `n` equally spaced samples; a degenerate interval yields its single point.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        if n <= 1 || self.width() == 0.0 {
            return vec![self.lo];
        }
        let step = self.width() / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Which coefficient of the model a field plays, and therefore which of
/// `(z, x, t)` it may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// `a1(x)`
    Diffusion,
    /// `a2(x)`
    Convection,
    /// `phi(z, x, t)`
    Reaction,
    /// `b(z, x, t)`
    Damping,
    /// `f(x, t)`
    Disturbance,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Diffusion => "a1",
            FieldKind::Convection => "a2",
            FieldKind::Reaction => "phi",
            FieldKind::Damping => "b",
            FieldKind::Disturbance => "f",
        }
    }

    pub fn uses_z(self) -> bool {
        matches!(self, FieldKind::Reaction | FieldKind::Damping)
    }

    pub fn uses_t(self) -> bool {
        matches!(
            self,
            FieldKind::Reaction | FieldKind::Damping | FieldKind::Disturbance
        )
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// User-supplied evaluator with the uniform argument order `(z, x, t)`.
pub type FieldFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Evaluator {
    Catalog(CatalogExpr),
    Custom(FieldFn),
}

impl Evaluator {
    #[inline]
    pub fn eval(&self, z: f64, x: f64, t: f64) -> f64 {
        match self {
            Evaluator::Catalog(e) => e.eval(z, x, t),
            Evaluator::Custom(f) => f(z, x, t),
        }
    }
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Catalog(e) => f.debug_tuple("Catalog").field(e).finish(),
            Evaluator::Custom(_) => f.write_str("Custom(<fn>)"),
        }
    }
}

/// A coefficient of the model together with its declared interval bounds.
#[derive(Clone)]
pub struct CoefficientField {
    kind: FieldKind,
    eval: Evaluator,
    dx: Option<FieldFn>,
    bounds: Interval,
}

impl CoefficientField {
    pub fn catalog(kind: FieldKind, expr: CatalogExpr, bounds: Interval) -> Result<Self> {
        if !kind.uses_z() && expr.depends_on_z() {
            return Err(Error::config(format!("{kind} may not depend on z")));
        }
        if !kind.uses_t() && expr.depends_on_t() {
            return Err(Error::config(format!("{kind} may not depend on t")));
        }
        Self::build(kind, Evaluator::Catalog(expr), bounds)
    }

    pub fn constant(kind: FieldKind, value: f64, bounds: Interval) -> Result<Self> {
        Self::catalog(kind, CatalogExpr::constant(value), bounds)
    }

    pub fn custom<F>(kind: FieldKind, f: F, bounds: Interval) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(kind, Evaluator::Custom(Arc::new(f)), bounds)
    }

    fn build(kind: FieldKind, eval: Evaluator, bounds: Interval) -> Result<Self> {
        if kind == FieldKind::Diffusion && bounds.lo <= 0.0 {
            return Err(Error::config(format!(
                "a1 lower bound must be positive, got {}",
                bounds.lo
            )));
        }
        Ok(CoefficientField {
            kind,
            eval,
            dx: None,
            bounds,
        })
    }

    /// Registers an analytic `d/dx`, replacing the finite-difference fallback.
    pub fn with_derivative<F>(mut self, dx: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.dx = Some(Arc::new(dx));
        self
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn bounds(&self) -> Interval {
        self.bounds
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.eval
    }

    /// Whether the value can change with `x`; custom evaluators are assumed to.
    pub fn varies_with_x(&self) -> bool {
        match &self.eval {
            Evaluator::Catalog(e) => e.depends_on_x(),
            Evaluator::Custom(_) => true,
        }
    }

    /// Whether the value can change with `z`; custom evaluators are assumed
    /// to whenever their kind allows it.
    pub fn varies_with_z(&self) -> bool {
        match &self.eval {
            Evaluator::Catalog(e) => e.depends_on_z(),
            Evaluator::Custom(_) => self.kind.uses_z(),
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.dx.is_some()
    }

    #[inline]
    pub fn eval(&self, z: f64, x: f64, t: f64) -> f64 {
        self.eval.eval(z, x, t)
    }

    /// `d/dx` at `(z, x, t)`: the registered derivative, or a central
    /// difference with step `h`.
    pub fn derivative_x(&self, z: f64, x: f64, t: f64, h: f64) -> f64 {
        match &self.dx {
            Some(d) => d(z, x, t),
            None => (self.eval(z, x + h, t) - self.eval(z, x - h, t)) / (2.0 * h),
        }
    }
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("kind", &self.kind)
            .field("eval", &self.eval)
            .field("analytic_dx", &self.dx.is_some())
            .field("bounds", &self.bounds)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// `z(0) = z(l) = 0`
    Dirichlet,
    /// `z_x(0) = gamma z(0)`, `z(l) = 0`
    Mixed { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Parabolic,
    Hyperbolic,
}

/// A fully specified plant. Immutable after construction.
#[derive(Debug, Clone)]
pub struct PlantSpec {
    order: Order,
    length: f64,
    a1: CoefficientField,
    a2: CoefficientField,
    phi: CoefficientField,
    b: Option<CoefficientField>,
    f: CoefficientField,
    bc: BoundaryCondition,
}

fn expect_kind(field: &CoefficientField, kind: FieldKind) -> Result<()> {
    if field.kind() != kind {
        return Err(Error::config(format!(
            "expected a {kind} field, got {}",
            field.kind()
        )));
    }
    Ok(())
}

impl PlantSpec {
    pub fn parabolic(
        length: f64,
        a1: CoefficientField,
        a2: CoefficientField,
        phi: CoefficientField,
        f: CoefficientField,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        Self::build(Order::Parabolic, length, a1, a2, phi, None, f, bc, true)
    }

    /// Hyperbolic plant; the damping lower bound must be positive.
    #[allow(clippy::too_many_arguments)]
    pub fn hyperbolic(
        length: f64,
        a1: CoefficientField,
        a2: CoefficientField,
        phi: CoefficientField,
        b: CoefficientField,
        f: CoefficientField,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        Self::build(Order::Hyperbolic, length, a1, a2, phi, Some(b), f, bc, true)
    }

    /// Hyperbolic plant without the `b_lower > 0` requirement, for
    /// reproducing scenarios whose damping has the opposite sign.
    #[allow(clippy::too_many_arguments)]
    pub fn hyperbolic_any_damping(
        length: f64,
        a1: CoefficientField,
        a2: CoefficientField,
        phi: CoefficientField,
        b: CoefficientField,
        f: CoefficientField,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        Self::build(Order::Hyperbolic, length, a1, a2, phi, Some(b), f, bc, false)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        order: Order,
        length: f64,
        a1: CoefficientField,
        a2: CoefficientField,
        phi: CoefficientField,
        b: Option<CoefficientField>,
        f: CoefficientField,
        bc: BoundaryCondition,
        require_positive_damping: bool,
    ) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::config(format!("domain length must be positive, got {length}")));
        }
        expect_kind(&a1, FieldKind::Diffusion)?;
        expect_kind(&a2, FieldKind::Convection)?;
        expect_kind(&phi, FieldKind::Reaction)?;
        expect_kind(&f, FieldKind::Disturbance)?;
        if let Some(b) = &b {
            expect_kind(b, FieldKind::Damping)?;
            if require_positive_damping && b.bounds().lo <= 0.0 {
                return Err(Error::config(format!(
                    "damping lower bound must be positive, got {}",
                    b.bounds().lo
                )));
            }
        }
        if let BoundaryCondition::Mixed { gamma } = bc {
            if !(gamma >= 0.0 && gamma.is_finite()) {
                return Err(Error::config(format!("mixed boundary gamma must be >= 0, got {gamma}")));
            }
        }
        Ok(PlantSpec {
            order,
            length,
            a1,
            a2,
            phi,
            b,
            f,
            bc,
        })
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn a1(&self) -> &CoefficientField {
        &self.a1
    }

    pub fn a2(&self) -> &CoefficientField {
        &self.a2
    }

    pub fn phi(&self) -> &CoefficientField {
        &self.phi
    }

    pub fn damping(&self) -> Option<&CoefficientField> {
        self.b.as_ref()
    }

    pub fn disturbance(&self) -> &CoefficientField {
        &self.f
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn fields(&self) -> impl Iterator<Item = &CoefficientField> {
        [&self.a1, &self.a2, &self.phi]
            .into_iter()
            .chain(self.b.as_ref())
            .chain(std::iter::once(&self.f))
    }

    /// Step used for the central difference of `a1` when no analytic
    /// derivative is registered.
    pub fn derivative_step(&self) -> f64 {
        1e-6 * self.length
    }

    pub fn bounds(&self) -> PlantBounds {
        PlantBounds {
            a1: self.a1.bounds(),
            a2: self.a2.bounds(),
            phi: self.phi.bounds(),
            b: self.b.as_ref().map(|b| b.bounds()),
            f_abs_max: self.f.bounds().abs_max(),
        }
    }

    pub(crate) fn check_x(&self, x: f64) -> Result<()> {
        if !(0.0..=self.length).contains(&x) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: 0.0,
                hi: self.length,
            });
        }
        Ok(())
    }
}

/// Declared coefficient bounds, as consumed by the certificate builders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantBounds {
    pub a1: Interval,
    pub a2: Interval,
    pub phi: Interval,
    pub b: Option<Interval>,
    pub f_abs_max: f64,
}

/// Every coefficient the semidiscrete right-hand side needs at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsCoefficients {
    pub a1: f64,
    pub a1_x: f64,
    pub a2: f64,
    pub phi: f64,
    pub b: Option<f64>,
    pub f: f64,
}

pub fn evaluate_rhs_coefficients(spec: &PlantSpec, z: f64, x: f64, t: f64) -> Result<RhsCoefficients> {
    spec.check_x(x)?;
    if t < 0.0 {
        return Err(Error::arg(format!("time must be nonnegative, got {t}")));
    }
    Ok(RhsCoefficients {
        a1: spec.a1.eval(z, x, t),
        a1_x: spec.a1.derivative_x(z, x, t, spec.derivative_step()),
        a2: spec.a2.eval(z, x, t),
        phi: spec.phi.eval(z, x, t),
        b: spec.b.as_ref().map(|b| b.eval(z, x, t)),
        f: spec.f.eval(z, x, t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub field: FieldKind,
    pub z: f64,
    pub x: f64,
    pub t: f64,
    pub value: f64,
    pub declared: Interval,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundsReport {
    pub samples_checked: usize,
    pub violations: Vec<Violation>,
}

impl BoundsReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count_for(&self, kind: FieldKind) -> usize {
        self.violations.iter().filter(|v| v.field == kind).count()
    }
}

/// Samples every field on an `n_samples`-per-argument grid over the
/// arguments it declares (`x` over `[0, l]`, plus `z` and/or `t` over the
/// given ranges) and lists each value outside its declared interval.
pub fn validate_bounds(
    spec: &PlantSpec,
    n_samples: usize,
    z_range: Interval,
    t_range: Interval,
) -> Result<BoundsReport> {
    if n_samples < 2 {
        return Err(Error::arg(format!("n_samples must be >= 2, got {n_samples}")));
    }
    let xs = Interval { lo: 0.0, hi: spec.length }.samples(n_samples);
    let zs = z_range.samples(n_samples);
    let ts = t_range.samples(n_samples);
    let zero = [0.0];

    let mut report = BoundsReport::default();
    for field in spec.fields() {
        let kind = field.kind();
        let declared = field.bounds();
        let z_grid: &[f64] = if kind.uses_z() { &zs } else { &zero };
        let t_grid: &[f64] = if kind.uses_t() { &ts } else { &zero };
        for &z in z_grid {
            for &x in &xs {
                for &t in t_grid {
                    let value = field.eval(z, x, t);
                    report.samples_checked += 1;
                    if !declared.contains(value) {
                        report.violations.push(Violation {
                            field: kind,
                            z,
                            x,
                            t,
                            value,
                            declared,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn trivial_spec() -> PlantSpec {
        let wide = Interval::new(-10.0, 10.0).unwrap();
        PlantSpec::parabolic(
            1.0,
            CoefficientField::constant(FieldKind::Diffusion, 1.0, Interval::new(0.5, 2.0).unwrap()).unwrap(),
            CoefficientField::constant(FieldKind::Convection, 0.0, wide).unwrap(),
            CoefficientField::constant(FieldKind::Reaction, 0.0, wide).unwrap(),
            CoefficientField::constant(FieldKind::Disturbance, 0.0, wide).unwrap(),
            BoundaryCondition::Dirichlet,
        )
        .unwrap()
    }

    #[test]
    fn constant_fields_evaluate_trivially() {
        let c = evaluate_rhs_coefficients(&trivial_spec(), 0.3, 0.5, 0.0).unwrap();
        assert_eq!(c.a1, 1.0);
        assert_eq!(c.a1_x, 0.0);
        assert_eq!((c.a2, c.phi, c.f), (0.0, 0.0, 0.0));
        assert!(c.b.is_none());
    }

    #[test]
    fn reference_parabolic_values_at_origin() {
        let spec = scenarios::reference_parabolic().unwrap();
        let c = evaluate_rhs_coefficients(&spec, 0.0, 0.0, 0.0).unwrap();
        assert!((c.a1 - 1.0).abs() < 1e-15);
        assert!((c.a2 + 2.0).abs() < 1e-15);
        assert!((c.phi - 6.0).abs() < 1e-15);
        assert!(c.f.abs() < 1e-15);
    }

    #[test]
    fn a1_derivative_by_central_difference() {
        let spec = scenarios::reference_parabolic().unwrap();
        assert!(!spec.a1().has_analytic_derivative());
        let c = evaluate_rhs_coefficients(&spec, 0.0, 0.5, 0.0).unwrap();
        assert!((c.a1_x - 0.5f64.cos()).abs() < 1e-5);
    }

    #[test]
    fn registered_derivative_takes_precedence() {
        let a1 = CoefficientField::custom(FieldKind::Diffusion, |_, x, _| 1.0 + x.sin(), Interval::new(0.5, 2.0).unwrap())
            .unwrap();
        let h = 1e-6;
        let fd = a1.derivative_x(0.0, 0.3, 0.0, h);
        let a1 = a1.with_derivative(|_, x, _| x.cos());
        let exact = a1.derivative_x(0.0, 0.3, 0.0, h);
        assert_eq!(exact, 0.3f64.cos());
        // gradient check: within 10 h
        assert!((fd - exact).abs() < 10.0 * h);
    }

    #[test]
    fn x_outside_domain_is_rejected() {
        let spec = trivial_spec();
        assert!(matches!(
            evaluate_rhs_coefficients(&spec, 0.0, 1.5, 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(evaluate_rhs_coefficients(&spec, 0.0, -1e-12, 0.0).is_err());
    }

    #[test]
    fn hyperbolic_carries_damping() {
        let spec = scenarios::reference_hyperbolic().unwrap();
        let c = evaluate_rhs_coefficients(&spec, 0.0, 0.2, 0.0).unwrap();
        assert_eq!(c.b, Some(2.0));
        assert_eq!(spec.order(), Order::Hyperbolic);
    }

    #[test]
    fn invariant_violations_rejected_at_construction() {
        assert!(CoefficientField::constant(FieldKind::Diffusion, 1.0, Interval::new(0.0, 2.0).unwrap()).is_err());
        let bad_b = CoefficientField::constant(FieldKind::Damping, -2.0, Interval::new(-5.0, -1.0).unwrap()).unwrap();
        let s = trivial_spec();
        let make = |b: CoefficientField| {
            PlantSpec::hyperbolic(
                1.0,
                s.a1().clone(),
                s.a2().clone(),
                s.phi().clone(),
                b,
                s.disturbance().clone(),
                BoundaryCondition::Dirichlet,
            )
        };
        assert!(make(bad_b.clone()).is_err());
        assert!(PlantSpec::hyperbolic_any_damping(
            1.0,
            s.a1().clone(),
            s.a2().clone(),
            s.phi().clone(),
            bad_b,
            s.disturbance().clone(),
            BoundaryCondition::Dirichlet,
        )
        .is_ok());
        let wide = Interval::new(-1.0, 1.0).unwrap();
        let x_dep = crate::expr::CatalogExpr::new(vec![crate::expr::Term::with(
            1.0,
            crate::expr::Factor::new(crate::expr::Func::Sin, 0.0, 1.0, 0.0, 0.0),
        )]);
        assert!(CoefficientField::catalog(FieldKind::Convection, x_dep, wide).is_err());
        assert!(PlantSpec::parabolic(
            0.0,
            s.a1().clone(),
            s.a2().clone(),
            s.phi().clone(),
            s.disturbance().clone(),
            BoundaryCondition::Dirichlet
        )
        .is_err());
    }

    #[test]
    fn reference_scenario_passes_bound_validation() {
        let spec = scenarios::reference_parabolic().unwrap();
        let report = validate_bounds(
            &spec,
            25,
            Interval::new(-2.0, 2.0).unwrap(),
            Interval::new(0.0, 10.0).unwrap(),
        )
        .unwrap();
        assert!(report.is_clean(), "{:?}", &report.violations[..report.violations.len().min(3)]);
    }

    #[test]
    fn constant_outside_interval_violates_every_sample() {
        let s = trivial_spec();
        let phi = CoefficientField::constant(FieldKind::Reaction, 6.0, Interval::new(-5.0, 5.0).unwrap()).unwrap();
        let spec = PlantSpec::parabolic(
            1.0,
            s.a1().clone(),
            s.a2().clone(),
            phi,
            s.disturbance().clone(),
            BoundaryCondition::Dirichlet,
        )
        .unwrap();
        let n = 7;
        let report = validate_bounds(&spec, n, Interval::new(-1.0, 1.0).unwrap(), Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(report.count_for(FieldKind::Reaction), n * n * n);
        assert_eq!(report.violations.len(), n * n * n);
        assert!(report.violations.iter().all(|v| v.value == 6.0));
    }

    #[test]
    fn degenerate_z_range_still_samples_x_and_t() {
        let spec = scenarios::reference_parabolic().unwrap();
        let z = Interval::point(0.0);
        let t = Interval::new(0.0, 1.0).unwrap();
        let a = validate_bounds(&spec, 5, z, t).unwrap();
        let b = validate_bounds(&spec, 5, z, t).unwrap();
        assert_eq!(a, b);
        // a1, a2: 5 x-samples each; phi: 1*5*5; f: 5*5
        assert_eq!(a.samples_checked, 5 + 5 + 25 + 25);
        assert!(validate_bounds(&spec, 1, z, t).is_err());
    }

    #[test]
    fn interval_samples_hit_endpoints() {
        let s = Interval::new(0.0, 1.0).unwrap().samples(11);
        assert_eq!(s.len(), 11);
        assert_eq!(s[0], 0.0);
        assert_eq!(s[10], 1.0);
        assert_eq!(Interval::point(3.0).samples(4), vec![3.0]);
        assert!(Interval::new(2.0, 1.0).is_err());
    }
}
