//! Test-only oracles, kept independent of the library's numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

use pde_ssc_core::plant::{BoundaryCondition, CoefficientField, FieldKind, Interval, PlantSpec};
use rand::rngs::StdRng;
use rand::Rng;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// `M <= tol` by Sylvester's criterion on `-M + tol I` (valid off the
/// measure-zero set where some minor vanishes).
pub fn nsd_by_minors(m: &[Vec<f64>], tol: f64) -> bool {
    let n = m.len();
    (1..=n).all(|k| {
        let sub: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| -m[i][j] + if i == j { tol } else { 0.0 }).collect())
            .collect();
        determinant(sub) > 0.0
    })
}

/// Composite Simpson rule with `panels` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `sin(pi s) * sum_m c_m sin(m pi s)` on each interval, `s` the local
/// coordinate in `[0, 1]`: value and slope vanish at every breakpoint, so
/// the function is C1 on the whole domain.
pub struct PiecewiseSine {
    pub breakpoints: Vec<f64>,
    pub coefs: Vec<Vec<f64>>,
}

impl PiecewiseSine {
    pub fn random(rng: &mut StdRng, breakpoints: Vec<f64>, modes: usize) -> Self {
        let coefs = (0..breakpoints.len() - 1)
            .map(|_| (0..modes).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        PiecewiseSine { breakpoints, coefs }
    }

    /// `(int z^2, int z'^2)` by Simpson on each interval.
    pub fn energies(&self, panels: usize) -> (f64, f64) {
        let mut value = 0.0;
        let mut slope = 0.0;
        for (j, c) in self.coefs.iter().enumerate() {
            let (a, b) = (self.breakpoints[j], self.breakpoints[j + 1]);
            let w = b - a;
            let z = |x: f64| {
                let s = (x - a) / w;
                let sum: f64 = c.iter().enumerate().map(|(m, cm)| cm * ((m + 1) as f64 * PI * s).sin()).sum();
                (PI * s).sin() * sum
            };
            let dz = |x: f64| {
                let s = (x - a) / w;
                let sum: f64 = c.iter().enumerate().map(|(m, cm)| cm * ((m + 1) as f64 * PI * s).sin()).sum();
                let dsum: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(m, cm)| cm * (m + 1) as f64 * PI * ((m + 1) as f64 * PI * s).cos())
                    .sum();
                (PI * (PI * s).cos() * sum + (PI * s).sin() * dsum) / w
            };
            value += simpson(|x| z(x).powi(2), a, b, panels);
            slope += simpson(|x| dz(x).powi(2), a, b, panels);
        }
        (value, slope)
    }
}

/// Random strictly increasing breakpoints on `[0, l]` with `n` intervals.
pub fn random_breakpoints(rng: &mut StdRng, l: f64, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut x = vec![0.0];
    let mut acc = 0.0;
    for wi in &w[..n - 1] {
        acc += wi / total * l;
        x.push(acc);
    }
    x.push(l);
    x
}

/// `V' = -delta V + f(t)` by RK4 with step `h`; returns samples `(t, V)`.
pub fn comparison_ode(v0: f64, delta: f64, f: impl Fn(f64) -> f64, t_end: f64, h: f64) -> Vec<(f64, f64)> {
    let n = (t_end / h).round() as usize;
    let rhs = |t: f64, v: f64| -delta * v + f(t);
    let mut v = v0;
    let mut out = vec![(0.0, v0)];
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = rhs(t, v);
        let k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
        let k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2);
        let k4 = rhs(t + h, v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((t + h, v));
    }
    out
}

fn constant(kind: FieldKind, v: f64) -> CoefficientField {
    CoefficientField::constant(kind, v, Interval::point(v)).unwrap()
}

/// `z_t = z_xx` on `[0, 1]`, Dirichlet.
pub fn heat() -> PlantSpec {
    PlantSpec::parabolic(
        1.0,
        constant(FieldKind::Diffusion, 1.0),
        constant(FieldKind::Convection, 0.0),
        constant(FieldKind::Reaction, 0.0),
        constant(FieldKind::Disturbance, 0.0),
        BoundaryCondition::Dirichlet,
    )
    .unwrap()
}

/// `z_tt = z_xx` on `[0, 1]`, Dirichlet.
pub fn wave() -> PlantSpec {
    PlantSpec::hyperbolic_any_damping(
        1.0,
        constant(FieldKind::Diffusion, 1.0),
        constant(FieldKind::Convection, 0.0),
        constant(FieldKind::Reaction, 0.0),
        constant(FieldKind::Damping, 0.0),
        constant(FieldKind::Disturbance, 0.0),
        BoundaryCondition::Dirichlet,
    )
    .unwrap()
}

/// Plant whose exact solution is `exp(-t) sin(pi x)` for the given
/// convection speed, with the forcing chosen to match.
pub fn manufactured(convection: f64) -> PlantSpec {
    let f = move |_z: f64, x: f64, t: f64| {
        let e = (-t).exp();
        (PI * PI - 1.0) * e * (PI * x).sin() - convection * PI * e * (PI * x).cos()
    };
    let bound = 1.0 + PI * PI + convection.abs() * PI;
    PlantSpec::parabolic(
        1.0,
        constant(FieldKind::Diffusion, 1.0),
        constant(FieldKind::Convection, convection),
        constant(FieldKind::Reaction, 0.0),
        CoefficientField::custom(FieldKind::Disturbance, f, Interval::symmetric(bound).unwrap()).unwrap(),
        BoundaryCondition::Dirichlet,
    )
    .unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Prints and returns the verdict line for an acceptance criterion.
pub fn report(id: &str, pass: bool, detail: &str) -> bool {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
