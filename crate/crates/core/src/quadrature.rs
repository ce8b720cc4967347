//! Quadrature rules shared by the analysis code.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Composite trapezoidal rule for samples on a uniform grid.
pub fn trapezoid_uniform(values: &[f64], spacing: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            spacing * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Composite trapezoidal rule for samples at arbitrary abscissae.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Running trapezoidal integral, starting at 0.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    if !xs.is_empty() {
        out.push(0.0);
    }
    for (x, y) in xs.windows(2).zip(ys.windows(2)) {
        acc += 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
        out.push(acc);
    }
    out
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub(crate) fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Integrates `f` over `[lo, hi]` with panels graded geometrically away from
/// `center`: the finest panels have width `scale / 8`, doubling outward.
/// Suited to integrands concentrated in a layer of width `scale` around
/// `center`, however thin.
pub fn graded_integral<F: FnMut(f64) -> f64>(mut f: F, lo: f64, center: f64, hi: f64, scale: f64) -> f64 {
    let rule = gl20();
    let mut total = 0.0;
    for (len, sign) in [(center - lo, -1.0), (hi - center, 1.0)] {
        if len <= 0.0 {
            continue;
        }
        let mut a = 0.0;
        let mut w = (scale / 8.0).min(len);
        while a < len {
            let b = (a + w).min(len);
            total += rule.integrate(|s| f(center + sign * s), a, b);
            a = b;
            w *= 2.0;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        // degree 15 is exact for 8 points
        let v = rule.integrate(|x| x.powi(14) + x.powi(15), 0.0, 1.0);
        assert!((v - (1.0 / 15.0 + 1.0 / 16.0)).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_rules_agree() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&xs, &ys) - 2.5).abs() < 1e-14);
        assert!((trapezoid_uniform(&ys, 0.1) - 2.5).abs() < 1e-14);
        let c = cumulative_trapezoid(&xs, &ys);
        assert_eq!(c[0], 0.0);
        assert!((c[10] - 2.5).abs() < 1e-14);
        assert_eq!(trapezoid_uniform(&[4.0], 1.0), 0.0);
    }

    #[test]
    fn graded_rule_resolves_thin_layers() {
        // Gaussian of width 1e-6 inside [-1, 1]
        let w = 1e-6;
        let v = graded_integral(|x| (-(x / w).powi(2)).exp(), -1.0, 0.0, 1.0, w);
        assert!((v - w * PI.sqrt()).abs() < 1e-12 * w.max(1e-18) * 1e6);
        let v = graded_integral(|x| x.cos(), 0.0, 0.3, 1.0, 0.5);
        assert!((v - 1f64.sin()).abs() < 1e-14);
    }
}
