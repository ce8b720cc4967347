use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_parabolic, check_hyperbolic, GammaInputs, HyperbolicLmiParams, LmiCertificate, ParabolicLmiParams, Tuning,
};
use crate::error::{Error, Result};
use crate::plant::{Interval, PlantBounds};

/// Plant data a certificate search runs against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SearchProblem {
    Parabolic {
        spacing: f64,
        a1_lower: f64,
        phi_upper: f64,
        a2: Interval,
    },
    Hyperbolic {
        spacing: f64,
        a1_lower: f64,
        a2: Interval,
        phi: Interval,
        b: Interval,
    },
}

impl SearchProblem {
    pub fn parabolic(bounds: &PlantBounds, spacing: f64) -> Self {
        SearchProblem::Parabolic {
            spacing,
            a1_lower: bounds.a1.lo,
            phi_upper: bounds.phi.hi,
            a2: bounds.a2,
        }
    }

    pub fn hyperbolic(bounds: &PlantBounds, spacing: f64) -> Result<Self> {
        let b = bounds
            .b
            .ok_or_else(|| Error::arg("hyperbolic certificate search needs damping bounds"))?;
        Ok(SearchProblem::Hyperbolic {
            spacing,
            a1_lower: bounds.a1.lo,
            a2: bounds.a2,
            phi: bounds.phi,
            b,
        })
    }

    fn certificate(&self, tuning: Tuning, p: f64, tol: f64) -> Result<LmiCertificate> {
        match *self {
            SearchProblem::Parabolic {
                spacing,
                a1_lower,
                phi_upper,
                a2,
            } => check_parabolic(
                &ParabolicLmiParams {
                    tuning,
                    spacing,
                    a1_lower,
                    phi_upper,
                    a2,
                },
                tol,
            ),
            SearchProblem::Hyperbolic {
                spacing,
                a1_lower,
                a2,
                phi,
                b,
            } => check_hyperbolic(
                &HyperbolicLmiParams {
                    tuning,
                    p,
                    spacing,
                    a1_lower,
                    a2,
                    phi,
                    b,
                },
                tol,
            ),
        }
    }
}

/// Candidate values per tuning parameter. `p` is ignored for parabolic problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub gain: Vec<f64>,
    pub young_weight: Vec<f64>,
    pub decay_rate: Vec<f64>,
    pub beta_disturbance: Vec<f64>,
    pub beta_shape: Vec<f64>,
    #[serde(default)]
    pub p: Vec<f64>,
}

/// `n` points from `lo` to `hi`, evenly spaced in log scale.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (r * i as f64).exp() })
        .collect()
}

impl SearchGrid {
    /// A moderate default grid around the given gains.
    pub fn around_gains(gain: Vec<f64>) -> Self {
        SearchGrid {
            gain,
            young_weight: geometric(0.01, 1.99, 24),
            decay_rate: vec![0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 40.0],
            beta_disturbance: geometric(1e-3, 1e3, 13),
            beta_shape: geometric(1e-3, 1e3, 13),
            p: (1..10).flat_map(|i| [-0.05 * i as f64, 0.05 * i as f64]).collect(),
        }
    }

    fn p_values(&self, problem: &SearchProblem) -> Vec<f64> {
        match problem {
            SearchProblem::Parabolic { .. } => vec![0.0],
            SearchProblem::Hyperbolic { .. } => self.p.clone(),
        }
    }

    fn check_nonempty(&self, problem: &SearchProblem) -> Result<()> {
        let axes = [
            ("K", self.gain.len()),
            ("R", self.young_weight.len()),
            ("delta", self.decay_rate.len()),
            ("beta1", self.beta_disturbance.len()),
            ("beta2", self.beta_shape.len()),
            ("p", self.p_values(problem).len()),
        ];
        for (name, n) in axes {
            if n == 0 {
                return Err(Error::arg(format!("search grid for {name} is empty")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Feasible certificate with the smallest ultimate bound, or, if there
    /// is none, the point whose worst vertex eigenvalue is smallest.
    pub best: LmiCertificate,
    pub feasible_points: usize,
    pub evaluated: usize,
}

impl SearchReport {
    pub fn feasible(&self) -> bool {
        self.best.feasible
    }
}

struct Candidate {
    index: usize,
    cert: LmiCertificate,
}

/// Total order: feasible before infeasible; among feasible, smaller bound,
/// then larger decay rate; among infeasible, smaller worst eigenvalue;
/// finally lower scan index.
fn better(a: Candidate, b: Candidate) -> Candidate {
    use std::cmp::Ordering;
    let ord = match (a.cert.feasible, b.cert.feasible) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => a
            .cert
            .bound
            .total_cmp(&b.cert.bound)
            .then(b.cert.decay_rate().total_cmp(&a.cert.decay_rate())),
        (false, false) => a.cert.worst_eigenvalue().total_cmp(&b.cert.worst_eigenvalue()),
    }
    .then(a.index.cmp(&b.index));
    if ord == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Exhaustive scan of the grid. The scan is parallel, and the merge is a
/// min-reduction under a total order, so the result does not depend on
/// the thread count.
pub fn search_feasible(
    problem: &SearchProblem,
    grid: &SearchGrid,
    gamma_inputs: GammaInputs,
    tol: f64,
) -> Result<SearchReport> {
    grid.check_nonempty(problem)?;
    let ps = grid.p_values(problem);
    let dims = [
        grid.gain.len(),
        grid.young_weight.len(),
        grid.decay_rate.len(),
        grid.beta_disturbance.len(),
        grid.beta_shape.len(),
        ps.len(),
    ];
    let total: usize = dims.iter().product();

    let evaluate = |index: usize| -> Result<(Candidate, usize)> {
        let mut rem = index;
        let mut at = [0usize; 6];
        for (slot, &d) in at.iter_mut().zip(&dims).rev() {
            *slot = rem % d;
            rem /= d;
        }
        let tuning = Tuning {
            gain: grid.gain[at[0]],
            young_weight: grid.young_weight[at[1]],
            decay_rate: grid.decay_rate[at[2]],
            beta_disturbance: grid.beta_disturbance[at[3]],
            beta_shape: grid.beta_shape[at[4]],
        };
        let mut cert = problem.certificate(tuning, ps[at[5]], tol)?;
        let feasible = cert.feasible as usize;
        if cert.feasible {
            cert = cert.with_gamma(gamma_inputs)?;
        }
        Ok((Candidate { index, cert }, feasible))
    };

    let (best, feasible_points) = (0..total)
        .into_par_iter()
        .map(evaluate)
        .try_reduce_with(|(a, na), (b, nb)| Ok((better(a, b), na + nb)))
        .expect("grid is nonempty")?;
    log::debug!("certificate search: {feasible_points} of {total} points feasible");
    Ok(SearchReport {
        best: best.cert,
        feasible_points,
        evaluated: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmi::{build_psi_parabolic, DEFAULT_TOLERANCE};

    fn bounds() -> PlantBounds {
        PlantBounds {
            a1: Interval::new(0.5, 2.0).unwrap(),
            a2: Interval::new(-5.0, 5.0).unwrap(),
            phi: Interval::new(-5.0, 5.0).unwrap(),
            b: None,
            f_abs_max: 0.4,
        }
    }

    fn single(k: f64) -> SearchGrid {
        SearchGrid {
            gain: vec![k],
            young_weight: vec![1.0],
            decay_rate: vec![1.0],
            beta_disturbance: vec![1.0],
            beta_shape: vec![1.0],
            p: vec![],
        }
    }

    #[test]
    fn reference_point_is_found() {
        let problem = SearchProblem::parabolic(&bounds(), 0.1);
        let r = search_feasible(&problem, &single(100.0), GammaInputs::default(), DEFAULT_TOLERANCE).unwrap();
        assert!(r.feasible());
        assert_eq!(r.evaluated, 1);
        assert_eq!(r.best.tuning().gain, 100.0);
    }

    #[test]
    fn zero_gain_grid_is_infeasible() {
        let problem = SearchProblem::parabolic(&bounds(), 0.1);
        let mut g = SearchGrid::around_gains(vec![0.0]);
        g.young_weight.truncate(4);
        let r = search_feasible(&problem, &g, GammaInputs::default(), DEFAULT_TOLERANCE).unwrap();
        assert!(!r.feasible());
        assert_eq!(r.feasible_points, 0);
        assert!(r.best.worst_eigenvalue() > 0.0);
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let problem = SearchProblem::parabolic(&bounds(), 0.1);
        let g = SearchGrid::around_gains(vec![50.0, 100.0, 200.0]);
        let inputs = GammaInputs {
            f_sq_sup: 0.16,
            fx_sq_sup: 3.0,
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| search_feasible(&problem, &g, inputs, DEFAULT_TOLERANCE).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn finer_spacing_keeps_feasible_points_feasible() {
        let b = bounds();
        let g = SearchGrid::around_gains(vec![20.0, 100.0, 400.0]);
        for &gain in &g.gain {
            for &young_weight in &g.young_weight {
                for &decay_rate in &g.decay_rate {
                    for beta_shape in [0.1, 1.0] {
                        let tuning = Tuning {
                            gain,
                            young_weight,
                            decay_rate,
                            beta_disturbance: 1.0,
                            beta_shape,
                        };
                        let at = |spacing| ParabolicLmiParams {
                            tuning,
                            spacing,
                            a1_lower: b.a1.lo,
                            phi_upper: b.phi.hi,
                            a2: b.a2,
                        };
                        let (coarse, fine) = (at(0.2), at(0.02));
                        if check_parabolic(&coarse, DEFAULT_TOLERANCE).unwrap().feasible {
                            assert!(check_parabolic(&fine, DEFAULT_TOLERANCE).unwrap().feasible, "{tuning:?}");
                        }
                        let (mc, mf) = (build_psi_parabolic(&coarse, 0.0), build_psi_parabolic(&fine, 0.0));
                        assert!(mf.get(1, 1) <= mc.get(1, 1));
                        assert!(mf.get(3, 3) <= mc.get(3, 3));
                        assert!(mf.get(1, 3).abs() <= mc.get(1, 3).abs());
                    }
                }
            }
        }
    }

    #[test]
    fn empty_axis_is_rejected() {
        let problem = SearchProblem::parabolic(&bounds(), 0.1);
        let mut g = single(1.0);
        g.decay_rate.clear();
        assert!(search_feasible(&problem, &g, GammaInputs::default(), 1e-8).is_err());
        let mut b = bounds();
        b.b = Some(Interval::new(1.0, 3.0).unwrap());
        let h = SearchProblem::hyperbolic(&b, 0.1).unwrap();
        assert!(search_feasible(&h, &single(1.0), GammaInputs::default(), 1e-8).is_err());
        assert!(SearchProblem::hyperbolic(&bounds(), 0.1).is_err());
    }

    #[test]
    fn geometric_endpoints() {
        let g = geometric(0.01, 100.0, 5);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[4], 100.0);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }
}
