use std::fmt;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 5;
const MAX_SWEEPS: usize = 100;

/// Small dense symmetric matrix (`n <= 5`). Writes through [`set`](Self::set)
/// mirror across the diagonal, so symmetry holds by construction.
#[derive(Clone, Copy, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: [[f64; MAX_DIM]; MAX_DIM],
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} outside 1..={MAX_DIM}");
        SymMatrix {
            n,
            a: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.a[i][i] = v;
        }
        m
    }

    /// Builds from the upper triangle of `rows`; the lower triangle is ignored.
    pub fn from_upper(rows: &[&[f64]]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            for j in i..rows.len() {
                m.set(i, j, row[j]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        self.a[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.a[i][j] = v;
        self.a[j][i] = v;
    }

    /// `(1 - w) * self + w * other`.
    pub fn lerp(&self, other: &SymMatrix, w: f64) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] = (1.0 - w) * self.a[i][j] + w * other.a[i][j];
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.a[i][j] * self.a[i][j];
            }
        }
        s.sqrt()
    }

    fn off_diagonal_max(a: &[[f64; MAX_DIM]; MAX_DIM], n: usize) -> f64 {
        let mut m: f64 = 0.0;
        for (i, row) in a.iter().enumerate().take(n) {
            for v in &row[i + 1..n] {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Eigenvalues in ascending order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut a = self.a;
        // 1e-12 absolute for O(1) entries, relative beyond that
        let tol = 1e-12 * self.frobenius_norm().max(1.0);
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if Self::off_diagonal_max(&a, n) < tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        if !converged && Self::off_diagonal_max(&a, n) >= tol {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("n >= 1"))
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.n).map(|i| &self.a[i][..self.n]).collect();
        f.debug_struct("SymMatrix").field("n", &self.n).field("rows", &rows).finish()
    }
}

/// Result of a semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemidefiniteVerdict {
    pub negative_semidefinite: bool,
    pub max_eigenvalue: f64,
}

/// `M <= 0` up to `tol`: true iff the largest eigenvalue is at most `tol`.
pub fn is_negative_semidefinite(m: &SymMatrix, tol: f64) -> Result<SemidefiniteVerdict> {
    let max_eigenvalue = m.max_eigenvalue()?;
    Ok(SemidefiniteVerdict {
        negative_semidefinite: max_eigenvalue <= tol,
        max_eigenvalue,
    })
}
