//! A small catalog of coefficient expressions.
//!
//! An expression is a sum of terms; each term is a coefficient times a
//! product of factors, and each factor applies `sin`, `cos` or the identity
//! to an affine combination `wx*x + wz*z + wt*t + c`. This covers the
//! smooth coefficient fields used by the reference scenarios while keeping
//! configuration files free of a general expression language.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    Sin,
    Cos,
    Id,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    #[serde(rename = "fn")]
    pub func: Func,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub z: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub c: f64,
}

impl Factor {
    pub fn new(func: Func, x: f64, z: f64, t: f64, c: f64) -> Self {
        Factor { func, x, z, t, c }
    }

    #[inline]
    fn arg(&self, z: f64, x: f64, t: f64) -> f64 {
        self.x * x + self.z * z + self.t * t + self.c
    }

    #[inline]
    fn eval(&self, z: f64, x: f64, t: f64) -> f64 {
        let a = self.arg(z, x, t);
        match self.func {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Id => a,
        }
    }

    #[inline]
    fn d_dx(&self, z: f64, x: f64, t: f64) -> f64 {
        let a = self.arg(z, x, t);
        let outer = match self.func {
            Func::Sin => a.cos(),
            Func::Cos => -a.sin(),
            Func::Id => 1.0,
        };
        outer * self.x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    #[serde(default)]
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn constant(coef: f64) -> Self {
        Term {
            coef,
            factors: Vec::new(),
        }
    }

    pub fn with(coef: f64, factor: Factor) -> Self {
        Term {
            coef,
            factors: vec![factor],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogExpr {
    pub terms: Vec<Term>,
}

impl CatalogExpr {
    pub fn constant(c: f64) -> Self {
        CatalogExpr {
            terms: vec![Term::constant(c)],
        }
    }

    pub fn new(terms: Vec<Term>) -> Self {
        CatalogExpr { terms }
    }

    pub fn eval(&self, z: f64, x: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                term.factors
                    .iter()
                    .fold(term.coef, |acc, f| acc * f.eval(z, x, t))
            })
            .sum()
    }

    /// Exact partial derivative in `x` (product rule over each term).
    pub fn d_dx(&self, z: f64, x: f64, t: f64) -> f64 {
        let mut total = 0.0;
        for term in &self.terms {
            for (i, fi) in term.factors.iter().enumerate() {
                if fi.x == 0.0 {
                    continue;
                }
                let rest: f64 = term
                    .factors
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, f)| f.eval(z, x, t))
                    .product();
                total += term.coef * fi.d_dx(z, x, t) * rest;
            }
        }
        total
    }

    pub fn depends_on_x(&self) -> bool {
        self.any_factor(|f| f.x != 0.0)
    }

    pub fn depends_on_z(&self) -> bool {
        self.any_factor(|f| f.z != 0.0)
    }

    pub fn depends_on_t(&self) -> bool {
        self.any_factor(|f| f.t != 0.0)
    }

    fn any_factor(&self, pred: impl Fn(&Factor) -> bool) -> bool {
        self.terms.iter().flat_map(|t| t.factors.iter()).any(pred)
    }
}
