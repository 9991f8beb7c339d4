//! Exact construction history of a [`super::LogPoly`], evaluated on demand.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::intpoly::IntPoly;
use super::logc_serde;
use super::rootfind::real_roots;
use crate::error::{Error, Result};

#[derive(Debug)]
pub(crate) enum Node {
    /// `prod (x - r)` for nonpositive float roots.
    Roots(Vec<f64>),
    /// Dyadic rounding of `exp(logc)`; used when no exact history is known.
    Dyadic(Vec<f64>),
    Derivative(Arc<Shadow>, usize),
    Shift(Arc<Shadow>, i64),
    /// `times`-fold `z^a (d/dz)^b`, up to positive constants.
    Aab { of: Arc<Shadow>, a: usize, b: usize, times: usize },
    Hadamard(Arc<Shadow>, Arc<Shadow>),
    BoxTimes(Arc<Shadow>, Arc<Shadow>, usize),
    BoxPlus(Arc<Shadow>, Arc<Shadow>, usize),
    TPoly { n: usize, ell: usize, a: usize, b: usize },
}

#[derive(Debug)]
pub(crate) struct Shadow {
    pub node: Node,
    poly: OnceLock<std::result::Result<Arc<IntPoly>, Error>>,
    roots: OnceLock<std::result::Result<Arc<Vec<f64>>, Error>>,
}

impl Shadow {
    pub fn new(node: Node) -> Arc<Self> {
        Arc::new(Shadow { node, poly: OnceLock::new(), roots: OnceLock::new() })
    }

    pub fn derivative(of: &Arc<Shadow>, b: usize) -> Arc<Self> {
        match &of.node {
            Node::Derivative(inner, b0) => Shadow::new(Node::Derivative(inner.clone(), b0 + b)),
            _ => Shadow::new(Node::Derivative(of.clone(), b)),
        }
    }

    pub fn shift(of: &Arc<Shadow>, s: i64) -> Arc<Self> {
        if s == 0 {
            return of.clone();
        }
        match &of.node {
            Node::Shift(inner, s0) if s0 + s != 0 => Shadow::new(Node::Shift(inner.clone(), s0 + s)),
            Node::Shift(inner, _) => inner.clone(),
            _ => Shadow::new(Node::Shift(of.clone(), s)),
        }
    }

    pub fn aab(of: &Arc<Shadow>, a: usize, b: usize) -> Arc<Self> {
        match &of.node {
            Node::Aab { of: inner, a: a0, b: b0, times } if *a0 == a && *b0 == b => {
                Shadow::new(Node::Aab { of: inner.clone(), a, b, times: times + 1 })
            }
            _ => Shadow::new(Node::Aab { of: of.clone(), a, b, times: 1 }),
        }
    }

    /// The exact integer polynomial (computed once).
    pub fn poly(&self) -> Result<Arc<IntPoly>> {
        self.poly.get_or_init(|| self.compute().map(Arc::new)).clone()
    }

    fn compute(&self) -> Result<IntPoly> {
        Ok(match &self.node {
            Node::Roots(r) => IntPoly::from_roots(r)?,
            Node::Dyadic(l) => IntPoly::from_logc(l),
            Node::Derivative(p, b) => p.poly()?.derivative(*b)?,
            Node::Shift(p, s) => p.poly()?.shift(*s)?,
            Node::Aab { of, a, b, times } => {
                let mut q = (*of.poly()?).clone();
                for _ in 0..*times {
                    q = q.derivative(*b)?.shift(*a as i64)?;
                }
                q
            }
            Node::Hadamard(p, q) => p.poly()?.hadamard(&*q.poly()?),
            Node::BoxTimes(p, q, n) => p.poly()?.boxtimes(&*q.poly()?, *n),
            Node::BoxPlus(p, q, n) => p.poly()?.boxplus(&*q.poly()?, *n),
            Node::TPoly { n, ell, a, b } => IntPoly::t_poly(*n, *ell, *a, *b),
        })
    }

    /// Certified roots of the nonnegative-coefficient form, ascending (computed once).
    pub fn roots(&self) -> Result<Arc<Vec<f64>>> {
        self.roots
            .get_or_init(|| {
                let p = self.poly()?;
                real_roots(&p, &|x: f64| 1e-12 * (1.0 + x.abs())).map(Arc::new)
            })
            .clone()
    }

    pub fn to_recipe(&self) -> Recipe {
        let b = |s: &Arc<Shadow>| Box::new(s.to_recipe());
        match &self.node {
            Node::Roots(r) => Recipe::Roots { roots: r.clone() },
            Node::Dyadic(l) => Recipe::Dyadic { logc: l.clone() },
            Node::Derivative(p, k) => Recipe::Derivative { order: *k, of: b(p) },
            Node::Shift(p, s) => Recipe::Shift { by: *s, of: b(p) },
            Node::Aab { of, a, b: bb, times } => Recipe::Aab { a: *a, b: *bb, times: *times, of: b(of) },
            Node::Hadamard(p, q) => Recipe::Hadamard { left: b(p), right: b(q) },
            Node::BoxTimes(p, q, n) => Recipe::Boxtimes { n: *n, left: b(p), right: b(q) },
            Node::BoxPlus(p, q, n) => Recipe::Boxplus { n: *n, left: b(p), right: b(q) },
            Node::TPoly { n, ell, a, b: bb } => Recipe::TPoly { n: *n, ell: *ell, a: *a, b: *bb },
        }
    }

    pub fn from_recipe(r: &Recipe) -> Arc<Self> {
        let f = |r: &Recipe| Shadow::from_recipe(r);
        Shadow::new(match r {
            Recipe::Roots { roots } => Node::Roots(roots.clone()),
            Recipe::Dyadic { logc } => Node::Dyadic(logc.clone()),
            Recipe::Derivative { order, of } => Node::Derivative(f(of), *order),
            Recipe::Shift { by, of } => Node::Shift(f(of), *by),
            Recipe::Aab { a, b, times, of } => Node::Aab { of: f(of), a: *a, b: *b, times: *times },
            Recipe::Hadamard { left, right } => Node::Hadamard(f(left), f(right)),
            Recipe::Boxtimes { n, left, right } => Node::BoxTimes(f(left), f(right), *n),
            Recipe::Boxplus { n, left, right } => Node::BoxPlus(f(left), f(right), *n),
            Recipe::TPoly { n, ell, a, b } => Node::TPoly { n: *n, ell: *ell, a: *a, b: *b },
        })
    }
}

/// Serializable form of the exact construction history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Recipe {
    Roots { roots: Vec<f64> },
    Dyadic {
        #[serde(with = "logc_serde")]
        logc: Vec<f64>,
    },
    Derivative { order: usize, of: Box<Recipe> },
    Shift { by: i64, of: Box<Recipe> },
    Aab { a: usize, b: usize, times: usize, of: Box<Recipe> },
    Hadamard { left: Box<Recipe>, right: Box<Recipe> },
    Boxtimes { n: usize, left: Box<Recipe>, right: Box<Recipe> },
    Boxplus { n: usize, left: Box<Recipe>, right: Box<Recipe> },
    TPoly { n: usize, ell: usize, a: usize, b: usize },
}
