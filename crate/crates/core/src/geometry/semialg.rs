//! Ranges cut out by Boolean combinations of polynomial sign conditions.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::error::{Error, Result};

/// Polynomial values at most this are treated as non-positive.
pub const SIGN_TOL: f64 = 1e-12;

/// `coeff * prod_i x_i^exps[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

/// Sparse multivariate polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    pub terms: Vec<Term>,
}

impl Polynomial {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                assert_eq!(t.exps.len(), x.len(), "dimension mismatch");
                t.exps
                    .iter()
                    .zip(x)
                    .fold(t.coeff, |acc, (&k, &xi)| acc * xi.powi(k as i32))
            })
            .sum()
    }

    fn dim(&self) -> Option<usize> {
        self.terms.first().map(|t| t.exps.len())
    }
}

/// Boolean formula over atoms `p_i(x) <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Atom(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn eval(&self, atoms: &[bool]) -> bool {
        match self {
            Formula::Atom(i) => atoms[*i],
            Formula::Not(f) => !f.eval(atoms),
            Formula::And(fs) => fs.iter().all(|f| f.eval(atoms)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(atoms)),
        }
    }

    fn max_atom(&self) -> Option<usize> {
        match self {
            Formula::Atom(i) => Some(*i),
            Formula::Not(f) => f.max_atom(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(Formula::max_atom).max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemialgebraicRange {
    pub polys: Vec<Polynomial>,
    pub formula: Formula,
}

impl SemialgebraicRange {
    pub fn new(polys: Vec<Polynomial>, formula: Formula) -> Result<Self> {
        let r = Self { polys, formula };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if dim == 0 {
            return Err(Error::Data("semialgebraic range has no dimension".into()));
        }
        for (i, p) in self.polys.iter().enumerate() {
            if p.terms.iter().any(|t| t.exps.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.terms.iter().map(|t| t.exps.len()).find(|&l| l != dim).unwrap_or(dim),
                });
            }
            if p.terms.iter().any(|t| !t.coeff.is_finite()) {
                return Err(Error::Data(format!("polynomial {i} has a non-finite coefficient")));
            }
        }
        if let Some(a) = self.formula.max_atom() {
            if a >= self.polys.len() {
                return Err(Error::Data(format!(
                    "formula references polynomial {a} of {}",
                    self.polys.len()
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.polys.iter().find_map(Polynomial::dim).unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.polys.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Evaluates every polynomial once, then the formula.
    pub fn contains(&self, x: &[f64]) -> bool {
        let atoms: Vec<bool> = self.polys.iter().map(|p| p.eval(x) <= SIGN_TOL).collect();
        self.formula.eval(&atoms)
    }
}

/// Dual shatter constant and VC-dimension bound of ranges in `R^d` built from
/// `s` polynomials of degree at most `delta`:
/// `c = (4 e delta s)^d` and `vc = 2 s log2(e s) C(delta + d, d)`.
pub fn semialg_dual_shatter_params(d: u32, delta: u32, s: u32) -> (f64, f64) {
    assert!(d >= 1 && delta >= 1 && s >= 1, "d, delta and s must be positive");
    let c = (4.0 * E * delta as f64 * s as f64).powi(d as i32);
    let binom = (1..=d).fold(1.0, |acc, i| acc * (delta + i) as f64 / i as f64);
    let vc = 2.0 * s as f64 * (E * s as f64).log2() * binom;
    (c, vc)
}
