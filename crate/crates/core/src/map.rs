//! Smooth maps `R^m -> R^n` given by expression tuples.

use std::fmt;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::equal::{Equality, EqualityError, EqualityOracle, MAX_CONSECUTIVE_FAILURES};
use crate::expr::Expr;
use crate::linalg::Matrix;
use crate::scalar::{EvalError, Numeric};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("component {component} uses x{index}, outside the domain R^{domain_dim}")]
    VariableOutOfRange {
        component: usize,
        index: usize,
        domain_dim: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("component {component} is undefined on the sampled domain")]
    Undefined { component: usize },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothMap {
    domain_dim: usize,
    components: Vec<Expr>,
}

impl SmoothMap {
    /// Validates variable indices and that every component evaluates
    /// somewhere in `[-1, 1]^domain_dim`.
    pub fn new(domain_dim: usize, components: Vec<Expr>) -> Result<Self, MapError> {
        for (component, e) in components.iter().enumerate() {
            let bound = e.var_bound();
            if bound > domain_dim {
                return Err(MapError::VariableOutOfRange {
                    component,
                    index: bound - 1,
                    domain_dim,
                });
            }
            if !e.is_polynomial() && !is_defined_somewhere(e, domain_dim) {
                return Err(MapError::Undefined { component });
            }
        }
        Ok(SmoothMap {
            domain_dim,
            components,
        })
    }

    pub fn identity(dim: usize) -> Self {
        SmoothMap {
            domain_dim: dim,
            components: (0..dim).map(Expr::Var).collect(),
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap, MapError> {
        if inner.codomain_dim() != self.domain_dim {
            return Err(MapError::DimensionMismatch {
                expected: self.domain_dim,
                found: inner.codomain_dim(),
            });
        }
        Ok(SmoothMap {
            domain_dim: inner.domain_dim,
            components: self
                .components
                .iter()
                .map(|c| c.substitute(&inner.components))
                .collect(),
        })
    }

    pub fn eval<T: Numeric>(&self, at: &[T]) -> Result<Vec<T>, MapError> {
        self.check_point(at.len())?;
        self.components
            .iter()
            .map(|c| c.eval(at).map_err(MapError::from))
            .collect()
    }

    /// Symbolic partial derivatives, `codomain_dim × domain_dim`.
    pub fn derivative(&self) -> Vec<Vec<Expr>> {
        self.components
            .iter()
            .map(|c| (0..self.domain_dim).map(|j| c.differentiate(j)).collect())
            .collect()
    }

    pub fn jacobian<T: Numeric>(&self, at: &[T]) -> Result<Matrix<T>, MapError> {
        self.check_point(at.len())?;
        let d = self.derivative();
        let mut rows = Vec::with_capacity(d.len());
        for row in d {
            rows.push(
                row.iter()
                    .map(|e| e.eval(at))
                    .collect::<Result<Vec<T>, _>>()?,
            );
        }
        Ok(Matrix::from_rows(rows, self.domain_dim))
    }

    /// Every component has total degree at most one.
    pub fn is_affine(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.to_poly().is_some_and(|p| p.degree() <= 1))
    }

    /// Linear part and offset `(A, c)` of an affine map `u ↦ A u + c`.
    pub fn affine_parts(&self) -> Option<(Matrix<BigRational>, Vec<BigRational>)> {
        let polys: Vec<_> = self
            .components
            .iter()
            .map(|c| c.to_poly().filter(|p| p.degree() <= 1))
            .collect::<Option<_>>()?;
        let linear = Matrix::from_fn(polys.len(), self.domain_dim, |i, j| {
            polys[i].coefficient(&crate::poly::Monomial::var(j))
        });
        let offset = polys
            .iter()
            .map(|p| p.coefficient(&crate::poly::Monomial::one()))
            .collect();
        Some((linear, offset))
    }

    pub fn equals(
        &self,
        other: &SmoothMap,
        oracle: &EqualityOracle,
    ) -> Result<Equality, EqualityError> {
        if self.domain_dim != other.domain_dim {
            return Ok(Equality {
                equal: false,
                mode: crate::scalar::Mode::Exact,
            });
        }
        oracle.equal_all(&self.components, &other.components, self.domain_dim)
    }

    fn check_point(&self, n: usize) -> Result<(), MapError> {
        if n != self.domain_dim {
            return Err(MapError::DimensionMismatch {
                expected: self.domain_dim,
                found: n,
            });
        }
        Ok(())
    }
}

fn is_defined_somewhere(e: &Expr, dim: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut p = vec![0.0f64; dim];
    for _ in 0..=MAX_CONSECUTIVE_FAILURES {
        for x in p.iter_mut() {
            *x = rng.random_range(-1.0..=1.0);
        }
        if e.eval(&p).is_ok() {
            return true;
        }
    }
    false
}

impl fmt::Display for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R^{} -> R^{} : (", self.domain_dim, self.codomain_dim())?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}
