//! Equality of expressions: exact on the polynomial fragment, seeded random
//! sampling otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::Expr;
use crate::scalar::Mode;

pub const DEFAULT_SAMPLES: usize = 32;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const MAX_CONSECUTIVE_FAILURES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EqualityError {
    #[error("expression uses x{index}, outside dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("evaluation failed at {failures} consecutive sample points")]
    Unevaluable { failures: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Equality {
    pub equal: bool,
    pub mode: Mode,
}

/// Configuration of the sampled comparison. Every verdict is reproducible
/// from the seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EqualityOracle {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for EqualityOracle {
    fn default() -> Self {
        EqualityOracle {
            seed: 0,
            samples: DEFAULT_SAMPLES,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl EqualityOracle {
    pub fn with_seed(seed: u64) -> Self {
        EqualityOracle {
            seed,
            ..Default::default()
        }
    }

    pub fn equal(&self, a: &Expr, b: &Expr, dim: usize) -> Result<Equality, EqualityError> {
        for e in [a, b] {
            let bound = e.var_bound();
            if bound > dim {
                return Err(EqualityError::VariableOutOfRange {
                    index: bound - 1,
                    dim,
                });
            }
        }
        if let (Some(p), Some(q)) = (a.to_poly(), b.to_poly()) {
            return Ok(Equality {
                equal: p == q,
                mode: Mode::Exact,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut accepted = 0;
        let mut failures = 0;
        let mut point = vec![0.0f64; dim];
        while accepted < self.samples {
            for x in point.iter_mut() {
                *x = rng.random_range(-1.0..=1.0);
            }
            match (a.eval(&point), b.eval(&point)) {
                (Ok(u), Ok(v)) => {
                    failures = 0;
                    accepted += 1;
                    if (u - v).abs() > self.tolerance {
                        return Ok(Equality {
                            equal: false,
                            mode: Mode::Sampled,
                        });
                    }
                }
                _ => {
                    failures += 1;
                    if failures > MAX_CONSECUTIVE_FAILURES {
                        return Err(EqualityError::Unevaluable { failures });
                    }
                }
            }
        }
        Ok(Equality {
            equal: true,
            mode: Mode::Sampled,
        })
    }

    /// Componentwise equality of two expression lists of the same length.
    pub fn equal_all(&self, a: &[Expr], b: &[Expr], dim: usize) -> Result<Equality, EqualityError> {
        let mut mode = Mode::Exact;
        if a.len() != b.len() {
            return Ok(Equality { equal: false, mode });
        }
        for (x, y) in a.iter().zip(b) {
            let eq = self.equal(x, y, dim)?;
            mode = mode.and(eq.mode);
            if !eq.equal {
                return Ok(Equality { equal: false, mode });
            }
        }
        Ok(Equality { equal: true, mode })
    }
}

/// [`EqualityOracle::equal`] with seed 0, 32 samples, tolerance 1e-9.
pub fn expr_equal(a: &Expr, b: &Expr, dim: usize) -> Result<Equality, EqualityError> {
    EqualityOracle::default().equal(a, b, dim)
}
