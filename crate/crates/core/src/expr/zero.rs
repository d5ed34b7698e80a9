//! Evaluation and zero testing.

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::poly::{Atom, Poly, Rational};
use super::ScalarExpr;
use crate::error::{Error, Result};

/// Outcome of a zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZeroVerdict {
    ProvenZero,
    ProvenNonzero,
    /// Every sampled value was below the tolerance.
    NumericallyZero,
}

impl ZeroVerdict {
    pub fn is_zero(self) -> bool {
        !matches!(self, ZeroVerdict::ProvenNonzero)
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, ZeroVerdict::NumericallyZero)
    }
}

/// Configuration for the sampling fallback of [`ScalarExpr::is_zero`].
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTest {
    pub samples: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            samples: 64,
            epsilon: 1e-9,
            seed: 0x5eed_1e55,
            parallel: true,
        }
    }
}

/// Sample coordinates are drawn from `k / 32` with `|k| <= 48`.
const GRID_DEN: i64 = 32;
const GRID_HALF_WIDTH: i64 = 48;
const ATTEMPTS_PER_SAMPLE: usize = 16;

impl ZeroTest {
    /// Rational sample points of the given dimension, deterministic in the seed.
    pub fn sample_points(&self, dim: usize, count: usize, salt: u64) -> Vec<Vec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let k = rng.gen_range(-GRID_HALF_WIDTH..=GRID_HALF_WIDTH);
                        super::rational_from_i64(k) / super::rational_from_i64(GRID_DEN)
                    })
                    .collect()
            })
            .collect()
    }
}

/// A value that is exact when the expression is rational in its variables.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Approx(x) => *x,
        }
    }
}

fn eval_poly_exact(p: &Poly, point: &[Rational]) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (a, e) in m.factors() {
            let v = match a {
                Atom::Var(i) => point.get(*i).ok_or(Error::PointLength {
                    expected: i + 1,
                    got: point.len(),
                })?,
                _ => unreachable!("exact evaluation requires a rational function"),
            };
            t *= num_traits::pow(v.clone(), *e as usize);
        }
        acc += t;
    }
    Ok(acc)
}

fn eval_atom_f64(a: &Atom, point: &[f64]) -> Result<f64> {
    match a {
        Atom::Var(i) => point.get(*i).copied().ok_or(Error::PointLength {
            expected: i + 1,
            got: point.len(),
        }),
        Atom::Pi => Ok(std::f64::consts::PI),
        Atom::Exp(u) => Ok(u.eval_f64(point)?.exp()),
        Atom::Ln(u) => {
            let v = u.eval_f64(point)?;
            if v <= 0.0 {
                Err(Error::LogDomain)
            } else {
                Ok(v.ln())
            }
        }
    }
}

fn eval_poly_f64(p: &Poly, point: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (m, c) in p.terms() {
        let mut t = c.to_f64().unwrap_or(f64::NAN);
        for (a, e) in m.factors() {
            t *= eval_atom_f64(a, point)?.powi(*e as i32);
        }
        acc += t;
    }
    Ok(acc)
}

impl ScalarExpr {
    /// Value at a rational point; exact unless pi, `exp` or `ln` occur.
    pub fn eval(&self, point: &[Rational]) -> Result<Value> {
        if let Some(m) = self.max_var() {
            if m >= point.len() {
                return Err(Error::PointLength {
                    expected: m + 1,
                    got: point.len(),
                });
            }
        }
        let exact = self.0.num.atoms().chain(self.0.den.iter().flat_map(|(f, _)| f.atoms()))
            .all(|a| matches!(a, Atom::Var(_)));
        if exact {
            let mut den = Rational::from_integer(1.into());
            for (f, k) in &self.0.den {
                let v = eval_poly_exact(f, point)?;
                if v.is_zero() {
                    return Err(Error::Pole);
                }
                den *= num_traits::pow(v, *k as usize);
            }
            return Ok(Value::Exact(eval_poly_exact(&self.0.num, point)? / den));
        }
        let p: Vec<f64> = point.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        self.eval_f64(&p).map(Value::Approx)
    }

    /// Floating-point value; reports poles and logarithm domain errors.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        let mut den = 1.0;
        for (f, k) in &self.0.den {
            let v = eval_poly_f64(f, point)?;
            if v.abs() < 1e-12 || !v.is_finite() {
                return Err(Error::Pole);
            }
            den *= v.powi(*k as i32);
        }
        let v = eval_poly_f64(&self.0.num, point)? / den;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Pole)
        }
    }

    /// Decides whether the expression vanishes identically.
    ///
    /// Exact on rational functions of coordinates and pi; otherwise samples
    /// `zt.samples` points and compares against `zt.epsilon`.
    pub fn is_zero(&self, zt: &ZeroTest) -> Result<ZeroVerdict> {
        if self.is_structural_zero() {
            return Ok(ZeroVerdict::ProvenZero);
        }
        if self.0.num.is_algebraic_free() {
            return Ok(ZeroVerdict::ProvenNonzero);
        }
        let dim = self.max_var().map_or(0, |m| m + 1);
        let attempts = zt.samples * ATTEMPTS_PER_SAMPLE;
        let points: Vec<Vec<f64>> = zt
            .sample_points(dim, attempts, 0)
            .into_iter()
            .map(|p| p.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        // evaluate in chunks so the parallel and sequential paths see the same
        // first `samples` valid points
        let mut values = Vec::with_capacity(zt.samples);
        for chunk in points.chunks(zt.samples.max(1)) {
            let evals: Vec<Option<f64>> = if zt.parallel {
                chunk.par_iter().map(|p| self.eval_f64(p).ok()).collect()
            } else {
                chunk.iter().map(|p| self.eval_f64(p).ok()).collect()
            };
            for v in evals.into_iter().flatten() {
                if values.len() < zt.samples {
                    values.push(v);
                }
            }
            if values.len() >= zt.samples {
                break;
            }
        }
        if values.len() < zt.samples {
            return Err(Error::Inconclusive {
                valid: values.len(),
                required: zt.samples,
            });
        }
        if values.iter().all(|v| v.abs() < zt.epsilon) {
            Ok(ZeroVerdict::NumericallyZero)
        } else {
            Ok(ZeroVerdict::ProvenNonzero)
        }
    }
}
