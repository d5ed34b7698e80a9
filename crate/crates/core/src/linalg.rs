//! Small dense matrices over scalar expressions.

use crate::error::{Error, Result};
use crate::expr::{ScalarExpr, ZeroTest};

#[derive(Clone, Debug, PartialEq)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ScalarExpr>,
}

impl ExprMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExprMatrix {
            rows,
            cols,
            data: vec![ScalarExpr::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ScalarExpr::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> ScalarExpr) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExprMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ScalarExpr) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &ExprMatrix) -> Result<ExprMatrix> {
        if self.cols != other.rows {
            return Err(Error::Degree(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .filter(|&k| !self.get(i, k).is_structural_zero())
                .map(|k| self.get(i, k) * other.get(k, j))
                .sum()
        }))
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> Result<ScalarExpr>) -> Result<ExprMatrix> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> ExprMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Determinant by cofactor expansion, skipping structurally zero entries.
    pub fn det(&self) -> Result<ScalarExpr> {
        if self.rows != self.cols {
            return Err(Error::Degree("determinant of a non-square matrix".into()));
        }
        let idx: Vec<usize> = (0..self.cols).collect();
        Ok(self.det_on(0, &idx))
    }

    fn det_on(&self, row: usize, cols: &[usize]) -> ScalarExpr {
        match cols.len() {
            0 => ScalarExpr::one(),
            1 => self.get(row, cols[0]).clone(),
            2 => {
                self.get(row, cols[0]) * self.get(row + 1, cols[1])
                    - self.get(row, cols[1]) * self.get(row + 1, cols[0])
            }
            _ => {
                let mut acc = ScalarExpr::zero();
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(row, c);
                    if a.is_structural_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = a * &self.det_on(row + 1, &rest);
                    acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }

    /// Inverse via the adjugate; fails when the determinant tests zero.
    pub fn inverse(&self, zt: &ZeroTest) -> Result<ExprMatrix> {
        let det = self.det()?;
        if det.is_zero(zt)?.is_zero() {
            return Err(Error::Singular);
        }
        let n = self.rows;
        let inv_det = det.recip()?;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                // (adj A)_{ij} = (-1)^{i+j} det A with row j and column i removed
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let m = self.minor(&rows, &cols).det()?;
                if m.is_structural_zero() {
                    continue;
                }
                let v = &m * &inv_det;
                out.set(i, j, if (i + j) % 2 == 0 { v } else { -v });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_symbolic_matrix() {
        let zt = ZeroTest::default();
        let x = ScalarExpr::var(0);
        let m = ExprMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => ScalarExpr::one() + x.clone(),
            (0, 1) => ScalarExpr::int(2),
            (1, 0) => x.clone(),
            _ => ScalarExpr::int(3),
        });
        let inv = m.inverse(&zt).unwrap();
        let p = m.mul(&inv).unwrap();
        assert_eq!(p, ExprMatrix::identity(2));
    }

    #[test]
    fn singular_is_rejected() {
        let x = ScalarExpr::var(0);
        let m = ExprMatrix::from_fn(2, 2, |_, _| x.clone());
        assert_eq!(m.inverse(&ZeroTest::default()), Err(Error::Singular));
    }

    #[test]
    fn det_of_triangular() {
        let m = ExprMatrix::from_fn(4, 4, |i, j| {
            if j >= i {
                ScalarExpr::int((i + j + 1) as i64)
            } else {
                ScalarExpr::zero()
            }
        });
        // diagonal 1, 3, 5, 7
        assert_eq!(m.det().unwrap(), ScalarExpr::int(105));
    }
}
