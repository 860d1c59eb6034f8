//! Small square matrices of rational expressions with exact inversion.

use super::ratexpr::{RationalExpr, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprMatrix {
    n: usize,
    nvars: usize,
    data: Vec<RationalExpr>,
}

impl ExprMatrix {
    pub fn zeros(n: usize, nvars: usize) -> Self {
        ExprMatrix {
            n,
            nvars,
            data: vec![RationalExpr::zero(nvars); n * n],
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, nvars);
        for i in 0..n {
            m.set(i, i, RationalExpr::one(nvars));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RationalExpr>>) -> Self {
        let n = rows.len();
        assert!(n > 0 && rows.iter().all(|r| r.len() == n), "square matrix required");
        let nvars = rows[0][0].nvars();
        ExprMatrix {
            n,
            nvars,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalExpr {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RationalExpr) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!(self.n, other.n);
        let mut out = ExprMatrix::zeros(self.n, self.nvars);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = RationalExpr::zero(self.nvars);
                for k in 0..self.n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn neg(&self) -> ExprMatrix {
        ExprMatrix {
            n: self.n,
            nvars: self.nvars,
            data: self.data.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn transpose(&self) -> ExprMatrix {
        let mut out = ExprMatrix::zeros(self.n, self.nvars);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Exact inverse by Gauss–Jordan elimination; fails with
    /// [`ScalarError::SingularMatrix`] when the determinant vanishes
    /// identically.
    pub fn invert(&self) -> Result<ExprMatrix, ScalarError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = ExprMatrix::identity(n, self.nvars);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(ScalarError::SingularMatrix)?;
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot_row * n + j);
                    inv.data.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot = a.get(col, col).clone();
            let pivot_inv = pivot.recip()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).mul(&pivot_inv));
                inv.set(col, j, inv.get(col, j).mul(&pivot_inv));
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let na = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, na);
                    let ni = inv.get(r, j).sub(&factor.mul(inv.get(col, j)));
                    inv.set(r, j, ni);
                }
            }
        }
        Ok(inv)
    }
}
