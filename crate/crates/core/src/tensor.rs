//! The `p x q` grid indexing of `C^p ⊗ C^q` and the partial transpose.
//!
//! Grid coordinates and flattened indices are 1-based here: `(i, j)` with
//! `1 <= i <= p`, `1 <= j <= q` maps to `k = (i - 1) q + j`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorShape {
    p: usize,
    q: usize,
}

/// A 1-based grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridIndex {
    pub i: usize,
    pub j: usize,
}

impl GridIndex {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl fmt::Display for GridIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.p, self.q)
    }
}

impl TensorShape {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::IndexOutOfRange { index: 0, bound: 1 });
        }
        if q == 0 {
            return Err(Error::IndexOutOfRange { index: 0, bound: 1 });
        }
        Ok(Self { p, q })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.p * self.q
    }

    pub fn flatten(&self, idx: GridIndex) -> Result<usize> {
        if idx.i == 0 || idx.i > self.p {
            return Err(Error::IndexOutOfRange {
                index: idx.i,
                bound: self.p,
            });
        }
        if idx.j == 0 || idx.j > self.q {
            return Err(Error::IndexOutOfRange {
                index: idx.j,
                bound: self.q,
            });
        }
        Ok((idx.i - 1) * self.q + idx.j)
    }

    pub fn unflatten(&self, k: usize) -> Result<GridIndex> {
        if k == 0 || k > self.n() {
            return Err(Error::IndexOutOfRange {
                index: k,
                bound: self.n(),
            });
        }
        Ok(GridIndex {
            i: (k - 1) / self.q + 1,
            j: (k - 1) % self.q + 1,
        })
    }

    /// Whether positions `k` and `l` differ in both grid coordinates.
    pub fn is_entangled_position(&self, k: usize, l: usize) -> Result<bool> {
        let a = self.unflatten(k)?;
        let b = self.unflatten(l)?;
        Ok(a.i != b.i && a.j != b.j)
    }

    pub fn check<T>(&self, a: &Matrix<T>) -> Result<()>
    where
        T: Scalar,
    {
        if a.dim() != self.n() {
            return Err(Error::ShapeMismatch {
                expected: self.n(),
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// Copy of the `q x q` block in block row `u`, block column `v` (0-based).
    pub(crate) fn block<T: Scalar>(&self, a: &Matrix<T>, u: usize, v: usize) -> Matrix<T> {
        let q = self.q;
        Matrix::from_fn(q, |r, c| a[(u * q + r, v * q + c)])
    }

    /// The `q x q` blocks of `a` in row-major block order.
    pub fn blocks<T: Scalar>(&self, a: &Matrix<T>) -> Result<Vec<Matrix<T>>> {
        self.check(a)?;
        let mut out = Vec::with_capacity(self.p * self.p);
        for u in 0..self.p {
            for v in 0..self.p {
                out.push(self.block(a, u, v));
            }
        }
        Ok(out)
    }
}

/// The `(p, q)`-partial transpose: every `q x q` block transposed in place.
pub fn partial_transpose<T: Scalar>(a: &Matrix<T>, shape: TensorShape) -> Result<Matrix<T>> {
    shape.check(a)?;
    let q = shape.q();
    Ok(Matrix::from_fn(a.dim(), |r, c| {
        let (u, j) = (r / q, r % q);
        let (v, l) = (c / q, c % q);
        a[(u * q + l, v * q + j)]
    }))
}
