//! Dense square matrices over `f64` and `Complex64`, plus a cyclic complex
//! Jacobi eigensolver for Hermitian input.
//!
//! Element access through `Index<(usize, usize)>` is 0-based. The 1-based
//! conventions of the tensor-grid API live in [`crate::tensor`].

use std::fmt::Debug;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::{Num, Zero};

use crate::error::{Error, Result};

/// Convergence threshold used when a caller does not pass one.
pub const DEFAULT_EIG_TOL: f64 = 1e-12;

/// Maximum number of cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Entry type of a [`Matrix`].
pub trait Scalar:
    Copy + Num + std::ops::Neg<Output = Self> + Debug + Send + Sync + 'static
{
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// A dense `n x n` matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;

impl<T: Scalar> Debug for Matrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.n, self.n)?;
        for r in 0..self.n {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row-major data of length `n * n`.
    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_diag(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { diag[r] } else { T::zero() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)].conj())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_fn(self.n, |r, c| self[(r, c)] + other[(r, c)]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_fn(self.n, |r, c| self[(r, c)] - other[(r, c)]))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] = out.data[r * n + c] + a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok((0..self.n)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let q = other.n;
        Self::from_fn(self.n * q, |r, c| {
            self[(r / q, c / q)] * other[(r % q, c % q)]
        })
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for r in 0..self.n {
            for c in r..self.n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).modulus());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.fro_norm().max(1.0)
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n)
            .map(|r| self.row(r).iter().fold(T::zero(), |acc, &x| acc + x))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n];
        for r in 0..self.n {
            for (s, &x) in sums.iter_mut().zip(self.row(r)) {
                *s = *s + x;
            }
        }
        sums
    }

    pub fn total_sum(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.modulus()))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (&a, &b)| m.max((a - b).modulus())))
    }

    pub fn reductions(&self) -> Reductions<T> {
        Reductions {
            trace: self.trace(),
            row_sums: self.row_sums(),
            col_sums: self.col_sums(),
            total_sum: self.total_sum(),
            fro_norm: self.fro_norm(),
        }
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x.to_complex()).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.n + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.n + c]
    }
}

impl ComplexMatrix {
    /// Real parts, or `None` if some imaginary part exceeds `tol`.
    pub fn to_real(&self, tol: f64) -> Option<RealMatrix> {
        if self.data.iter().any(|z| z.im.abs() > tol) {
            return None;
        }
        Some(Matrix {
            n: self.n,
            data: self.data.iter().map(|z| z.re).collect(),
        })
    }

    /// `v v†`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }
}

/// Summary values of a matrix, accumulated in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct Reductions<T> {
    pub trace: T,
    pub row_sums: Vec<T>,
    pub col_sums: Vec<T>,
    pub total_sum: T,
    pub fro_norm: f64,
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `u† v`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `v† M v` computed directly from the entries.
pub fn quadratic_form<T: Scalar>(m: &Matrix<T>, v: &[Complex64]) -> Complex64 {
    let n = m.dim();
    let mut acc = Complex64::zero();
    for r in 0..n {
        let mut row = Complex64::zero();
        for c in 0..n {
            row += m[(r, c)].to_complex() * v[c];
        }
        acc += v[r].conj() * row;
    }
    acc
}

/// Eigenpairs of a Hermitian matrix, ascending by eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.dim();
        (0..n).map(|r| self.vectors[(r, k)]).collect()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.dim();
        ComplexMatrix::from_fn(n, |r, c| {
            (0..n)
                .map(|k| self.vectors[(r, k)] * self.values[k] * self.vectors[(c, k)].conj())
                .sum()
        })
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn off_diagonal_norm(h: &ComplexMatrix) -> f64 {
    let n = h.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += h[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot with a diagonal
/// unitary, then applies a real Givens rotation to the resulting real
/// symmetric 2x2 pivot block. Iterates until the off-diagonal Frobenius
/// mass drops to `tol * ||M||_F`.
pub fn jacobi_eigh<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<SpectralDecomposition> {
    eigh_with(m, tol, tol)
}

fn eigh_with<T: Scalar>(m: &Matrix<T>, herm_tol: f64, tol: f64) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let fro = m.fro_norm();
    let deviation = m.hermitian_deviation();
    if deviation > herm_tol * fro.max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut h = m.to_complex();
    // Symmetrize away the tolerated asymmetry.
    for r in 0..n {
        h[(r, r)] = Complex64::new(h[(r, r)].re, 0.0);
        for c in r + 1..n {
            let avg = (h[(r, c)] + h[(c, r)].conj()) * 0.5;
            h[(r, c)] = avg;
            h[(c, r)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let target = tol * fro;

    let mut converged = false;
    for _sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&h) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| h[(a, a)].re.total_cmp(&h[(b, b)].re));
    let values = order.iter().map(|&k| h[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition { values, vectors })
}

fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = h[(p, q)];
    let r = z.norm();
    if r == 0.0 {
        return;
    }
    let a = h[(p, p)].re;
    let d = h[(q, q)].re;
    // Pivot is already negligible relative to its diagonal.
    if r <= f64::EPSILON * 1e-3 * (a.abs() + d.abs()) {
        h[(p, q)] = Complex64::zero();
        h[(q, p)] = Complex64::zero();
        return;
    }
    let phase = (z / r).conj();
    let theta = 0.5 * (2.0 * r).atan2(d - a);
    let (s, c) = theta.sin_cos();
    let g00 = Complex64::new(c, 0.0);
    let g01 = Complex64::new(s, 0.0);
    let g10 = phase * -s;
    let g11 = phase * c;

    let n = h.dim();
    for k in 0..n {
        let hp = h[(k, p)];
        let hq = h[(k, q)];
        h[(k, p)] = hp * g00 + hq * g10;
        h[(k, q)] = hp * g01 + hq * g11;
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = vp * g00 + vq * g10;
        v[(k, q)] = vp * g01 + vq * g11;
    }
    for k in 0..n {
        let hp = h[(p, k)];
        let hq = h[(q, k)];
        h[(p, k)] = g00.conj() * hp + g10.conj() * hq;
        h[(q, k)] = g01.conj() * hp + g11.conj() * hq;
    }
    h[(p, q)] = Complex64::zero();
    h[(q, p)] = Complex64::zero();
    h[(p, p)] = Complex64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = Complex64::new(h[(q, q)].re, 0.0);
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eig: f64,
    pub min_vec: Vec<Complex64>,
}

/// PSD test: the minimum eigenvalue must be at least `-tol * max(1, ||M||_2)`.
pub fn is_psd<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<PsdCheck> {
    if m.dim() == 0 {
        return Err(Error::ShapeMismatch {
            expected: 1,
            found: 0,
        });
    }
    let eig = eigh_with(m, tol, DEFAULT_EIG_TOL)?;
    let min_eig = eig.values[0];
    let bound = tol * eig.spectral_radius().max(1.0);
    Ok(PsdCheck {
        psd: min_eig >= -bound,
        min_eig,
        min_vec: eig.vector(0),
    })
}
