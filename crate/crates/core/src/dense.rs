//! Row-major dense matrices and the handful of factorizations the solvers
//! and verification code need (partial-pivot LU, Cholesky, Householder QR).

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;
use crate::operator::LinearOperator;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &di) in d.iter().enumerate() {
            m[(i, i)] = di;
        }
        m
    }

    /// Builds from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.cols, "matvec input length");
        assert_eq!(y.len(), self.rows, "matvec output length");
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    /// `Aᵀ x`
    pub fn tmatvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows, "tmatvec input length");
        let mut y = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (yj, &aij) in y.iter_mut().zip(self.row(i)) {
                *yj = *yj + aij * xi;
            }
        }
        y
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut c = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == T::zero() {
                    continue;
                }
                let brow = other.row(k);
                let crow = &mut c.data[i * other.cols..(i + 1) * other.cols];
                for (cij, &bkj) in crow.iter_mut().zip(brow) {
                    *cij = *cij + aik * bkj;
                }
            }
        }
        c
    }

    /// `self + a · u vᵀ`
    pub fn rank1_update(&mut self, a: T, u: &[T], v: &[T]) {
        assert_eq!(u.len(), self.rows);
        assert_eq!(v.len(), self.cols);
        for (i, &ui) in u.iter().enumerate() {
            let f = a * ui;
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (rij, &vj) in row.iter_mut().zip(v) {
                *rij = *rij + f * vj;
            }
        }
    }

    pub fn sub_matrix(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    /// `max |a_ij − a_ji| / max(‖A‖_F, tiny)`
    pub fn symmetry_defect(&self) -> T {
        assert!(self.is_square());
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        let scale = self.frobenius_norm();
        if scale > T::zero() {
            worst / scale
        } else {
            worst
        }
    }

    /// Replaces `A` by `(A + Aᵀ)/2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        let half = T::of(0.5);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let m = half * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = m;
                self[(j, i)] = m;
            }
        }
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::new(self)
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        self.lu()?.solve(b)
    }

    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        Cholesky::new(self)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> LinearOperator<T> for DenseMatrix<T> {
    fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    fn apply_into(&self, x: &[T], y: &mut [T]) {
        self.matvec_into(x, y);
    }
}

#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    factors: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    fn new(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("LU of a non-square matrix".into()));
        }
        let n = a.rows;
        let mut f = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
        let tiny = T::epsilon() * scale * T::of(n.max(1) as f64);
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, f[i * n + k].abs()))
                    .fold(
                        (k, T::zero()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot <= tiny {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    f.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let akk = f[k * n + k];
            for i in (k + 1)..n {
                let l = f[i * n + k] / akk;
                f[i * n + k] = l;
                if l != T::zero() {
                    for j in (k + 1)..n {
                        f[i * n + j] = f[i * n + j] - l * f[k * n + j];
                    }
                }
            }
        }
        Ok(Self {
            n,
            factors: f,
            perm,
        })
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        check_dim(self.n, b.len())?;
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.factors[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s = s - self.factors[i * n + j] * x[j];
            }
            x[i] = s / self.factors[i * n + i];
        }
        Ok(x)
    }
}

/// Lower-triangular Cholesky factor `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    fn new(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument(
                "Cholesky of a non-square matrix".into(),
            ));
        }
        let n = a.rows;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if d <= T::zero() || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { n, l })
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        check_dim(self.n, b.len())?;
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s = s - self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        Ok(x)
    }
}

/// Orthogonal factor `Q` of a Householder QR of a square matrix, with the
/// sign convention `diag(R) > 0` (so a Gaussian input yields a Haar-distributed `Q`).
pub fn orthogonal_factor<T: Real>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    assert!(a.is_square());
    let n = a.rows;
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut signs = vec![T::one(); n];
    for k in 0..n {
        let col: Vec<T> = (k..n).map(|i| r[(i, k)]).collect();
        let alpha = crate::linalg::norm(&col);
        let mut v = col;
        let s = if v[0] >= T::zero() {
            T::one()
        } else {
            -T::one()
        };
        v[0] = v[0] + s * alpha;
        let vn = crate::linalg::norm(&v);
        if vn > T::zero() {
            crate::linalg::scale(T::one() / vn, &mut v);
        }
        for j in k..n {
            let mut p = T::zero();
            for i in k..n {
                p = p + v[i - k] * r[(i, j)];
            }
            let two_p = p + p;
            for i in k..n {
                r[(i, j)] = r[(i, j)] - two_p * v[i - k];
            }
        }
        // R_kk = -s·alpha after the reflection.
        signs[k] = if r[(k, k)] >= T::zero() {
            T::one()
        } else {
            -T::one()
        };
        reflectors.push(v);
    }
    // Q = H_0 H_1 ... H_{n-1}, applied to the identity from the right-most reflector.
    let mut q = DenseMatrix::identity(n);
    for k in (0..n).rev() {
        let v = &reflectors[k];
        for j in 0..n {
            let mut p = T::zero();
            for i in k..n {
                p = p + v[i - k] * q[(i, j)];
            }
            let two_p = p + p;
            for i in k..n {
                q[(i, j)] = q[(i, j)] - two_p * v[i - k];
            }
        }
    }
    for j in 0..n {
        if signs[j] < T::zero() {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}
