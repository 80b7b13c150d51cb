//! Symmetric linear operators, sampled structural checks and preconditioners.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::scalar::Real;

/// Relative tolerance for the sampled linearity check.
pub const LINEARITY_RTOL: f64 = 1e-12;
/// Relative tolerance for the sampled symmetry check.
pub const SYMMETRY_RTOL: f64 = 1e-10;

/// The action `v ↦ A v` of a square operator.
///
/// Implementations must be linear and, for everything in this crate,
/// symmetric. Operators are immutable once built and may be shared across
/// threads.
pub trait LinearOperator<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`. Both slices have length `dim()`.
    fn apply_into(&self, x: &[T], y: &mut [T]);

    fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl<T: Real, O: LinearOperator<T> + ?Sized> LinearOperator<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        (**self).apply_into(x, y)
    }
}

impl<T: Real, O: LinearOperator<T> + ?Sized> LinearOperator<T> for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        (**self).apply_into(x, y)
    }
}

impl<T: Real, O: LinearOperator<T> + ?Sized> LinearOperator<T> for Arc<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        (**self).apply_into(x, y)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityOperator {
    n: usize,
}

impl IdentityOperator {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl<T: Real> LinearOperator<T> for IdentityOperator {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(x);
    }
}

#[derive(Clone, Debug)]
pub struct DiagonalOperator<T> {
    diag: Vec<T>,
}

impl<T: Real> DiagonalOperator<T> {
    pub fn new(diag: Vec<T>) -> Self {
        Self { diag }
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }
}

impl<T: Real> LinearOperator<T> for DiagonalOperator<T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        for ((yi, &xi), &di) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = di * xi;
        }
    }
}

/// Operator defined by a closure, e.g. a Hessian-vector product.
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<T: Real, F> LinearOperator<T> for FnOperator<F>
where
    F: Fn(&[T], &mut [T]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        (self.f)(x, y)
    }
}

/// Wraps an operator and counts its applications.
pub struct CountingOperator<O> {
    inner: O,
    count: AtomicUsize,
}

impl<O> CountingOperator<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            count: AtomicUsize::new(0),
        }
    }

    pub fn count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<T: Real, O: LinearOperator<T>> LinearOperator<T> for CountingOperator<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.apply_into(x, y)
    }
}

/// Symmetric sparse matrix in compressed sparse row form with both triangles stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Assembles from 0-based `(row, col, value)` triplets. Duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0usize; triplets.len()];
        let mut values = vec![T::zero(); triplets.len()];
        for &(i, j, v) in triplets {
            col_idx[next[i]] = j;
            values[next[i]] = v;
            next[i] += 1;
        }
        // Sort each row by column and merge duplicates.
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for i in 0..n {
            let mut row: Vec<(usize, T)> = (counts[i]..counts[i + 1])
                .map(|p| (col_idx[p], values[p]))
                .collect();
            row.sort_by_key(|e| e.0);
            for (j, v) in row {
                if cols.len() > row_ptr[i] && *cols.last().unwrap() == j {
                    let last = vals.len() - 1;
                    vals[last] = vals[last] + v;
                } else {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx: cols,
            values: vals,
        })
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let row = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[row.clone()].binary_search(&j) {
            Ok(p) => self.values[row.start + p],
            Err(_) => T::zero(),
        }
    }
}

impl<T: Real> LinearOperator<T> for CsrMatrix<T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s = s + self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }
}

fn gaussian_vec<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<T> {
    (0..n)
        .map(|_| T::of(rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

/// Largest relative symmetry defect `|uᵀAv − vᵀAu| / (‖u‖‖Av‖ + ‖v‖‖Au‖)` over sampled pairs.
pub fn symmetry_defect<T: Real, O: LinearOperator<T> + ?Sized>(
    op: &O,
    samples: usize,
    seed: u64,
) -> T {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..samples {
        let u: Vec<T> = gaussian_vec(&mut rng, n);
        let v: Vec<T> = gaussian_vec(&mut rng, n);
        let au = op.apply(&u);
        let av = op.apply(&v);
        let scale = norm(&u) * norm(&av) + norm(&v) * norm(&au);
        if scale > T::zero() {
            worst = worst.max((dot(&u, &av) - dot(&v, &au)).abs() / scale);
        }
    }
    worst
}

/// Largest relative linearity defect `‖A(u+v) − Au − Av‖ / (‖Au‖ + ‖Av‖)` over sampled pairs.
pub fn linearity_defect<T: Real, O: LinearOperator<T> + ?Sized>(
    op: &O,
    samples: usize,
    seed: u64,
) -> T {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..samples {
        let u: Vec<T> = gaussian_vec(&mut rng, n);
        let v: Vec<T> = gaussian_vec(&mut rng, n);
        let w: Vec<T> = u.iter().zip(&v).map(|(&a, &b)| a + b).collect();
        let au = op.apply(&u);
        let av = op.apply(&v);
        let aw = op.apply(&w);
        let defect: Vec<T> = aw
            .iter()
            .zip(&au)
            .zip(&av)
            .map(|((&c, &a), &b)| c - a - b)
            .collect();
        let scale = norm(&au) + norm(&av);
        if scale > T::zero() {
            worst = worst.max(norm(&defect) / scale);
        }
    }
    worst
}

/// Runs both sampled checks at the library tolerances.
pub fn check_symmetric_operator<T: Real, O: LinearOperator<T> + ?Sized>(
    op: &O,
    samples: usize,
    seed: u64,
) -> Result<()> {
    let lin = linearity_defect(op, samples, seed);
    if lin > T::of(LINEARITY_RTOL) {
        return Err(Error::NotLinear {
            defect: lin.as_f64(),
        });
    }
    let sym = symmetry_defect(op, samples, seed.wrapping_add(1));
    if sym > T::of(SYMMETRY_RTOL) {
        return Err(Error::NotSymmetric {
            defect: sym.as_f64(),
        });
    }
    Ok(())
}

/// The preconditioner / initial inverse-Hessian approximation `H₀`.
#[derive(Clone)]
pub struct Preconditioner<T: Real> {
    op: Option<Arc<dyn LinearOperator<T>>>,
}

impl<T: Real> Default for Preconditioner<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> std::fmt::Debug for Preconditioner<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.op {
            None => f.write_str("Preconditioner(identity)"),
            Some(op) => write!(f, "Preconditioner(dim = {})", op.dim()),
        }
    }
}

impl<T: Real> Preconditioner<T> {
    pub fn identity() -> Self {
        Self { op: None }
    }

    pub fn new(op: impl LinearOperator<T> + 'static) -> Self {
        Self {
            op: Some(Arc::new(op)),
        }
    }

    pub fn from_arc(op: Arc<dyn LinearOperator<T>>) -> Self {
        Self { op: Some(op) }
    }

    pub fn is_identity(&self) -> bool {
        self.op.is_none()
    }

    pub fn apply_into(&self, x: &[T], y: &mut [T]) {
        match &self.op {
            None => y.copy_from_slice(x),
            Some(op) => op.apply_into(x, y),
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); x.len()];
        self.apply_into(x, &mut y);
        y
    }

    /// `xᵀ H₀ x`
    pub fn inner(&self, x: &[T]) -> T {
        match &self.op {
            None => dot(x, x),
            Some(op) => dot(x, &op.apply(x)),
        }
    }

    /// Sampled symmetry and positive-definiteness check.
    pub fn check(&self, n: usize, samples: usize, seed: u64) -> Result<()> {
        let Some(op) = &self.op else { return Ok(()) };
        let sym = symmetry_defect(op.as_ref(), samples, seed);
        if sym > T::of(SYMMETRY_RTOL) {
            return Err(Error::NotSymmetric {
                defect: sym.as_f64(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7));
        for _ in 0..samples {
            let v: Vec<T> = gaussian_vec(&mut rng, n);
            if dot(&v, &op.apply(&v)) <= T::zero() {
                return Err(Error::NotPositiveDefinite);
            }
        }
        Ok(())
    }
}
