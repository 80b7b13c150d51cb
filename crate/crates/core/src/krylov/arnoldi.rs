//! Arnoldi process with an optional sliding orthogonalization window.
//!
//! Basis vectors are indexed from 1 as `v_1, v_2, …`. With window `m`, the
//! new vector `A v_k` is orthogonalized against `v_i` for
//! `i = max(1, k − m), …, k`, so the Hessenberg matrix has upper
//! semi-bandwidth `m`; `m = 1` is the Lanczos three-term recurrence and a
//! window of at least `n` is full Arnoldi.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, scale};
use crate::operator::LinearOperator;
use crate::ring::Ring;
use crate::scalar::Real;

/// How many previous basis vectors each new vector is orthogonalized against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Full,
    Limited(usize),
}

impl Window {
    /// First index `m_k` orthogonalized against at step `k` (1-based).
    pub fn first_index(self, k: usize) -> usize {
        match self {
            Window::Full => 1,
            Window::Limited(m) => k.saturating_sub(m).max(1),
        }
    }

    pub(crate) fn ring<E>(self, extra: usize) -> Ring<E> {
        match self {
            Window::Full => Ring::unbounded(),
            Window::Limited(m) => Ring::bounded(m + extra),
        }
    }
}

/// Column `k` of the Hessenberg matrix produced by one Arnoldi step.
#[derive(Clone, Debug)]
pub struct ArnoldiColumn<T> {
    /// Step index `k` (1-based).
    pub k: usize,
    /// Index of the first stored entry, `m_k`.
    pub first: usize,
    /// `t_{i,k}` for `i = first, …, k`.
    pub entries: Vec<T>,
    /// `t_{k+1,k} ≥ 0`.
    pub subdiag: T,
    /// Set when `t_{k+1,k} ≤ ε_mach · ‖A v_k‖`: the solution lies in the current subspace.
    pub happy_breakdown: bool,
    /// `A v_k` before orthogonalization.
    pub av: Vec<T>,
}

impl<T: Real> ArnoldiColumn<T> {
    /// `t_{i,k}`, zero outside the window.
    pub fn entry(&self, i: usize) -> T {
        if i >= self.first && i <= self.k {
            self.entries[i - self.first]
        } else if i == self.k + 1 {
            self.subdiag
        } else {
            T::zero()
        }
    }
}

/// Sliding window of orthonormal basis vectors keyed by absolute index.
#[derive(Clone, Debug)]
pub struct ArnoldiBasis<T> {
    window: Window,
    /// `v_{k−m} … v_{k+1}` when windowed, the full history otherwise.
    store: Ring<Vec<T>>,
    beta: T,
    exhausted: bool,
}

impl<T: Real> ArnoldiBasis<T> {
    /// Starts the process from `v_1 = r0 / ‖r0‖`.
    pub fn new(r0: &[T], window: Window) -> Result<Self> {
        if let Window::Limited(0) = window {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        let beta = norm(r0);
        if beta == T::zero() {
            return Err(Error::InvalidArgument("zero starting vector".into()));
        }
        let mut v1 = r0.to_vec();
        scale(T::one() / beta, &mut v1);
        let mut store = window.ring(1);
        store.push(v1);
        Ok(Self {
            window,
            store,
            beta,
            exhausted: false,
        })
    }

    /// `β = ‖r₀‖`
    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Number of basis vectors generated so far.
    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    /// `true` after a happy breakdown.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// `v_i` if still stored.
    pub fn vector(&self, i: usize) -> Option<&[T]> {
        self.store.get(i).map(Vec::as_slice)
    }

    /// Performs step `k = len()`: orthogonalizes `A v_k` and appends `v_{k+1}`.
    ///
    /// On a happy breakdown `v_{k+1}` is not appended and further steps are refused.
    pub fn step(&mut self, op: &dyn LinearOperator<T>) -> Result<ArnoldiColumn<T>> {
        if self.exhausted {
            return Err(Error::InvalidArgument("Arnoldi basis exhausted".into()));
        }
        let k = self.len();
        let first = self.window.first_index(k);
        let vk = self.vector(k).expect("current basis vector stored");
        let av = op.apply(vk);
        let mut w = av.clone();
        let mut entries = Vec::with_capacity(k - first + 1);
        for i in first..=k {
            let vi = self.vector(i).expect("window vector stored");
            let t = dot(vi, &w);
            axpy(-t, vi, &mut w);
            entries.push(t);
        }
        let subdiag = norm(&w);
        let happy = subdiag <= T::epsilon() * norm(&av);
        if happy {
            self.exhausted = true;
        } else {
            scale(T::one() / subdiag, &mut w);
            self.store.push(w);
        }
        Ok(ArnoldiColumn {
            k,
            first,
            entries,
            subdiag,
            happy_breakdown: happy,
            av,
        })
    }
}

/// One Arnoldi step on `basis`; see [`ArnoldiBasis::step`].
pub fn arnoldi_step<T: Real>(
    op: &dyn LinearOperator<T>,
    basis: &mut ArnoldiBasis<T>,
) -> Result<ArnoldiColumn<T>> {
    basis.step(op)
}
