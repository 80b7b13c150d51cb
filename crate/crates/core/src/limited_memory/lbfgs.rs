//! LBFGS(m): two-loop recursion over a window of `(s, y)` pairs.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, norm};
use crate::operator::Preconditioner;
use crate::quadratic::QuadraticModel;
use crate::ring::Ring;
use crate::scalar::Real;
use crate::trace::{drive, Advance, SolveOptions, SolveStatus, SolveTrace, StepInfo, Stepper};

#[derive(Clone, Debug)]
struct Pair<T> {
    s: Vec<T>,
    y: Vec<T>,
    /// `1 / sᵀy`
    rho: T,
}

/// The `m` most recent `(s, y)` pairs and the base `H₀`.
///
/// Multiplications by vector entries are tallied so the per-iteration cost
/// can be checked: `4·len·n` per [`LbfgsMemory::apply`] and `n` per push.
#[derive(Debug)]
pub struct LbfgsMemory<T: Real> {
    m: usize,
    pairs: Ring<Pair<T>>,
    base: Preconditioner<T>,
    mults: AtomicU64,
}

impl<T: Real> Clone for LbfgsMemory<T> {
    fn clone(&self) -> Self {
        Self {
            m: self.m,
            pairs: self.pairs.clone(),
            base: self.base.clone(),
            mults: AtomicU64::new(self.mults.load(Ordering::Relaxed)),
        }
    }
}

impl<T: Real> LbfgsMemory<T> {
    pub fn new(m: usize, base: Preconditioner<T>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("memory must be at least 1".into()));
        }
        Ok(Self {
            m,
            pairs: Ring::bounded(m),
            base,
            mults: AtomicU64::new(0),
        })
    }

    pub fn memory(&self) -> usize {
        self.m
    }

    /// Number of pairs currently stored.
    pub fn len(&self) -> usize {
        self.pairs.retained()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total number of pairs ever accepted.
    pub fn pushes(&self) -> usize {
        self.pairs.len()
    }

    /// Vectors held: two per stored pair.
    pub fn stored_vectors(&self) -> usize {
        2 * self.len()
    }

    /// Vector multiplications performed so far, excluding the base.
    pub fn multiplications(&self) -> u64 {
        self.mults.load(Ordering::Relaxed)
    }

    pub fn reset_multiplications(&self) {
        self.mults.store(0, Ordering::Relaxed);
    }

    /// `(s_i, y_i)` from oldest to newest.
    pub fn pairs(&self) -> impl Iterator<Item = (&[T], &[T])> + '_ {
        self.pairs
            .iter()
            .map(|(_, p)| (p.s.as_slice(), p.y.as_slice()))
    }

    /// `H_k^m v` by the two-loop recursion.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let n = v.len() as u64;
        let mut q = v.to_vec();
        let mut alphas = Vec::with_capacity(self.len());
        for (_, p) in self.pairs.iter().rev() {
            let a = p.rho * dot(&p.s, &q);
            axpy(-a, &p.y, &mut q);
            alphas.push(a);
        }
        let mut r = self.base.apply(&q);
        for ((_, p), a) in self.pairs.iter().zip(alphas.into_iter().rev()) {
            let b = p.rho * dot(&p.y, &r);
            axpy(a - b, &p.s, &mut r);
        }
        self.mults
            .fetch_add(4 * self.len() as u64 * n, Ordering::Relaxed);
        r
    }

    /// Appends `(s, y)`, evicting the oldest pair when full.
    ///
    /// Rejects the pair when `|sᵀy| ≤ sqrt(eps)·‖s‖‖y‖`.
    pub fn push(&mut self, s: &[T], y: &[T]) -> Result<()> {
        check_dim(s.len(), y.len())?;
        if let Some((_, p)) = self.pairs.iter().next() {
            check_dim(p.s.len(), s.len())?;
        }
        let sty = dot(s, y);
        self.mults.fetch_add(s.len() as u64, Ordering::Relaxed);
        let threshold = T::curvature_eps() * norm(s) * norm(y);
        if !(sty.abs() > threshold) {
            return Err(Error::CurvatureBreakdown {
                value: sty.as_f64(),
                threshold: threshold.as_f64(),
            });
        }
        let rho = T::one() / sty;
        match self.pairs.recycle() {
            Some(p) => {
                p.s.copy_from_slice(s);
                p.y.copy_from_slice(y);
                p.rho = rho;
                self.pairs.commit_recycled();
            }
            None => self.pairs.push(Pair {
                s: s.to_vec(),
                y: y.to_vec(),
                rho,
            }),
        }
        Ok(())
    }
}

/// `lbfgs_apply` as a free function.
pub fn lbfgs_apply<T: Real>(mem: &LbfgsMemory<T>, v: &[T]) -> Vec<T> {
    mem.apply(v)
}

/// `lbfgs_push` as a free function.
pub fn lbfgs_push<T: Real>(mem: &mut LbfgsMemory<T>, s: &[T], y: &[T]) -> Result<()> {
    mem.push(s, y)
}

/// LBFGS(m) with exact line search on a quadratic.
pub struct Lbfgs<'m, 'a, T: Real> {
    model: &'m QuadraticModel<'a, T>,
    mem: LbfgsMemory<T>,
    x: Vec<T>,
    g: Vec<T>,
    d: Vec<T>,
    last_d: Option<Vec<T>>,
}

impl<'m, 'a, T: Real> Lbfgs<'m, 'a, T> {
    pub fn new(
        model: &'m QuadraticModel<'a, T>,
        x0: &[T],
        m: usize,
        base: Preconditioner<T>,
    ) -> Result<Self> {
        check_dim(model.dim(), x0.len())?;
        let mem = LbfgsMemory::new(m, base)?;
        let g = model.gradient(x0)?;
        let mut d = mem.apply(&g);
        d.iter_mut().for_each(|v| *v = -*v);
        Ok(Self {
            model,
            mem,
            x: x0.to_vec(),
            g,
            d,
            last_d: None,
        })
    }

    pub fn memory(&self) -> &LbfgsMemory<T> {
        &self.mem
    }

    /// `x`, `g` and the stored pairs.
    pub fn stored_vectors(&self) -> usize {
        2 + self.mem.stored_vectors()
    }

    /// Current direction `d_k = −H_k g_k`.
    pub fn direction(&self) -> &[T] {
        &self.d
    }
}

impl<T: Real> Stepper<T> for Lbfgs<'_, '_, T> {
    fn x(&self) -> &[T] {
        &self.x
    }

    fn gradient(&self) -> Vec<T> {
        self.g.clone()
    }

    fn residual_estimate(&self) -> T {
        norm(&self.g)
    }

    fn last_direction(&self) -> Option<&[T]> {
        self.last_d.as_deref()
    }

    fn advance(&mut self) -> Advance<T> {
        let ad = self.model.apply(&self.d);
        let curvature = dot(&self.d, &ad);
        if curvature <= T::zero() {
            return Advance::Stop(SolveStatus::NonpositiveCurvature);
        }
        let alpha = -dot(&self.g, &self.d) / curvature;
        let s: Vec<T> = self.d.iter().map(|&v| alpha * v).collect();
        let y: Vec<T> = ad.iter().map(|&v| alpha * v).collect();
        axpy(T::one(), &s, &mut self.x);
        axpy(T::one(), &y, &mut self.g);
        if self.mem.push(&s, &y).is_err() {
            return Advance::Stop(SolveStatus::Breakdown);
        }
        let mut next = self.mem.apply(&self.g);
        next.iter_mut().for_each(|v| *v = -*v);
        self.last_d = Some(std::mem::replace(&mut self.d, next));
        Advance::Step(StepInfo {
            alpha: Some(alpha),
            curvature: Some(curvature),
            ..StepInfo::default()
        })
    }
}

/// Solves `A x = b` by LBFGS(m) with exact line search.
pub fn lbfgs_solve<T: Real>(
    model: &QuadraticModel<'_, T>,
    x0: &[T],
    m: usize,
    base: Preconditioner<T>,
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, SolveTrace<T>)> {
    let mut solver = Lbfgs::new(model, x0, m, base)?;
    let trace = drive(&mut solver, model, opts);
    Ok((solver.x, trace))
}
