//! LSR1(m): `H = H₀ + Σ z_i z_iᵀ / δ_i` over the `m` most recent corrections,
//! with `z_i = s_i − H_i y_i` and `δ_i = y_iᵀz_i` so that each insertion
//! satisfies the secant equation `H y_i = s_i`.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, norm, sub};
use crate::operator::Preconditioner;
use crate::quadratic::QuadraticModel;
use crate::ring::Ring;
use crate::scalar::Real;
use crate::trace::{drive, Advance, SolveOptions, SolveStatus, SolveTrace, StepInfo, Stepper};

#[derive(Clone, Debug)]
struct Correction<T> {
    z: Vec<T>,
    /// `δ = yᵀz`
    delta: T,
}

/// Window of SR1 corrections `z_i = s_i − H_i y_i`, each formed at insertion.
///
/// Tallied costs: `2·len·n` per [`Lsr1Memory::apply`]; `2·len·n + n` per push.
#[derive(Debug)]
pub struct Lsr1Memory<T: Real> {
    m: usize,
    z: Ring<Correction<T>>,
    base: Preconditioner<T>,
    skipped: usize,
    mults: AtomicU64,
}

impl<T: Real> Clone for Lsr1Memory<T> {
    fn clone(&self) -> Self {
        Self {
            m: self.m,
            z: self.z.clone(),
            base: self.base.clone(),
            skipped: self.skipped,
            mults: AtomicU64::new(self.mults.load(Ordering::Relaxed)),
        }
    }
}

impl<T: Real> Lsr1Memory<T> {
    pub fn new(m: usize, base: Preconditioner<T>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("memory must be at least 1".into()));
        }
        Ok(Self {
            m,
            z: Ring::bounded(m),
            base,
            skipped: 0,
            mults: AtomicU64::new(0),
        })
    }

    pub fn memory(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.z.retained()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs rejected because `|yᵀz|` was too small.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    /// One vector per stored correction.
    pub fn stored_vectors(&self) -> usize {
        self.len()
    }

    pub fn multiplications(&self) -> u64 {
        self.mults.load(Ordering::Relaxed)
    }

    pub fn reset_multiplications(&self) {
        self.mults.store(0, Ordering::Relaxed);
    }

    /// `(z_i, δ_i)` from oldest to newest.
    pub fn corrections(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.z.iter().map(|(_, c)| (c.z.as_slice(), c.delta))
    }

    /// `H₀ v + Σ (z_iᵀv / δ_i) z_i`
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let mut r = self.base.apply(v);
        for (_, c) in self.z.iter() {
            axpy(dot(&c.z, v) / c.delta, &c.z, &mut r);
        }
        self.mults
            .fetch_add(2 * self.len() as u64 * v.len() as u64, Ordering::Relaxed);
        r
    }

    /// Forms `z = s − H y` and stores it with `δ = yᵀz`.
    ///
    /// When `|δ| ≤ sqrt(eps)·‖y‖‖z‖` the pair is skipped, the skip is
    /// counted and an error is returned; the memory is left unchanged.
    pub fn push(&mut self, s: &[T], y: &[T]) -> Result<()> {
        check_dim(s.len(), y.len())?;
        let z = sub(s, &self.apply(y));
        let delta = dot(y, &z);
        self.mults.fetch_add(s.len() as u64, Ordering::Relaxed);
        let threshold = T::curvature_eps() * norm(y) * norm(&z);
        if !(delta.abs() > threshold) || delta == T::zero() {
            self.skipped += 1;
            return Err(Error::Sr1Breakdown {
                value: delta.as_f64(),
                threshold: threshold.as_f64(),
            });
        }
        self.z.push(Correction { z, delta });
        Ok(())
    }
}

/// `lsr1_apply` as a free function.
pub fn lsr1_apply<T: Real>(mem: &Lsr1Memory<T>, v: &[T]) -> Vec<T> {
    mem.apply(v)
}

/// `lsr1_push` as a free function.
pub fn lsr1_push<T: Real>(mem: &mut Lsr1Memory<T>, s: &[T], y: &[T]) -> Result<()> {
    mem.push(s, y)
}

/// LSR1(m) with exact line search on a quadratic. Breakdowns skip the
/// update and continue with the unmodified operator.
pub struct Lsr1<'m, 'a, T: Real> {
    model: &'m QuadraticModel<'a, T>,
    mem: Lsr1Memory<T>,
    x: Vec<T>,
    g: Vec<T>,
    d: Vec<T>,
    last_d: Option<Vec<T>>,
}

impl<'m, 'a, T: Real> Lsr1<'m, 'a, T> {
    pub fn new(
        model: &'m QuadraticModel<'a, T>,
        x0: &[T],
        m: usize,
        base: Preconditioner<T>,
    ) -> Result<Self> {
        check_dim(model.dim(), x0.len())?;
        let mem = Lsr1Memory::new(m, base)?;
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

    pub fn memory(&self) -> &Lsr1Memory<T> {
        &self.mem
    }

    /// `x`, `g` and the stored corrections.
    pub fn stored_vectors(&self) -> usize {
        2 + self.mem.stored_vectors()
    }
}

impl<T: Real> Stepper<T> for Lsr1<'_, '_, T> {
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
        let _ = self.mem.push(&s, &y);
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

/// Solves `A x = b` by LSR1(m) with exact line search.
pub fn lsr1_solve<T: Real>(
    model: &QuadraticModel<'_, T>,
    x0: &[T],
    m: usize,
    base: Preconditioner<T>,
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, SolveTrace<T>, usize)> {
    let mut solver = Lsr1::new(model, x0, m, base)?;
    let trace = drive(&mut solver, model, opts);
    let skipped = solver.mem.skipped();
    Ok((solver.x, trace, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broyden::{broyden_update, sr1_phi};
    use crate::dense::DenseMatrix;
    use crate::linalg::{rel_diff, unit};

    #[test]
    fn first_push_example() {
        let mut mem = Lsr1Memory::new(2, Preconditioner::identity()).unwrap();
        mem.push(&[2.0, 0.0], &[1.0, 0.0]).unwrap();
        let (z, delta) = mem.corrections().next().unwrap();
        assert_eq!(z, &[1.0, 0.0]);
        assert_eq!(delta, 1.0);
    }

    #[test]
    fn degenerate_push_is_skipped() {
        let mut mem = Lsr1Memory::new(2, Preconditioner::identity()).unwrap();
        assert!(matches!(
            mem.push(&[1.0, 1.0], &[1.0, 1.0]),
            Err(Error::Sr1Breakdown { .. })
        ));
        assert_eq!(mem.skipped(), 1);
        assert!(mem.is_empty());
    }

    #[test]
    fn apply_examples() {
        let mut mem = Lsr1Memory::<f64>::new(2, Preconditioner::identity()).unwrap();
        assert_eq!(mem.apply(&[3.0, 4.0]), vec![3.0, 4.0]);
        mem.push(&[3.0, 0.0], &[2.0, 0.0]).unwrap();
        // z = e₁, δ = 2: e₁ + e₁/2
        assert_eq!(mem.apply(&unit(2, 0)), vec![1.5, 0.0]);
    }

    #[test]
    fn secant_and_dense_sr1_agreement() {
        let a = DenseMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                2.0 + i as f64
            } else {
                0.3 / (1.0 + (i + j) as f64)
            }
        });
        let model = QuadraticModel::new(&a, vec![1.0, -1.0, 2.0, 0.5, 0.0], 0.0).unwrap();
        let mut mem = Lsr1Memory::new(5, Preconditioner::identity()).unwrap();
        let mut h = DenseMatrix::identity(5);
        let mut x = vec![0.0; 5];
        let mut g = model.gradient(&x).unwrap();
        for _ in 0..4 {
            let d: Vec<f64> = mem.apply(&g).iter().map(|v| -v).collect();
            let alpha = model.exact_linesearch(&g, &d).unwrap();
            let s: Vec<f64> = d.iter().map(|v| alpha * v).collect();
            let y = a.matvec(&s);
            axpy(1.0, &s, &mut x);
            axpy(1.0, &y, &mut g);
            let phi = sr1_phi(&h, &s, &y).unwrap();
            broyden_update(&mut h, &s, &y, phi).unwrap();
            mem.push(&s, &y).unwrap();
            assert!(rel_diff(&mem.apply(&y), &s) < 1e-10);
            let probe = [0.3, -0.1, 0.7, 1.0, -2.0];
            assert!(rel_diff(&mem.apply(&probe), &h.matvec(&probe)) < 1e-9);
        }
    }

    #[test]
    fn cost_accounting() {
        let n = 8;
        let m = 3;
        let mut mem = Lsr1Memory::new(m, Preconditioner::identity()).unwrap();
        for i in 0..m {
            mem.push(
                &unit::<f64>(n, i),
                &unit(n, i).iter().map(|v| 0.5 * v).collect::<Vec<_>>(),
            )
            .unwrap();
        }
        assert_eq!(mem.len(), m);
        mem.reset_multiplications();
        mem.apply(&vec![1.0; n]);
        let s = unit::<f64>(n, 4);
        let y: Vec<f64> = s.iter().map(|v| 0.5 * v).collect();
        mem.push(&s, &y).unwrap();
        assert_eq!(mem.multiplications(), (4 * m * n + n) as u64);
        assert_eq!(2 + mem.stored_vectors(), 2 + m);
    }
}
