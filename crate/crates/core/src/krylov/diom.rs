//! Direct incomplete orthogonalization method, DIOM(m).

use crate::error::{check_dim, Result};
use crate::krylov::arnoldi::{ArnoldiBasis, ArnoldiColumn, Window};
use crate::linalg::{axpy, norm, scale, sub};
use crate::operator::LinearOperator;
use crate::quadratic::QuadraticModel;
use crate::ring::Ring;
use crate::scalar::Real;
use crate::trace::{drive, Advance, SolveOptions, SolveStatus, SolveTrace, StepInfo, Stepper};

/// Iterations between direct-residual refreshes.
pub const REFRESH_EVERY: usize = 50;

/// Windowed basis plus the banded LU scalars of `T_k = L_k U_k`.
///
/// Each step has two halves: [`DiomWindow::begin`] runs the Arnoldi step and
/// forms the new column of `U_k` and the unscaled direction
/// `v_k − Σ u_{i,k} p_i`; [`DiomWindow::commit`] stores `p_k` and advances
/// `ℓ` and `ζ`. The trust-region variant inspects the pivot in between.
#[derive(Clone, Debug)]
pub struct DiomWindow<T> {
    basis: ArnoldiBasis<T>,
    /// `p_i` for the last `m` indices.
    p: Ring<Vec<T>>,
    /// `ℓ_{i,i−1}` keyed by `i − 1`.
    ell: Ring<T>,
    /// `ζ_k` for the step about to run.
    zeta: T,
}

/// Quantities produced by [`DiomWindow::begin`] for step `k`.
#[derive(Clone, Debug)]
pub struct DiomColumn<T> {
    pub arnoldi: ArnoldiColumn<T>,
    /// `u_{i,k}` for `i = m_k, …, k`.
    pub u: Vec<T>,
    pub u_kk: T,
    /// `v_k − Σ_{i=m_k}^{k−1} u_{i,k} p_i`
    pub direction: Vec<T>,
    /// `ζ_k`
    pub zeta: T,
}

impl<T: Real> DiomColumn<T> {
    pub fn k(&self) -> usize {
        self.arnoldi.k
    }
}

impl<T: Real> DiomWindow<T> {
    /// Starts from residual `r0`; `window` is `m`, or full orthogonalization.
    pub fn new(r0: &[T], window: Window) -> Result<Self> {
        let basis = ArnoldiBasis::new(r0, window)?;
        let zeta = basis.beta();
        Ok(Self {
            p: window.ring(0),
            ell: window.ring(1),
            basis,
            zeta,
        })
    }

    pub fn basis(&self) -> &ArnoldiBasis<T> {
        &self.basis
    }

    /// `ζ` of the next step (after step `k`, this is `ζ_{k+1}`).
    pub fn zeta(&self) -> T {
        self.zeta
    }

    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self, i: usize) -> Option<&[T]> {
        self.p.get(i).map(Vec::as_slice)
    }

    /// Residual after the last committed step, `r_k = ζ_{k+1} v_{k+1}`.
    ///
    /// `None` after a happy breakdown, where the residual vanishes in exact
    /// arithmetic.
    pub fn residual(&self) -> Option<Vec<T>> {
        let v = self.basis.vector(self.p.len() + 1)?;
        let mut r = v.to_vec();
        scale(self.zeta, &mut r);
        Some(r)
    }

    pub fn is_exhausted(&self) -> bool {
        self.basis.is_exhausted()
    }

    /// Arnoldi step plus the new `U` column and unscaled direction.
    pub fn begin(&mut self, op: &dyn LinearOperator<T>) -> Result<DiomColumn<T>> {
        let arnoldi = self.basis.step(op)?;
        let k = arnoldi.k;
        let first = arnoldi.first;
        let mut u = Vec::with_capacity(k - first + 1);
        // u_{m_k − 1, k} lies outside the band and is zero.
        let mut prev = T::zero();
        for i in first..=k {
            let t = arnoldi.entry(i);
            let v = if i == 1 || i == first {
                t
            } else {
                t - *self.ell.get(i - 1).expect("ℓ in window") * prev
            };
            u.push(v);
            prev = v;
        }
        let u_kk = prev;
        let mut direction = self.basis.vector(k).expect("v_k stored").to_vec();
        for (idx, i) in (first..k).enumerate() {
            axpy(-u[idx], self.p.get(i).expect("p in window"), &mut direction);
        }
        Ok(DiomColumn {
            arnoldi,
            u,
            u_kk,
            direction,
            zeta: self.zeta,
        })
    }

    /// Stores `p_k` and sets `ℓ_{k+1,k} = t_{k+1,k}/u_{k,k}`, `ζ_{k+1} = −ℓ_{k+1,k} ζ_k`.
    pub fn commit(&mut self, col: &DiomColumn<T>, p_k: Vec<T>) {
        debug_assert_eq!(col.k(), self.p.len() + 1);
        self.p.push(p_k);
        let ell = col.arnoldi.subdiag / col.u_kk;
        self.ell.push(ell);
        self.zeta = -ell * col.zeta;
    }
}

/// DIOM(m) state for solving `A x = b`.
pub struct Diom<'m, 'a, T: Real> {
    model: &'m QuadraticModel<'a, T>,
    window: Option<DiomWindow<T>>,
    x: Vec<T>,
    /// Formula residual `|ζ_{k+1}|`, replaced by the direct value on refresh.
    res: T,
    /// Direct residual computed at the current iterate, if any.
    direct: Option<Vec<T>>,
    last_p: Option<Vec<T>>,
}

impl<'m, 'a, T: Real> Diom<'m, 'a, T> {
    pub fn new(model: &'m QuadraticModel<'a, T>, x0: &[T], window: Window) -> Result<Self> {
        check_dim(model.dim(), x0.len())?;
        let r0 = sub(model.b(), &model.apply(x0));
        let beta = norm(&r0);
        let w = if beta > T::zero() {
            Some(DiomWindow::new(&r0, window)?)
        } else {
            if let Window::Limited(0) = window {
                return Err(crate::error::Error::InvalidArgument(
                    "window must be at least 1".into(),
                ));
            }
            None
        };
        Ok(Self {
            model,
            window: w,
            x: x0.to_vec(),
            res: beta,
            direct: Some(r0),
            last_p: None,
        })
    }

    pub fn window(&self) -> Option<&DiomWindow<T>> {
        self.window.as_ref()
    }

    fn refresh(&mut self) -> T {
        let r = sub(self.model.b(), &self.model.apply(&self.x));
        let n = norm(&r);
        self.direct = Some(r);
        self.res = n;
        n
    }
}

impl<T: Real> Stepper<T> for Diom<'_, '_, T> {
    fn x(&self) -> &[T] {
        &self.x
    }

    fn gradient(&self) -> Vec<T> {
        let r = match (&self.direct, &self.window) {
            (Some(r), _) => r.clone(),
            (None, Some(w)) => match w.residual() {
                Some(r) => r,
                None => sub(self.model.b(), &self.model.apply(&self.x)),
            },
            (None, None) => sub(self.model.b(), &self.model.apply(&self.x)),
        };
        r.into_iter().map(|v| -v).collect()
    }

    fn residual_estimate(&self) -> T {
        self.res
    }

    fn last_direction(&self) -> Option<&[T]> {
        self.last_p.as_deref()
    }

    fn advance(&mut self) -> Advance<T> {
        let Some(w) = self.window.as_mut() else {
            return Advance::Stop(SolveStatus::Converged);
        };
        if w.is_exhausted() {
            return Advance::Stop(SolveStatus::Converged);
        }
        let col = match w.begin(self.model.operator()) {
            Ok(c) => c,
            Err(_) => return Advance::Stop(SolveStatus::Breakdown),
        };
        if col.u_kk == T::zero() || !col.u_kk.is_finite() {
            return Advance::Stop(SolveStatus::Breakdown);
        }
        let mut p = col.direction.clone();
        scale(T::one() / col.u_kk, &mut p);
        axpy(col.zeta, &p, &mut self.x);
        w.commit(&col, p.clone());
        self.last_p = Some(p);
        self.direct = None;
        self.res = w.zeta().abs();
        if col.k() % REFRESH_EVERY == 0 || w.is_exhausted() {
            self.refresh();
        }
        Advance::Step(StepInfo {
            u_kk: Some(col.u_kk),
            zeta: Some(col.zeta),
            ..StepInfo::default()
        })
    }

    fn confirm_convergence(&mut self, tol: T) -> bool {
        if self.direct.is_some() {
            return self.res <= tol;
        }
        self.refresh() <= tol
    }
}

/// Solves `A x = b` by DIOM with window `m` (`Window::Full` gives FOM's iterates).
pub fn diom_solve<T: Real>(
    model: &QuadraticModel<'_, T>,
    x0: &[T],
    window: Window,
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, SolveTrace<T>)> {
    let mut diom = Diom::new(model, x0, window)?;
    let trace = drive(&mut diom, model, opts);
    Ok((diom.x, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::operator::{DiagonalOperator, IdentityOperator, Preconditioner};

    #[test]
    fn identity_single_step() {
        let op = IdentityOperator::new(3);
        let model = QuadraticModel::<f64>::new(&op, vec![1.0, 1.0, 2.0], 0.0).unwrap();
        let (x, trace) = diom_solve(
            &model,
            &[0.0; 3],
            Window::Limited(1),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(trace.iterations(), 1);
        assert!((x[2] - 2.0).abs() < 1e-15);
        assert!((trace.records()[1].u_kk.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zeta_alternates_and_pivots_positive() {
        let op = DiagonalOperator::new((1..=12).map(|i| i as f64).collect());
        let model = QuadraticModel::new(&op, vec![1.0; 12], 0.0).unwrap();
        let (_, trace) = diom_solve(
            &model,
            &[0.0; 12],
            Window::Limited(2),
            &SolveOptions::default().with_rtol(1e-12),
        )
        .unwrap();
        for r in &trace.records()[1..] {
            let zeta = r.zeta.unwrap();
            let expected = if r.k % 2 == 1 { 1.0 } else { -1.0 };
            assert_eq!(zeta.signum(), expected, "k = {}", r.k);
            assert!(r.u_kk.unwrap() > 0.0);
        }
    }

    #[test]
    fn lanczos_window_matches_cg() {
        let a = DenseMatrix::from_fn(8, 8, |i, j| {
            if i == j {
                4.0 + i as f64
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let b: Vec<f64> = (0..8).map(|i| (i as f64).sin() + 1.0).collect();
        let model = QuadraticModel::new(&a, b, 0.0).unwrap();
        let opts = SolveOptions::default().with_rtol(1e-12).keeping_vectors();
        let (_, dt) = diom_solve(&model, &[0.0; 8], Window::Limited(1), &opts).unwrap();
        let (_, ct) =
            crate::krylov::pcg_solve(&model, Preconditioner::identity(), &[0.0; 8], &opts).unwrap();
        for (dv, cv) in dt.vectors().iter().zip(ct.vectors()) {
            assert!(crate::linalg::rel_diff(&dv.x, &cv.x) < 1e-10);
        }
        // u_{k+1,k+1} α_k = 1
        for (dr, cr) in dt.records()[1..].iter().zip(&ct.records()[1..]) {
            assert!((dr.u_kk.unwrap() * cr.alpha.unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn formula_residual_matches_direct() {
        let op = DiagonalOperator::new((1..=20).map(|i| (i * i) as f64).collect());
        let model = QuadraticModel::new(&op, vec![1.0; 20], 0.0).unwrap();
        let mut diom = Diom::new(&model, &[0.0; 20], Window::Limited(3)).unwrap();
        for _ in 0..6 {
            assert!(matches!(diom.advance(), Advance::Step(_)));
            let r = diom.window().unwrap().residual().unwrap();
            let direct = sub(model.b(), &model.apply(diom.x()));
            assert!(crate::linalg::rel_diff(&r, &direct) < 1e-9);
        }
    }
}
