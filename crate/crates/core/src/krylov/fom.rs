//! Full orthogonalization method.

use crate::error::{check_dim, Result};
use crate::krylov::arnoldi::{ArnoldiBasis, Window};
use crate::linalg::{axpy, norm, sub};
use crate::quadratic::QuadraticModel;
use crate::scalar::Real;
use crate::trace::{drive, Advance, SolveOptions, SolveStatus, SolveTrace, StepInfo, Stepper};

/// FOM state. `T_k = L_k U_k` is factored column by column without
/// pivoting; `w_k` is recovered by back substitution each step and
/// `x_k = x₀ + V_k w_k` is formed from the full basis.
pub struct Fom<'m, 'a, T: Real> {
    model: &'m QuadraticModel<'a, T>,
    basis: Option<ArnoldiBasis<T>>,
    x0: Vec<T>,
    x: Vec<T>,
    /// Direct residual `b − A x_k`.
    r: Vec<T>,
    step: Option<Vec<T>>,
    /// Columns of `U_k`, column `j` holding `u_{1..=j, j}`.
    u: Vec<Vec<T>>,
    /// `ℓ_{i,i−1}` stored at `i − 2`.
    ell: Vec<T>,
    /// `ζ_1, …, ζ_{k+1}`
    zeta: Vec<T>,
    /// `|t_{k+1,k} ω_k|`, the residual norm predicted by the Galerkin identity.
    identity_res: T,
    max_identity_gap: T,
}

impl<'m, 'a, T: Real> Fom<'m, 'a, T> {
    pub fn new(model: &'m QuadraticModel<'a, T>, x0: &[T]) -> Result<Self> {
        check_dim(model.dim(), x0.len())?;
        let ax = model.apply(x0);
        let r = sub(model.b(), &ax);
        let beta = norm(&r);
        let basis = if beta > T::zero() {
            Some(ArnoldiBasis::new(&r, Window::Full)?)
        } else {
            None
        };
        Ok(Self {
            model,
            basis,
            x0: x0.to_vec(),
            x: x0.to_vec(),
            r,
            step: None,
            u: Vec::new(),
            ell: Vec::new(),
            zeta: vec![beta],
            identity_res: beta,
            max_identity_gap: T::zero(),
        })
    }

    /// Largest `‖r_direct − r_identity‖ / ‖r₀‖` seen so far, where
    /// `r_identity = −t_{k+1,k} ω_k v_{k+1}`.
    pub fn max_identity_gap(&self) -> T {
        self.max_identity_gap
    }

    /// Residual norm given by the identity at the current iterate.
    pub fn identity_residual(&self) -> T {
        self.identity_res
    }
}

impl<T: Real> Stepper<T> for Fom<'_, '_, T> {
    fn x(&self) -> &[T] {
        &self.x
    }

    fn gradient(&self) -> Vec<T> {
        self.r.iter().map(|&v| -v).collect()
    }

    fn residual_estimate(&self) -> T {
        norm(&self.r)
    }

    fn last_direction(&self) -> Option<&[T]> {
        self.step.as_deref()
    }

    fn advance(&mut self) -> Advance<T> {
        let Some(basis) = self.basis.as_mut() else {
            return Advance::Stop(SolveStatus::Converged);
        };
        if basis.is_exhausted() {
            return Advance::Stop(SolveStatus::Converged);
        }
        let col = match basis.step(self.model.operator()) {
            Ok(c) => c,
            Err(_) => return Advance::Stop(SolveStatus::Breakdown),
        };
        let k = col.k;
        // New column of U: u_{1,k} = t_{1,k}, u_{i,k} = t_{i,k} − ℓ_{i,i−1} u_{i−1,k}.
        let mut ucol = Vec::with_capacity(k);
        for i in 1..=k {
            let t = col.entry(i);
            let v = if i == 1 {
                t
            } else {
                t - self.ell[i - 2] * ucol[i - 2]
            };
            ucol.push(v);
        }
        let ukk = ucol[k - 1];
        let scale = col.entries.iter().fold(col.subdiag, |a, &t| a.max(t.abs()));
        if ukk.abs() <= T::epsilon() * scale {
            return Advance::Stop(SolveStatus::Breakdown);
        }
        self.u.push(ucol);
        let zeta_k = self.zeta[k - 1];

        // Back substitution U_k w = z_k.
        let mut w = self.zeta.clone();
        for j in (0..k).rev() {
            w[j] = w[j] / self.u[j][j];
            let wj = w[j];
            for i in 0..j {
                w[i] = w[i] - self.u[j][i] * wj;
            }
        }
        let prev = std::mem::replace(&mut self.x, self.x0.clone());
        let basis = self.basis.as_ref().expect("basis present");
        for (j, &wj) in w.iter().enumerate() {
            axpy(wj, basis.vector(j + 1).expect("full basis"), &mut self.x);
        }
        self.step = Some(sub(&self.x, &prev));

        let ax = self.model.apply(&self.x);
        self.r = sub(self.model.b(), &ax);
        let omega = w[k - 1];
        self.identity_res = (col.subdiag * omega).abs();
        if let Some(v_next) = basis.vector(k + 1) {
            // r_identity = −t_{k+1,k} ω_k v_{k+1}
            let mut gap = self.r.clone();
            axpy(col.subdiag * omega, v_next, &mut gap);
            let rel = norm(&gap) / basis.beta();
            if rel > self.max_identity_gap {
                self.max_identity_gap = rel;
            }
        }

        let ell = col.subdiag / ukk;
        self.ell.push(ell);
        self.zeta.push(-ell * zeta_k);
        Advance::Step(StepInfo {
            u_kk: Some(ukk),
            zeta: Some(zeta_k),
            ..StepInfo::default()
        })
    }
}

/// Solves `A x = b` by FOM from `x0`.
pub fn fom_solve<T: Real>(
    model: &QuadraticModel<'_, T>,
    x0: &[T],
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, SolveTrace<T>)> {
    let (x, trace, _) = fom_solve_checked(model, x0, opts)?;
    Ok((x, trace))
}

/// Like [`fom_solve`], also returning the largest relative gap between the
/// direct residual and the Galerkin residual identity.
pub fn fom_solve_checked<T: Real>(
    model: &QuadraticModel<'_, T>,
    x0: &[T],
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, SolveTrace<T>, T)> {
    let mut fom = Fom::new(model, x0)?;
    let trace = drive(&mut fom, model, opts);
    let gap = fom.max_identity_gap();
    Ok((fom.x, trace, gap))
}
