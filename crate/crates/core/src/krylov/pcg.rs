//! Preconditioned conjugate gradient.

use crate::error::{check_dim, Result};
use crate::linalg::{axpby, axpy, dot, norm};
use crate::operator::Preconditioner;
use crate::quadratic::QuadraticModel;
use crate::scalar::Real;
use crate::trace::{drive, Advance, SolveOptions, SolveStatus, SolveTrace, StepInfo, Stepper};

/// PCG state: iterate, recursive gradient, preconditioned gradient and
/// search direction.
pub struct Pcg<'m, 'a, T: Real> {
    model: &'m QuadraticModel<'a, T>,
    h0: Preconditioner<T>,
    x: Vec<T>,
    g: Vec<T>,
    z: Vec<T>,
    d: Vec<T>,
    ad: Vec<T>,
    prev_d: Option<Vec<T>>,
    /// `ρ_k = g_kᵀ H₀ g_k`
    rho: T,
    k: usize,
}

impl<'m, 'a, T: Real> Pcg<'m, 'a, T> {
    pub fn new(model: &'m QuadraticModel<'a, T>, h0: Preconditioner<T>, x0: &[T]) -> Result<Self> {
        check_dim(model.dim(), x0.len())?;
        let g = model.gradient(x0)?;
        let mut z = h0.apply(&g);
        z.iter_mut().for_each(|v| *v = -*v);
        let rho = -dot(&g, &z);
        let n = model.dim();
        Ok(Self {
            model,
            h0,
            x: x0.to_vec(),
            g,
            d: z.clone(),
            z,
            ad: vec![T::zero(); n],
            prev_d: None,
            rho,
            k: 0,
        })
    }

    pub fn g(&self) -> &[T] {
        &self.g
    }

    /// Current search direction `d_k`.
    pub fn direction(&self) -> &[T] {
        &self.d
    }

    /// `ρ_k = g_kᵀ H₀ g_k`
    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn iteration(&self) -> usize {
        self.k
    }
}

impl<T: Real> Stepper<T> for Pcg<'_, '_, T> {
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
        self.prev_d.as_deref()
    }

    fn advance(&mut self) -> Advance<T> {
        self.model.operator().apply_into(&self.d, &mut self.ad);
        let curvature = dot(&self.d, &self.ad);
        if curvature <= T::zero() {
            return Advance::Stop(SolveStatus::NonpositiveCurvature);
        }
        if self.rho == T::zero() {
            return Advance::Stop(SolveStatus::Breakdown);
        }
        let alpha = self.rho / curvature;
        axpy(alpha, &self.d, &mut self.x);
        axpy(alpha, &self.ad, &mut self.g);
        self.h0.apply_into(&self.g, &mut self.z);
        self.z.iter_mut().for_each(|v| *v = -*v);
        let rho_next = -dot(&self.g, &self.z);
        let beta = rho_next / self.rho;
        self.rho = rho_next;
        match &mut self.prev_d {
            Some(p) => p.copy_from_slice(&self.d),
            None => self.prev_d = Some(self.d.clone()),
        }
        // d ← z + β d
        axpby(T::one(), &self.z, beta, &mut self.d);
        self.k += 1;
        Advance::Step(StepInfo {
            alpha: Some(alpha),
            curvature: Some(curvature),
            ..StepInfo::default()
        })
    }
}

/// Solves `A x = b` by PCG from `x0`.
pub fn pcg_solve<T: Real>(
    model: &QuadraticModel<'_, T>,
    h0: Preconditioner<T>,
    x0: &[T],
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, SolveTrace<T>)> {
    let mut pcg = Pcg::new(model, h0, x0)?;
    let trace = drive(&mut pcg, model, opts);
    Ok((pcg.x, trace))
}
