//! Steihaug–Toint truncated conjugate gradient.

use crate::error::Result;
use crate::linalg::{axpby, axpy, dot, norm};
use crate::quadratic::QuadraticModel;
use crate::scalar::Real;
use crate::trust_region::{
    boundary_tau, PathRecorder, SubproblemOptions, SubproblemResult, SubproblemStatus,
};

/// Truncated CG on `min q(x)` subject to `‖x‖ ≤ Δ`, from `x = 0`.
pub fn steihaug_tcg<T: Real>(
    model: &QuadraticModel<'_, T>,
    delta: T,
    opts: &SubproblemOptions<T>,
) -> Result<SubproblemResult<T>> {
    let n = model.dim();
    let op = model.operator();
    let mut rec = PathRecorder::new(model.c(), n, opts.keep_iterates);
    let mut x = vec![T::zero(); n];
    let mut g: Vec<T> = model.b().iter().map(|&b| -b).collect();
    let g0 = norm(&g);
    let tol = opts.rtol * g0;
    if g0 == T::zero() {
        return Ok(rec.finish(x, SubproblemStatus::InteriorConverged, 0, 0));
    }
    let mut d: Vec<T> = g.iter().map(|&v| -v).collect();
    let mut ad = vec![T::zero(); n];
    let mut rho = dot(&g, &g);
    let mut q = model.c();
    let mut hvps = 0;
    for k in 0..opts.max_iter {
        op.apply_into(&d, &mut ad);
        hvps += 1;
        let kappa = dot(&d, &ad);
        let gd = dot(&g, &d);
        let tau = boundary_tau(&x, &d, delta)?;
        if kappa <= T::zero() || rho / kappa > tau {
            axpy(tau, &d, &mut x);
            q = q + tau * gd + T::of(0.5) * tau * tau * kappa;
            rec.record(&x, q);
            let status = if kappa <= T::zero() {
                SubproblemStatus::NonpositiveCurvatureBoundary
            } else {
                SubproblemStatus::Boundary
            };
            return Ok(rec.finish(x, status, k + 1, hvps));
        }
        let alpha = rho / kappa;
        axpy(alpha, &d, &mut x);
        axpy(alpha, &ad, &mut g);
        q = q + alpha * gd + T::of(0.5) * alpha * alpha * kappa;
        rec.record(&x, q);
        let rho_next = dot(&g, &g);
        if rho_next.sqrt() <= tol {
            return Ok(rec.finish(x, SubproblemStatus::InteriorConverged, k + 1, hvps));
        }
        let beta = rho_next / rho;
        rho = rho_next;
        axpby(-T::one(), &g, beta, &mut d);
    }
    Ok(rec.finish(x, SubproblemStatus::MaxIterations, opts.max_iter, hvps))
}
