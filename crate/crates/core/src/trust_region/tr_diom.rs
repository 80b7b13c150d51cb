//! Truncated DIOM for the trust-region subproblem.

use crate::error::Result;
use crate::krylov::{DiomWindow, Window};
use crate::linalg::{axpy, dot, norm, scaled};
use crate::quadratic::QuadraticModel;
use crate::scalar::Real;
use crate::trust_region::{
    boundary_tau, PathRecorder, SubproblemOptions, SubproblemResult, SubproblemStatus,
};

/// DIOM(m) from `x = 0`, stopped at the boundary when the next step leaves
/// the ball or the pivot `u_kk` is nonpositive.
///
/// The step at iteration `k` is `d_k / u_kk` with `d_k = ζ_k (v_k − Σ u_{i,k} p_i)`.
/// Model values are tracked from the formula residual `−ζ_k v_k`, which
/// avoids extra operator applications.
pub fn tr_diom<T: Real>(
    model: &QuadraticModel<'_, T>,
    delta: T,
    window: Window,
    opts: &SubproblemOptions<T>,
) -> Result<SubproblemResult<T>> {
    let n = model.dim();
    let op = model.operator();
    let mut rec = PathRecorder::new(model.c(), n, opts.keep_iterates);
    let mut x = vec![T::zero(); n];
    let g0 = norm(model.b());
    let tol = opts.rtol * g0;
    if g0 == T::zero() {
        return Ok(rec.finish(x, SubproblemStatus::InteriorConverged, 0, 0));
    }
    let mut w = DiomWindow::new(model.b(), window)?;
    let mut q = model.c();
    for k in 0..opts.max_iter {
        let col = w.begin(op)?;
        let zeta = col.zeta;
        let d = scaled(zeta, &col.direction);
        let tau = boundary_tau(&x, &d, delta)?;
        // g_{k−1}ᵀ d with g_{k−1} = −ζ_k v_k; dᵀA d = ζ_k² u_kk.
        let vk = w.basis().vector(col.k()).expect("v_k stored");
        let gd = -zeta * dot(vk, &d);
        let kappa = zeta * zeta * col.u_kk;
        let step_q = |t: T| q + t * gd + T::of(0.5) * t * t * kappa;
        if col.u_kk <= T::zero() || !col.u_kk.is_finite() || T::one() / col.u_kk > tau {
            let nonpositive = !(col.u_kk > T::zero());
            axpy(tau, &d, &mut x);
            rec.record(&x, step_q(tau));
            let status = if nonpositive {
                SubproblemStatus::NonpositiveCurvatureBoundary
            } else {
                SubproblemStatus::Boundary
            };
            return Ok(rec.finish(x, status, k + 1, k + 1));
        }
        let inv = T::one() / col.u_kk;
        axpy(inv, &d, &mut x);
        q = step_q(inv);
        rec.record(&x, q);
        let p = scaled(inv, &col.direction);
        w.commit(&col, p);
        if w.zeta().abs() <= tol || w.is_exhausted() {
            return Ok(rec.finish(x, SubproblemStatus::InteriorConverged, k + 1, k + 1));
        }
    }
    Ok(rec.finish(
        x,
        SubproblemStatus::MaxIterations,
        opts.max_iter,
        opts.max_iter,
    ))
}
