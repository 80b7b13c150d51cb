//! Truncated LBFGS for the trust-region subproblem.

use crate::error::Result;
use crate::limited_memory::LbfgsMemory;
use crate::linalg::{axpy, dot, norm, scaled};
use crate::operator::Preconditioner;
use crate::quadratic::QuadraticModel;
use crate::scalar::Real;
use crate::trust_region::{
    boundary_tau, PathRecorder, SubproblemOptions, SubproblemResult, SubproblemStatus,
};

/// LBFGS(m) with exact steps on `q`, truncated like Steihaug's method.
///
/// A curvature pair rejected by the memory ends the solve on the boundary
/// along the current direction.
pub fn tr_lbfgs<T: Real>(
    model: &QuadraticModel<'_, T>,
    delta: T,
    m: usize,
    opts: &SubproblemOptions<T>,
) -> Result<SubproblemResult<T>> {
    let n = model.dim();
    let op = model.operator();
    let mut mem = LbfgsMemory::new(m, Preconditioner::identity())?;
    let mut rec = PathRecorder::new(model.c(), n, opts.keep_iterates);
    let mut x = vec![T::zero(); n];
    let mut g: Vec<T> = model.b().iter().map(|&b| -b).collect();
    let g0 = norm(&g);
    let tol = opts.rtol * g0;
    if g0 == T::zero() {
        return Ok(rec.finish(x, SubproblemStatus::InteriorConverged, 0, 0));
    }
    let mut ad = vec![T::zero(); n];
    let mut q = model.c();
    let mut hvps = 0;
    for k in 0..opts.max_iter {
        let mut d = mem.apply(&g);
        d.iter_mut().for_each(|v| *v = -*v);
        op.apply_into(&d, &mut ad);
        hvps += 1;
        let kappa = dot(&d, &ad);
        let gd = dot(&g, &d);
        let tau = boundary_tau(&x, &d, delta)?;
        let to_boundary = |x: &mut Vec<T>, rec: &mut PathRecorder<T>, q: T| {
            axpy(tau, &d, x);
            rec.record(x, q + tau * gd + T::of(0.5) * tau * tau * kappa);
        };
        if kappa <= T::zero() {
            to_boundary(&mut x, &mut rec, q);
            return Ok(rec.finish(
                x,
                SubproblemStatus::NonpositiveCurvatureBoundary,
                k + 1,
                hvps,
            ));
        }
        let alpha = -gd / kappa;
        if alpha > tau {
            to_boundary(&mut x, &mut rec, q);
            return Ok(rec.finish(x, SubproblemStatus::Boundary, k + 1, hvps));
        }
        let s = scaled(alpha, &d);
        let y = scaled(alpha, &ad);
        if mem.push(&s, &y).is_err() {
            to_boundary(&mut x, &mut rec, q);
            return Ok(rec.finish(
                x,
                SubproblemStatus::NonpositiveCurvatureBoundary,
                k + 1,
                hvps,
            ));
        }
        axpy(T::one(), &s, &mut x);
        axpy(T::one(), &y, &mut g);
        q = q + alpha * gd + T::of(0.5) * alpha * alpha * kappa;
        rec.record(&x, q);
        if norm(&g) <= tol {
            return Ok(rec.finish(x, SubproblemStatus::InteriorConverged, k + 1, hvps));
        }
    }
    Ok(rec.finish(x, SubproblemStatus::MaxIterations, opts.max_iter, hvps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DiagonalOperator;
    use crate::trust_region::steihaug_tcg;

    #[test]
    fn matches_truncated_cg_on_spd() {
        let op = DiagonalOperator::<f64>::new(vec![1.0, 2.0, 3.0, 5.0, 8.0]);
        let model = QuadraticModel::new(&op, vec![1.0, -1.0, 2.0, 0.5, 1.0], 0.0).unwrap();
        for delta in [0.1, 0.5, 1.0, f64::INFINITY] {
            let opts = SubproblemOptions::default().with_rtol(1e-12);
            let a = tr_lbfgs(&model, delta, 5, &opts).unwrap();
            let b = steihaug_tcg(&model, delta, &opts).unwrap();
            assert_eq!(a.status, b.status);
            assert_eq!(a.iterations, b.iterations);
            for (u, v) in a.x.iter().zip(&b.x) {
                assert!((u - v).abs() < 1e-10, "Δ = {delta}");
            }
        }
    }

    #[test]
    fn negative_curvature_exits_on_boundary() {
        let op = DiagonalOperator::<f64>::new(vec![-2.0, 1.0]);
        let model = QuadraticModel::new(&op, vec![1.0, 1.0], 0.0).unwrap();
        let r = tr_lbfgs(&model, 3.0, 3, &SubproblemOptions::default()).unwrap();
        assert_eq!(r.status, SubproblemStatus::NonpositiveCurvatureBoundary);
        assert!((norm(&r.x) - 3.0).abs() < 1e-14);
    }
}
