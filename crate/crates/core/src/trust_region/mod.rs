//! Trust-region subproblem solvers and the outer Newton trust-region loop.
//!
//! Subproblems minimize `q(x) = ½ xᵀAx − bᵀx + c` over `‖x‖ ≤ Δ`, always
//! starting from `x = 0`. Each solver follows the same truncation rule: stop
//! on the boundary when a step would leave the ball or when nonpositive
//! curvature is met.

mod newton;
mod steihaug;
mod tr_diom;
mod tr_lbfgs;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::scalar::Real;

pub use newton::{
    forcing_rtol, tr_newton, FnObjective, Objective, Subsolver, TrIteration, TrResult, TrStatus,
    TrustRegionConfig,
};
pub use steihaug::steihaug_tcg;
pub use tr_diom::tr_diom;
pub use tr_lbfgs::tr_lbfgs;

/// Positive `τ` with `‖x + τ d‖ = Δ`, for `‖x‖ ≤ Δ`.
pub fn boundary_tau<T: Real>(x: &[T], d: &[T], delta: T) -> Result<T> {
    let dd = dot(d, d);
    if dd == T::zero() {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    let xd = dot(x, d);
    let xx = dot(x, x);
    let slack = (delta * delta - xx).max(T::zero());
    let disc = xd * xd + dd * slack;
    Ok((-xd + disc.sqrt()) / dd)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubproblemStatus {
    InteriorConverged,
    Boundary,
    NonpositiveCurvatureBoundary,
    MaxIterations,
}

impl std::fmt::Display for SubproblemStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            SubproblemStatus::InteriorConverged => "interior_converged",
            SubproblemStatus::Boundary => "boundary",
            SubproblemStatus::NonpositiveCurvatureBoundary => "nonpositive_curvature_boundary",
            SubproblemStatus::MaxIterations => "max_iterations",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SubproblemOptions<T> {
    /// Stop when `‖g_k‖ ≤ rtol · ‖g₀‖`.
    pub rtol: T,
    pub max_iter: usize,
    /// Record every inner iterate, including the final one.
    pub keep_iterates: bool,
}

impl<T: Real> Default for SubproblemOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::of(1e-8),
            max_iter: 10_000,
            keep_iterates: false,
        }
    }
}

impl<T: Real> SubproblemOptions<T> {
    pub fn with_rtol(mut self, rtol: T) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn keeping_iterates(mut self) -> Self {
        self.keep_iterates = true;
        self
    }
}

/// Model value and distance from the center at one point of the inner path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathPoint<T> {
    pub q: T,
    pub norm: T,
}

#[derive(Clone, Debug)]
pub struct SubproblemResult<T> {
    pub x: Vec<T>,
    pub status: SubproblemStatus,
    /// `q(0) − q(x)` as tracked by the solver.
    pub decrease: T,
    pub iterations: usize,
    /// Operator applications.
    pub hvps: usize,
    /// `(q, ‖x‖)` at `x₀ = 0`, every accepted inner iterate and the returned point.
    pub path: Vec<PathPoint<T>>,
    /// Iterates in the same order as `path`, when requested.
    pub iterates: Vec<Vec<T>>,
}

/// Collects the inner path while a subsolver runs.
pub(crate) struct PathRecorder<T> {
    c: T,
    keep: bool,
    path: Vec<PathPoint<T>>,
    iterates: Vec<Vec<T>>,
}

impl<T: Real> PathRecorder<T> {
    pub(crate) fn new(c: T, n: usize, keep: bool) -> Self {
        let mut r = Self {
            c,
            keep,
            path: Vec::new(),
            iterates: Vec::new(),
        };
        r.record(&vec![T::zero(); n], c);
        r
    }

    pub(crate) fn record(&mut self, x: &[T], q: T) {
        self.path.push(PathPoint { q, norm: norm(x) });
        if self.keep {
            self.iterates.push(x.to_vec());
        }
    }

    pub(crate) fn finish(
        self,
        x: Vec<T>,
        status: SubproblemStatus,
        iterations: usize,
        hvps: usize,
    ) -> SubproblemResult<T> {
        let q = self.path.last().map(|p| p.q).unwrap_or(self.c);
        SubproblemResult {
            x,
            status,
            decrease: self.c - q,
            iterations,
            hvps,
            path: self.path,
            iterates: self.iterates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_examples() {
        assert_eq!(boundary_tau(&[0.0, 0.0], &[1.0, 0.0], 2.0).unwrap(), 2.0);
        assert_eq!(boundary_tau(&[1.0, 0.0], &[1.0, 0.0], 2.0).unwrap(), 1.0);
        let t = boundary_tau(&[1.0, 0.0], &[0.0, 1.0], 2f64.sqrt()).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        assert!(boundary_tau(&[1.0, 0.0], &[0.0, 0.0], 2.0).is_err());
    }

    #[test]
    fn tau_is_infinite_without_constraint() {
        let t = boundary_tau(&[1.0, 2.0], &[0.5, 0.5], f64::INFINITY).unwrap();
        assert!(t.is_infinite() && t > 0.0);
    }
}
