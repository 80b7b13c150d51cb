//! Per-iteration solve records and the generic iteration driver.

use serde::{Deserialize, Serialize};

use crate::linalg::{norm, sub};
use crate::quadratic::QuadraticModel;
use crate::scalar::Real;

/// Final status of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    NonpositiveCurvature,
    Boundary,
    Breakdown,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::NonpositiveCurvature => "nonpositive_curvature",
            SolveStatus::Boundary => "boundary",
            SolveStatus::Breakdown => "breakdown",
        };
        f.pad(s)
    }
}

/// One row of a [`SolveTrace`].
///
/// Row `k` describes iterate `x_k`. Step quantities (`alpha`, `curvature`,
/// `gamma`, `u_kk`, `zeta`) belong to the step that produced `x_k` and are
/// absent on row 0. For the CG/quasi-Newton family that step is `α_{k−1}`
/// along `d_{k−1}`; for FOM/DIOM it is `ζ_k p_k`, with pivot `u_{k,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterRecord<T> {
    pub k: usize,
    pub res_norm: T,
    pub rel_res: T,
    pub q: T,
    pub alpha: Option<T>,
    pub curvature: Option<T>,
    pub gamma: Option<T>,
    pub u_kk: Option<T>,
    pub zeta: Option<T>,
}

/// Vectors captured per row when [`SolveOptions::keep_vectors`] is set.
#[derive(Clone, Debug, PartialEq)]
pub struct StepVectors<T> {
    pub x: Vec<T>,
    /// Gradient `g_k = A x_k − b` as tracked by the method.
    pub g: Vec<T>,
    /// Direction of the step that produced `x_k` (`d_{k−1}` or `p_k`).
    pub direction: Option<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveTrace<T> {
    records: Vec<IterRecord<T>>,
    vectors: Vec<StepVectors<T>>,
    status: Option<SolveStatus>,
}

impl<T> Default for SolveTrace<T> {
    fn default() -> Self {
        Self {
            records: Vec::new(),
            vectors: Vec::new(),
            status: None,
        }
    }
}

impl<T: Real> SolveTrace<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record. Panics if `k` does not strictly increase.
    pub fn push(&mut self, record: IterRecord<T>) {
        if let Some(last) = self.records.last() {
            assert!(record.k > last.k, "trace indices must strictly increase");
        }
        assert!(self.status.is_none(), "trace already finished");
        self.records.push(record);
    }

    pub fn push_vectors(&mut self, v: StepVectors<T>) {
        self.vectors.push(v);
    }

    /// Sets the final status. Panics if called twice.
    pub fn finish(&mut self, status: SolveStatus) {
        assert!(self.status.is_none(), "trace already has a final status");
        self.status = Some(status);
    }

    pub fn status(&self) -> Option<SolveStatus> {
        self.status
    }

    pub fn records(&self) -> &[IterRecord<T>] {
        &self.records
    }

    pub fn vectors(&self) -> &[StepVectors<T>] {
        &self.vectors
    }

    /// Number of completed iterations (rows minus the initial row).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterRecord<T>> {
        self.records.last()
    }

    /// First iteration whose relative residual is at or below `threshold`.
    pub fn iterations_to(&self, threshold: T) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.rel_res <= threshold)
            .map(|r| r.k)
    }
}

/// Which residual norm the driver monitors and records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ResidualMonitor {
    /// The method's own (recursive or formula-based) residual.
    #[default]
    Method,
    /// `‖b − A x_k‖` recomputed each iteration (one extra operator application).
    Direct,
}

#[derive(Clone, Debug)]
pub struct SolveOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_iter: usize,
    pub keep_vectors: bool,
    pub monitor: ResidualMonitor,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::of(1e-8),
            atol: T::zero(),
            max_iter: 10_000,
            keep_vectors: false,
            monitor: ResidualMonitor::Method,
        }
    }
}

impl<T: Real> SolveOptions<T> {
    pub fn with_rtol(mut self, rtol: T) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_atol(mut self, atol: T) -> Self {
        self.atol = atol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn keeping_vectors(mut self) -> Self {
        self.keep_vectors = true;
        self
    }

    pub fn with_monitor(mut self, monitor: ResidualMonitor) -> Self {
        self.monitor = monitor;
        self
    }

    /// `max(atol, rtol · ‖b‖)`
    pub fn threshold(&self, bnorm: T) -> T {
        self.atol.max(self.rtol * bnorm)
    }
}

/// Optional quantities attached to one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepInfo<T> {
    pub alpha: Option<T>,
    pub curvature: Option<T>,
    pub gamma: Option<T>,
    pub u_kk: Option<T>,
    pub zeta: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Advance<T> {
    Step(StepInfo<T>),
    Stop(SolveStatus),
}

/// One iteration at a time of a linear solver; [`drive`] turns it into a solve.
pub trait Stepper<T: Real> {
    fn x(&self) -> &[T];

    /// Gradient `A x − b` as tracked by the method.
    fn gradient(&self) -> Vec<T>;

    /// The method's residual-norm estimate at the current iterate.
    fn residual_estimate(&self) -> T;

    /// Direction of the last step, if any.
    fn last_direction(&self) -> Option<&[T]>;

    fn advance(&mut self) -> Advance<T>;

    /// Called when the estimate meets `tol`; return `false` to keep iterating.
    fn confirm_convergence(&mut self, _tol: T) -> bool {
        true
    }
}

/// Runs `stepper` until convergence, failure, or `max_iter` steps.
pub fn drive<T: Real, S: Stepper<T>>(
    stepper: &mut S,
    model: &QuadraticModel<'_, T>,
    opts: &SolveOptions<T>,
) -> SolveTrace<T> {
    let bnorm = norm(model.b());
    let tol = opts.threshold(bnorm);
    let mut trace = SolveTrace::new();
    let mut k = 0usize;
    let mut info = StepInfo::default();
    loop {
        let g = stepper.gradient();
        let res = match opts.monitor {
            ResidualMonitor::Method => stepper.residual_estimate(),
            ResidualMonitor::Direct => {
                let ax = model.apply(stepper.x());
                norm(&sub(model.b(), &ax))
            }
        };
        let rel = if bnorm > T::zero() { res / bnorm } else { res };
        trace.push(IterRecord {
            k,
            res_norm: res,
            rel_res: rel,
            q: model.value_from_gradient(stepper.x(), &g),
            alpha: info.alpha,
            curvature: info.curvature,
            gamma: info.gamma,
            u_kk: info.u_kk,
            zeta: info.zeta,
        });
        if opts.keep_vectors {
            trace.push_vectors(StepVectors {
                x: stepper.x().to_vec(),
                g,
                direction: stepper.last_direction().map(<[T]>::to_vec),
            });
        }
        if res <= tol
            && (opts.monitor == ResidualMonitor::Direct || stepper.confirm_convergence(tol))
        {
            trace.finish(SolveStatus::Converged);
            return trace;
        }
        if k >= opts.max_iter {
            trace.finish(SolveStatus::MaxIterations);
            return trace;
        }
        match stepper.advance() {
            Advance::Step(step) => info = step,
            Advance::Stop(status) => {
                trace.finish(status);
                return trace;
            }
        }
        k += 1;
    }
}
