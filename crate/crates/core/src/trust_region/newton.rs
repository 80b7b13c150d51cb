//! Newton trust-region method with truncated subproblem solvers.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::krylov::Window;
use crate::linalg::{add, norm};
use crate::operator::LinearOperator;
use crate::quadratic::QuadraticModel;
use crate::trust_region::{
    steihaug_tcg, tr_diom, tr_lbfgs, SubproblemOptions, SubproblemResult, SubproblemStatus,
};

/// A twice-differentiable objective with Hessian-vector products.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, z: &[f64]) -> Result<f64>;

    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>>;

    /// `∇²f(z) v`, or a symmetric approximation of it.
    fn hvp(&self, z: &[f64], v: &[f64]) -> Vec<f64>;
}

/// [`Objective`] assembled from three closures.
pub struct FnObjective<F, G, H> {
    n: usize,
    f: F,
    g: G,
    h: H,
}

impl<F, G, H> FnObjective<F, G, H>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
    H: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(n: usize, f: F, g: G, h: H) -> Self {
        Self { n, f, g, h }
    }
}

impl<F, G, H> Objective for FnObjective<F, G, H>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
    H: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[f64]) -> Result<f64> {
        Ok((self.f)(z))
    }
    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok((self.g)(z))
    }
    fn hvp(&self, z: &[f64], v: &[f64]) -> Vec<f64> {
        (self.h)(z, v)
    }
}

struct Hessian<'a, O: ?Sized> {
    obj: &'a O,
    z: &'a [f64],
}

impl<O: Objective + ?Sized> LinearOperator<f64> for Hessian<'_, O> {
    fn dim(&self) -> usize {
        self.obj.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.obj.hvp(self.z, x));
    }
}

/// Inner solver used for each trust-region subproblem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsolver {
    Tcg,
    Lbfgs(usize),
    Diom(usize),
}

impl Subsolver {
    pub fn solve(
        self,
        model: &QuadraticModel<'_, f64>,
        delta: f64,
        opts: &SubproblemOptions<f64>,
    ) -> Result<SubproblemResult<f64>> {
        match self {
            Subsolver::Tcg => steihaug_tcg(model, delta, opts),
            Subsolver::Lbfgs(m) => tr_lbfgs(model, delta, m, opts),
            Subsolver::Diom(m) => tr_diom(model, delta, Window::Limited(m), opts),
        }
    }
}

impl std::fmt::Display for Subsolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Subsolver::Tcg => f.pad("tcg"),
            Subsolver::Lbfgs(m) => f.pad(&format!("trlbfgs({m})")),
            Subsolver::Diom(m) => f.pad(&format!("trdiom({m})")),
        }
    }
}

impl std::str::FromStr for Subsolver {
    type Err = Error;

    /// Accepts `tcg`, `trlbfgs[:m]` and `trdiom[:m]`; `m` defaults to 5.
    fn from_str(s: &str) -> Result<Self> {
        let (name, m) = match s.split_once(':') {
            Some((name, m)) => (
                name,
                m.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad memory in '{s}'")))?,
            ),
            None => (s, 5),
        };
        match name {
            "tcg" => Ok(Subsolver::Tcg),
            "trlbfgs" | "lbfgs" => Ok(Subsolver::Lbfgs(m)),
            "trdiom" | "diom" => Ok(Subsolver::Diom(m)),
            _ => Err(Error::InvalidArgument(format!("unknown subsolver '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrustRegionConfig {
    pub delta0: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Stop when `‖∇f(z)‖ ≤ gtol`.
    pub gtol: f64,
    pub max_iter: usize,
    /// Inner iteration cap; `None` means `max(2n, 10)`.
    pub inner_max_iter: Option<usize>,
    /// Radius below which the solve stops with [`TrStatus::RadiusUnderflow`].
    pub min_radius: f64,
}

impl Default for TrustRegionConfig {
    fn default() -> Self {
        Self {
            delta0: 1.0,
            eta1: 0.25,
            eta2: 0.75,
            gtol: 1e-5,
            max_iter: 1000,
            inner_max_iter: None,
            min_radius: 1e-15,
        }
    }
}

impl TrustRegionConfig {
    pub const SHRINK: f64 = 0.25;
    pub const GROW: f64 = 2.0;

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.delta0 > 0.0) {
            return bad("Δ₀ must be positive");
        }
        if !(0.0 < self.eta1 && self.eta1 < self.eta2 && self.eta2 < 1.0) {
            return bad("need 0 < η₁ < η₂ < 1");
        }
        if !(self.gtol > 0.0) {
            return bad("gradient tolerance must be positive");
        }
        Ok(())
    }
}

/// Relative inner tolerance for gradient norm `gnorm`: `max(1e-12, min(0.1, √gnorm))`.
pub fn forcing_rtol(gnorm: f64) -> f64 {
    gnorm.sqrt().min(0.1).max(1e-12)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrStatus {
    Converged,
    MaxIterations,
    RadiusUnderflow,
    /// The subproblem returned a step with no model decrease.
    Stagnation,
}

impl std::fmt::Display for TrStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            TrStatus::Converged => "converged",
            TrStatus::MaxIterations => "max_iterations",
            TrStatus::RadiusUnderflow => "radius_underflow",
            TrStatus::Stagnation => "stagnation",
        })
    }
}

/// One outer iteration.
#[derive(Clone, Debug, Serialize)]
pub struct TrIteration {
    pub j: usize,
    /// `f(z_j)` and `‖∇f(z_j)‖` at the start of the iteration.
    pub f: f64,
    pub gnorm: f64,
    pub delta: f64,
    pub step_norm: f64,
    pub predicted: f64,
    pub actual: f64,
    pub rho: f64,
    pub accepted: bool,
    pub inner_status: SubproblemStatus,
    pub inner_iterations: usize,
    pub inner_hvps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrResult {
    pub z: Vec<f64>,
    pub f: f64,
    pub gnorm: f64,
    pub status: TrStatus,
    pub log: Vec<TrIteration>,
    pub obj_evals: usize,
    pub grad_evals: usize,
    pub hvp_evals: usize,
}

impl TrResult {
    pub fn iterations(&self) -> usize {
        self.log.len()
    }
}

/// Minimizes `obj` from `z0`.
///
/// A trial point where the objective cannot be evaluated counts as a
/// rejected step.
pub fn tr_newton<O: Objective + ?Sized>(
    obj: &O,
    z0: &[f64],
    config: &TrustRegionConfig,
    subsolver: Subsolver,
) -> Result<TrResult> {
    config.validate()?;
    let n = obj.dim();
    check_dim(n, z0.len())?;
    let inner_max = config.inner_max_iter.unwrap_or((2 * n).max(10));
    let mut z = z0.to_vec();
    let mut f = obj.value(&z)?;
    let mut g = obj.gradient(&z)?;
    let (mut obj_evals, mut grad_evals, mut hvp_evals) = (1, 1, 0);
    let mut delta = config.delta0;
    let mut log = Vec::new();
    let status = loop {
        let gnorm = norm(&g);
        if gnorm <= config.gtol {
            break TrStatus::Converged;
        }
        if log.len() >= config.max_iter {
            break TrStatus::MaxIterations;
        }
        if delta < config.min_radius {
            break TrStatus::RadiusUnderflow;
        }
        let hess = Hessian { obj, z: &z };
        let b: Vec<f64> = g.iter().map(|v| -v).collect();
        let model = QuadraticModel::new(&hess, b, f)?;
        let opts = SubproblemOptions::default()
            .with_rtol(forcing_rtol(gnorm))
            .with_max_iter(inner_max);
        let sub = subsolver.solve(&model, delta, &opts)?;
        hvp_evals += sub.hvps;
        let predicted = sub.decrease;
        let mut it = TrIteration {
            j: log.len(),
            f,
            gnorm,
            delta,
            step_norm: norm(&sub.x),
            predicted,
            actual: f64::NAN,
            rho: f64::NAN,
            accepted: false,
            inner_status: sub.status,
            inner_iterations: sub.iterations,
            inner_hvps: sub.hvps,
        };
        if !(predicted > 0.0) {
            log.push(it);
            break TrStatus::Stagnation;
        }
        let trial = add(&z, &sub.x);
        obj_evals += 1;
        let f_trial = obj.value(&trial).ok().filter(|v| v.is_finite());
        let actual = f_trial.map_or(f64::NEG_INFINITY, |ft| f - ft);
        let rho = actual / predicted;
        it.actual = actual;
        it.rho = rho;
        if rho < config.eta1 {
            delta *= TrustRegionConfig::SHRINK;
        } else if rho >= config.eta2 {
            delta *= TrustRegionConfig::GROW;
        }
        if rho >= config.eta1 {
            z = trial;
            f = f_trial.expect("accepted trial has a finite value");
            g = obj.gradient(&z)?;
            grad_evals += 1;
            it.accepted = true;
        }
        log.push(it);
    };
    Ok(TrResult {
        gnorm: norm(&g),
        z,
        f,
        status,
        log,
        obj_evals,
        grad_evals,
        hvp_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_norm_sq() -> impl Objective {
        FnObjective::new(
            3,
            |z: &[f64]| 0.5 * z.iter().map(|v| v * v).sum::<f64>(),
            |z: &[f64]| z.to_vec(),
            |_: &[f64], v: &[f64]| v.to_vec(),
        )
    }

    #[test]
    fn quadratic_converges_in_one_step() {
        let obj = half_norm_sq();
        for sub in [Subsolver::Tcg, Subsolver::Lbfgs(3), Subsolver::Diom(2)] {
            let r = tr_newton(&obj, &[0.3, -0.4, 0.5], &TrustRegionConfig::default(), sub).unwrap();
            assert_eq!(r.status, TrStatus::Converged);
            assert_eq!(r.iterations(), 1);
            assert!(r.log[0].accepted);
            assert!((r.log[0].rho - 1.0).abs() < 1e-12);
            assert!(r.gnorm < 1e-12);
        }
    }

    #[test]
    fn ratio_one_doubles_radius() {
        // Start outside the unit ball: the first step is truncated, ρ = 1.
        let obj = half_norm_sq();
        let r = tr_newton(
            &obj,
            &[3.0, 0.0, 4.0],
            &TrustRegionConfig::default(),
            Subsolver::Tcg,
        )
        .unwrap();
        assert_eq!(r.status, TrStatus::Converged);
        assert_eq!(r.log[0].inner_status, SubproblemStatus::Boundary);
        assert_eq!(r.log[1].delta, 2.0);
        assert_eq!(r.log[2].delta, 4.0);
    }

    #[test]
    fn subsolver_names_parse() {
        assert_eq!("tcg".parse::<Subsolver>().unwrap(), Subsolver::Tcg);
        assert_eq!(
            "trlbfgs:7".parse::<Subsolver>().unwrap(),
            Subsolver::Lbfgs(7)
        );
        assert_eq!("trdiom".parse::<Subsolver>().unwrap(), Subsolver::Diom(5));
        assert!("newton".parse::<Subsolver>().is_err());
        assert_eq!(Subsolver::Diom(3).to_string(), "trdiom(3)");
    }

    #[test]
    fn config_validation() {
        let mut c = TrustRegionConfig::default();
        assert!(c.validate().is_ok());
        c.eta1 = 0.8;
        assert!(c.validate().is_err());
    }

    #[test]
    fn forcing_sequence() {
        assert_eq!(forcing_rtol(4.0), 0.1);
        assert_eq!(forcing_rtol(1e-4), 1e-2);
        assert_eq!(forcing_rtol(0.0), 1e-12);
    }
}
