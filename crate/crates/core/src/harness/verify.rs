//! Seeded verification suites, one per family of solver invariants.
//!
//! Every check is tagged with the id of the invariant it exercises; the
//! [`MANIFEST`] lists all ids and [`Suite::covers`] assigns them to suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::broyden::{broyden_run, broyden_update, gamma_next_sr1, secant_defect, PhiSchedule};
use crate::dense::{orthogonal_factor, DenseMatrix};
use crate::error::{Error, Result};
use crate::krylov::{
    diom_identity_report, diom_solve, fom_solve, fom_solve_checked, pcg_solve, ArnoldiBasis,
    DiomWindow, Window,
};
use crate::limited_memory::{lbfgs_solve, Lbfgs, LbfgsMemory, Lsr1};
use crate::linalg::{dot, norm, rel_diff, scaled, sub};
use crate::operator::{
    linearity_defect, symmetry_defect, CsrMatrix, DiagonalOperator, IdentityOperator,
    LinearOperator, Preconditioner,
};
use crate::problems::{
    check_derivatives, synthetic_spd_with, AssimilationConfig, AssimilationProblem,
    ClassificationProblem, Rosenbrock, Spectrum,
};
use crate::quadratic::{q_gradient, q_value, QuadraticModel};
use crate::trace::{SolveOptions, SolveStatus, SolveTrace, Stepper};
use crate::trust_region::{
    steihaug_tcg, tr_diom, tr_lbfgs, tr_newton, Objective, SubproblemOptions, SubproblemResult,
    Subsolver, TrResult, TrustRegionConfig,
};

/// One invariant the suites must cover.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Invariant {
    pub id: &'static str,
    pub statement: &'static str,
}

pub const MANIFEST: &[Invariant] = &[
    Invariant {
        id: "core.operator_structure",
        statement: "library operators pass sampled linearity and symmetry checks",
    },
    Invariant {
        id: "core.directional_derivative",
        statement: "central differences of q match the gradient along d",
    },
    Invariant {
        id: "broyden.hereditary_secant",
        statement: "H_{k+1} y_i = s_i for every earlier pair",
    },
    Invariant {
        id: "broyden.direction_collinearity",
        statement: "Broyden directions are parallel to PCG directions; iterates coincide",
    },
    Invariant {
        id: "broyden.gamma_recurrence",
        statement: "measured γ_k matches the γ recurrence",
    },
    Invariant {
        id: "broyden.steplength_ordering",
        statement: "step lengths order inversely to φ and dominate α^PCG",
    },
    Invariant {
        id: "broyden.gamma_special_cases",
        statement: "BFGS γ = 1; DFP and SR1 γ follow their closed forms",
    },
    Invariant {
        id: "broyden.quadratic_termination",
        statement: "CG, BFGS, DFP and FOM finish within n steps; SR1 recovers A⁻¹",
    },
    Invariant {
        id: "limited_memory.lbfgs_pcg_coincidence",
        statement: "LBFGS(m) directions, steps and iterates match PCG",
    },
    Invariant {
        id: "limited_memory.dense_bfgs_match",
        statement: "two-loop recursion equals dense BFGS when m ≥ k",
    },
    Invariant {
        id: "limited_memory.memory_accounting",
        statement: "stored vectors are 2+2m for LBFGS and 2+m for LSR1",
    },
    Invariant {
        id: "krylov.iterate_coincidence",
        statement: "FOM and DIOM(m) iterates match PCG",
    },
    Invariant {
        id: "krylov.window_orthogonality",
        statement: "windowed basis vectors are unit and mutually orthogonal",
    },
    Invariant {
        id: "krylov.diom_conjugacy",
        statement: "DIOM p-directions are A-conjugate within the window, pivots positive",
    },
    Invariant {
        id: "krylov.residual_identity",
        statement: "formula residuals agree with direct residuals",
    },
    Invariant {
        id: "krylov.diom_pcg_identities",
        statement: "u_{k+1,k+1}α_k = 1, alternating ζ and slopes, recovered PCG directions",
    },
    Invariant {
        id: "trust_region.feasibility_decrease",
        statement: "subproblem steps stay in the ball and decrease the model",
    },
    Invariant {
        id: "trust_region.path_monotonicity",
        statement: "inner q decreases and ‖x_k‖ grows along the path",
    },
    Invariant {
        id: "trust_region.unconstrained_pcg",
        statement: "with Δ = ∞ every subsolver reproduces PCG",
    },
    Invariant {
        id: "trust_region.outer_monotone",
        statement: "f never increases over accepted steps; rejections keep z",
    },
    Invariant {
        id: "problems.gradient_fd",
        statement: "problem gradients pass central-difference checks",
    },
    Invariant {
        id: "problems.hvp_symmetry",
        statement: "Hessian-vector products are symmetric and match gradient differences",
    },
    Invariant {
        id: "problems.assimilation_nonnegative",
        statement: "assimilation objective is nonnegative and exact fits leave the background term",
    },
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Gamma,
    Steplen,
    Secant,
    LbfgsCg,
    DiomIdentities,
    QuadraticTermination,
    TrMonotonicity,
    Operators,
    Derivatives,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Gamma,
        Suite::Steplen,
        Suite::Secant,
        Suite::LbfgsCg,
        Suite::DiomIdentities,
        Suite::QuadraticTermination,
        Suite::TrMonotonicity,
        Suite::Operators,
        Suite::Derivatives,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gamma => "gamma",
            Suite::Steplen => "steplen",
            Suite::Secant => "secant",
            Suite::LbfgsCg => "lbfgs-cg",
            Suite::DiomIdentities => "diom-identities",
            Suite::QuadraticTermination => "quadratic-termination",
            Suite::TrMonotonicity => "tr-monotonicity",
            Suite::Operators => "operators",
            Suite::Derivatives => "derivatives",
        }
    }

    /// Manifest ids this suite checks.
    pub fn covers(self) -> &'static [&'static str] {
        match self {
            Suite::Gamma => &[
                "broyden.direction_collinearity",
                "broyden.gamma_recurrence",
                "broyden.gamma_special_cases",
            ],
            Suite::Steplen => &["broyden.steplength_ordering"],
            Suite::Secant => &["broyden.hereditary_secant"],
            Suite::LbfgsCg => &[
                "limited_memory.lbfgs_pcg_coincidence",
                "limited_memory.dense_bfgs_match",
                "limited_memory.memory_accounting",
            ],
            Suite::DiomIdentities => &[
                "krylov.iterate_coincidence",
                "krylov.window_orthogonality",
                "krylov.diom_conjugacy",
                "krylov.residual_identity",
                "krylov.diom_pcg_identities",
            ],
            Suite::QuadraticTermination => &["broyden.quadratic_termination"],
            Suite::TrMonotonicity => &[
                "trust_region.feasibility_decrease",
                "trust_region.path_monotonicity",
                "trust_region.unconstrained_pcg",
                "trust_region.outer_monotone",
            ],
            Suite::Operators => &["core.operator_structure", "core.directional_derivative"],
            Suite::Derivatives => &[
                "problems.gradient_fd",
                "problems.hvp_symmetry",
                "problems.assimilation_nonnegative",
            ],
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyParams {
    pub n: usize,
    pub kappa: f64,
    pub seed: u64,
    /// Seeded instances per property.
    pub instances: usize,
    pub spectrum: Spectrum,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            n: 20,
            kappa: 100.0,
            seed: 0,
            instances: 3,
            spectrum: Spectrum::Linear,
        }
    }
}

/// A single measured property; passes when `value ≤ tol`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub invariant: &'static str,
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    fn le(invariant: &'static str, name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            invariant,
            name: name.into(),
            value,
            tol,
            passed: value <= tol,
        }
    }

    fn holds(invariant: &'static str, name: impl Into<String>, ok: bool) -> Self {
        Self::le(invariant, name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub params: VerifyParams,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn verify(suite: Suite, params: &VerifyParams) -> Result<VerifyReport> {
    if params.n < 2 || !(params.kappa >= 1.0) || params.instances == 0 {
        return Err(Error::InvalidArgument(
            "verify needs n >= 2, κ >= 1 and at least one instance".into(),
        ));
    }
    let mut checks = Vec::new();
    let c = &mut checks;
    match suite {
        Suite::Gamma => gamma_suite(params, c)?,
        Suite::Steplen => steplen_suite(params, c)?,
        Suite::Secant => secant_suite(params, c)?,
        Suite::LbfgsCg => lbfgs_suite(params, c)?,
        Suite::DiomIdentities => diom_suite(params, c)?,
        Suite::QuadraticTermination => termination_suite(params, c)?,
        Suite::TrMonotonicity => tr_suite(params, c)?,
        Suite::Operators => operator_suite(params, c)?,
        Suite::Derivatives => derivative_suite(params, c)?,
    }
    Ok(VerifyReport {
        suite,
        params: params.clone(),
        checks,
    })
}

/// Seeded SPD matrix with spectrum in `[1/κ, 1]` and a Gaussian right-hand side.
pub fn spd_instance(
    n: usize,
    kappa: f64,
    spectrum: Spectrum,
    seed: u64,
) -> Result<(DenseMatrix<f64>, Vec<f64>)> {
    let a = synthetic_spd_with(n, kappa, spectrum, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(7));
    let b = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Ok((a, b))
}

/// Lockstep comparisons of vectors that shrink with the residual (directions,
/// angles, secant pairs) are made only on rows whose PCG relative residual is
/// at least this. Below it, rounding in quantities of size `‖r_k‖` gives
/// relative errors near `ε κ / ‖r_k‖`, which no longer reflects the method.
pub const RESIDUAL_FLOOR: f64 = 1e-4;

fn above_floor(pcg: &SolveTrace<f64>, k: usize) -> bool {
    pcg.records()
        .get(k)
        .is_some_and(|r| r.rel_res >= RESIDUAL_FLOOR)
}

fn comparison_options() -> SolveOptions<f64> {
    SolveOptions::default().with_rtol(1e-10).keeping_vectors()
}

/// `max_k ‖x_k − y_k‖ / ‖y_k‖` over the first `kmax + 1` shared rows.
pub fn max_iterate_gap(a: &SolveTrace<f64>, b: &SolveTrace<f64>, kmax: usize) -> f64 {
    a.vectors()
        .iter()
        .zip(b.vectors())
        .take(kmax + 1)
        .map(|(u, v)| rel_diff(&u.x, &v.x))
        .fold(0.0, f64::max)
}

fn instances(p: &VerifyParams) -> impl Iterator<Item = u64> + '_ {
    (0..p.instances as u64).map(move |i| p.seed.wrapping_add(i))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn gamma_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let kmax = p.n.min(40);
    let opts = comparison_options();
    for seed in instances(p) {
        let (a, b) = spd_instance(p.n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b, 0.0)?;
        let x0 = vec![0.0; p.n];
        let (_, pcg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
        for (label, schedule) in [
            ("bfgs", PhiSchedule::Bfgs),
            ("dfp", PhiSchedule::Dfp),
            ("phi=0.5", PhiSchedule::Constant(0.5)),
        ] {
            let run = broyden_run(
                &model,
                &x0,
                Preconditioner::identity(),
                schedule,
                true,
                &opts,
            )?;
            let steps = &run.steps[..run.steps.len().min(kmax)];
            out.push(Check::le(
                "broyden.direction_collinearity",
                format!("seed {seed}: {label} iterates vs PCG"),
                max_iterate_gap(&run.trace, &pcg, kmax),
                1e-8,
            ));
            let worst_angle = steps
                .iter()
                .filter(|s| above_floor(&pcg, s.k))
                .filter_map(|s| s.angle)
                .fold(0.0, f64::max);
            out.push(Check::le(
                "broyden.direction_collinearity",
                format!("seed {seed}: {label} angle to PCG direction"),
                worst_angle,
                1e-6,
            ));
            let gap = steps
                .iter()
                .filter_map(|s| s.gamma_measured.map(|g| rel(g, s.gamma_recurrence)))
                .fold(0.0, f64::max);
            if label == "bfgs" {
                let unit = steps
                    .iter()
                    .filter_map(|s| s.gamma_measured.map(|g| (g - 1.0).abs()))
                    .fold(0.0, f64::max);
                out.push(Check::le(
                    "broyden.gamma_special_cases",
                    format!("seed {seed}: bfgs γ = 1"),
                    unit,
                    1e-10,
                ));
            } else {
                out.push(Check::le(
                    "broyden.gamma_recurrence",
                    format!("seed {seed}: {label} measured γ vs recurrence"),
                    gap,
                    1e-6,
                ));
            }
            if label == "dfp" {
                // γ_{k+1} = γ_k ρ_k / (γ_k ρ_k + ρ_{k+1}) from measured γ_k.
                let worst = steps
                    .windows(2)
                    .filter_map(|w| {
                        let (g0, g1) = (w[0].gamma_measured?, w[1].gamma_measured?);
                        let closed = g0 * w[0].rho / (g0 * w[0].rho + w[0].rho_next);
                        Some(rel(g1, closed))
                    })
                    .fold(0.0, f64::max);
                out.push(Check::le(
                    "broyden.gamma_special_cases",
                    format!("seed {seed}: dfp closed form"),
                    worst,
                    1e-6,
                ));
            }
        }
        let sr1 = broyden_run(
            &model,
            &x0,
            Preconditioner::identity(),
            PhiSchedule::Sr1,
            true,
            &opts,
        )?;
        let steps = &sr1.steps[..sr1.steps.len().min(kmax)];
        let worst = steps
            .windows(2)
            .filter_map(|w| {
                let (g0, g1, a) = (w[0].gamma_measured?, w[1].gamma_measured?, w[0].alpha_pcg?);
                let closed = gamma_next_sr1(g0, a, w[0].rho, w[0].rho_next).ok()?;
                Some(rel(g1, closed))
            })
            .fold(0.0, f64::max);
        out.push(Check::le(
            "broyden.gamma_special_cases",
            format!("seed {seed}: sr1 closed form"),
            worst,
            1e-6,
        ));
    }
    Ok(())
}

fn steplen_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let opts = comparison_options();
    let kmax = p.n.min(40);
    for seed in instances(p) {
        let (a, b) = spd_instance(p.n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b, 0.0)?;
        let x0 = vec![0.0; p.n];
        let mut alphas = Vec::new();
        for phi in [0.0, 0.5, 1.0] {
            let run = broyden_run(
                &model,
                &x0,
                Preconditioner::identity(),
                PhiSchedule::Constant(phi),
                true,
                &opts,
            )?;
            let steps: Vec<_> = run.steps.into_iter().take(kmax).collect();
            let worst = steps
                .iter()
                .filter_map(|s| s.alpha_pcg.map(|ap| ap - s.alpha))
                .fold(f64::NEG_INFINITY, f64::max);
            let positive = steps.iter().all(|s| s.alpha_pcg.is_some_and(|ap| ap > 0.0));
            out.push(Check::le(
                "broyden.steplength_ordering",
                format!("seed {seed}: α^PCG ≤ α^φ for φ = {phi}"),
                worst,
                1e-12,
            ));
            out.push(Check::holds(
                "broyden.steplength_ordering",
                format!("seed {seed}: α^PCG > 0 for φ = {phi}"),
                positive,
            ));
            alphas.push((phi, steps.iter().map(|s| s.alpha).collect::<Vec<f64>>()));
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let (lo, a1) = &alphas[i];
            let (hi, a2) = &alphas[j];
            let worst = a1
                .iter()
                .zip(a2)
                .map(|(x, y)| y - x)
                .fold(f64::NEG_INFINITY, f64::max);
            out.push(Check::le(
                "broyden.steplength_ordering",
                format!("seed {seed}: α(φ={hi}) ≤ α(φ={lo})"),
                worst,
                1e-12,
            ));
        }
    }
    Ok(())
}

fn secant_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let opts = SolveOptions::default().with_rtol(RESIDUAL_FLOOR);
    for seed in instances(p) {
        let (a, b) = spd_instance(p.n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b, 0.0)?;
        let x0 = vec![0.0; p.n];
        for (label, schedule) in [
            ("bfgs", PhiSchedule::Bfgs),
            ("dfp", PhiSchedule::Dfp),
            ("phi=0.5", PhiSchedule::Constant(0.5)),
            ("sr1", PhiSchedule::Sr1),
        ] {
            let run = broyden_run(
                &model,
                &x0,
                Preconditioner::identity(),
                schedule,
                false,
                &opts,
            )?;
            // The last pair only feeds an update when the run continues past it.
            let used = run.state.k().min(run.pairs.len());
            let defect = secant_defect(run.state.h(), &run.pairs[..used]);
            out.push(Check::le(
                "broyden.hereditary_secant",
                format!("seed {seed}: {label} after {used} updates"),
                defect,
                1e-8,
            ));
        }
    }
    Ok(())
}

fn lbfgs_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let opts = comparison_options();
    let kmax = p.n.min(40);
    for seed in instances(p) {
        let (a, b) = spd_instance(p.n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b.clone(), 0.0)?;
        let x0 = vec![0.0; p.n];
        let (_, pcg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
        for m in [1, 5, p.n] {
            let (_, run) = lbfgs_solve(&model, &x0, m, Preconditioner::identity(), &opts)?;
            out.push(Check::le(
                "limited_memory.lbfgs_pcg_coincidence",
                format!("seed {seed}: LBFGS({m}) iterates"),
                max_iterate_gap(&run, &pcg, kmax),
                1e-8,
            ));
            let dir_gap = run
                .vectors()
                .iter()
                .zip(pcg.vectors())
                .take(kmax + 1)
                .enumerate()
                .filter(|(k, _)| above_floor(&pcg, *k))
                .filter_map(|(_, (u, v))| {
                    Some(rel_diff(u.direction.as_deref()?, v.direction.as_deref()?))
                })
                .fold(0.0, f64::max);
            out.push(Check::le(
                "limited_memory.lbfgs_pcg_coincidence",
                format!("seed {seed}: LBFGS({m}) directions"),
                dir_gap,
                1e-8,
            ));
            let step_gap = run
                .records()
                .iter()
                .zip(pcg.records())
                .take(kmax + 1)
                .filter_map(|(u, v)| Some(rel(u.alpha?, v.alpha?)))
                .fold(0.0, f64::max);
            out.push(Check::le(
                "limited_memory.lbfgs_pcg_coincidence",
                format!("seed {seed}: LBFGS({m}) step lengths"),
                step_gap,
                1e-8,
            ));
        }

        // Two-loop recursion against dense BFGS built from the same pairs.
        let k = p.n.min(6);
        let run = broyden_run(
            &model,
            &x0,
            Preconditioner::identity(),
            PhiSchedule::Bfgs,
            false,
            &SolveOptions::default()
                .with_rtol(0.0)
                .with_atol(f64::MIN_POSITIVE)
                .with_max_iter(k),
        )?;
        let mut mem = LbfgsMemory::new(k, Preconditioner::identity())?;
        let mut h = DenseMatrix::identity(p.n);
        for (s, y) in &run.pairs {
            mem.push(s, y)?;
            broyden_update(&mut h, s, y, 1.0)?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..p.n).map(|_| rng.sample(StandardNormal)).collect();
        out.push(Check::le(
            "limited_memory.dense_bfgs_match",
            format!(
                "seed {seed}: two-loop vs dense after {} pairs",
                run.pairs.len()
            ),
            rel_diff(&mem.apply(&v), &h.matvec(&v)),
            1e-9,
        ));

        let m = 3.min(p.n - 1).max(1);
        let mut lb = Lbfgs::new(&model, &x0, m, Preconditioner::identity())?;
        let mut ls = Lsr1::new(&model, &x0, m, Preconditioner::identity())?;
        for _ in 0..=m {
            lb.advance();
            ls.advance();
        }
        out.push(Check::holds(
            "limited_memory.memory_accounting",
            format!(
                "seed {seed}: LBFGS({m}) stores {} = 2+2m vectors",
                lb.stored_vectors()
            ),
            lb.stored_vectors() == 2 + 2 * m,
        ));
        out.push(Check::holds(
            "limited_memory.memory_accounting",
            format!(
                "seed {seed}: LSR1({m}) stores {} = 2+m vectors",
                ls.stored_vectors()
            ),
            ls.stored_vectors() == 2 + m || ls.memory().skipped() > 0,
        ));
    }
    Ok(())
}

fn diom_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let opts = comparison_options();
    let kmax = p.n.min(40);
    for seed in instances(p) {
        let (a, b) = spd_instance(p.n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b.clone(), 0.0)?;
        let x0 = vec![0.0; p.n];
        let (_, pcg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
        let (_, fom, gap) = fom_solve_checked(&model, &x0, &opts)?;
        out.push(Check::le(
            "krylov.iterate_coincidence",
            format!("seed {seed}: FOM iterates"),
            max_iterate_gap(&fom, &pcg, kmax),
            1e-8,
        ));
        out.push(Check::le(
            "krylov.residual_identity",
            format!("seed {seed}: FOM residual identity"),
            gap,
            1e-8,
        ));
        for m in [1, 5, p.n] {
            let (_, diom) = diom_solve(&model, &x0, Window::Limited(m), &opts)?;
            out.push(Check::le(
                "krylov.iterate_coincidence",
                format!("seed {seed}: DIOM({m}) iterates"),
                max_iterate_gap(&diom, &pcg, kmax),
                1e-8,
            ));
            let bn = norm(&b);
            let res_gap = diom
                .records()
                .iter()
                .zip(diom.vectors())
                .map(|(r, v)| (r.res_norm - norm(&sub(&b, &a.matvec(&v.x)))).abs() / bn)
                .fold(0.0, f64::max);
            out.push(Check::le(
                "krylov.residual_identity",
                format!("seed {seed}: DIOM({m}) formula vs direct residual"),
                res_gap,
                1e-8,
            ));
            let len = diom.records().len().min(pcg.records().len());
            let rep = diom_identity_report(&truncate(&diom, len), &truncate(&pcg, len))?;
            let floor_len = (0..len)
                .take_while(|&k| above_floor(&pcg, k))
                .count()
                .max(1);
            let floored =
                diom_identity_report(&truncate(&diom, floor_len), &truncate(&pcg, floor_len))?;
            out.push(Check::le(
                "krylov.diom_pcg_identities",
                format!("seed {seed}: DIOM({m}) pivot u·α − 1"),
                rep.max_pivot_deviation,
                1e-7,
            ));
            out.push(Check::le(
                "krylov.diom_pcg_identities",
                format!("seed {seed}: DIOM({m}) recovered PCG directions"),
                floored.max_direction_deviation,
                1e-7,
            ));
            out.push(Check::le(
                "krylov.diom_pcg_identities",
                format!("seed {seed}: DIOM({m}) first slope g₀ᵀp₁ = −β/u₁₁"),
                rep.first_slope_deviation,
                1e-10,
            ));
            out.push(Check::holds(
                "krylov.diom_pcg_identities",
                format!("seed {seed}: DIOM({m}) ζ and slope signs alternate"),
                rep.zeta_signs_alternate && rep.slope_signs.iter().all(|&s| s),
            ));
        }

        let m = 5.min(p.n);
        let mut basis = ArnoldiBasis::new(&b, Window::Limited(m))?;
        let (mut orth, mut unit, mut nonneg) = (0.0f64, 0.0f64, true);
        for _ in 0..kmax.min(p.n - 1) {
            let col = basis.step(&a)?;
            nonneg &= col.subdiag >= 0.0;
            if col.happy_breakdown {
                break;
            }
            let k = basis.len();
            let first = k.saturating_sub(m).max(1);
            let vk = basis.vector(k).expect("newest vector");
            unit = unit.max((norm(vk) - 1.0).abs());
            for i in first..k {
                orth = orth.max(dot(basis.vector(i).expect("window vector"), vk).abs());
            }
        }
        out.push(Check::le(
            "krylov.window_orthogonality",
            format!("seed {seed}: |v_iᵀv_j| in window"),
            orth,
            1e-8,
        ));
        out.push(Check::le(
            "krylov.window_orthogonality",
            format!("seed {seed}: ‖v_k‖ − 1"),
            unit,
            1e-12,
        ));
        out.push(Check::holds(
            "krylov.window_orthogonality",
            format!("seed {seed}: t_{{k+1,k}} ≥ 0"),
            nonneg,
        ));

        let mut w = DiomWindow::new(&b, Window::Limited(m))?;
        let (mut conj, mut pivots_positive) = (0.0f64, true);
        for _ in 0..kmax {
            if w.is_exhausted() {
                break;
            }
            let col = w.begin(&a)?;
            pivots_positive &= col.u_kk > 0.0;
            let pk = scaled(1.0 / col.u_kk, &col.direction);
            let apk = a.matvec(&pk);
            let pk_a = dot(&pk, &apk).sqrt();
            let k = col.k();
            for i in k.saturating_sub(m).max(1)..k {
                if let Some(pi) = w.p(i) {
                    let pi_a = dot(pi, &a.matvec(pi)).sqrt();
                    conj = conj.max(dot(pi, &apk).abs() / (pi_a * pk_a));
                }
            }
            w.commit(&col, pk);
        }
        out.push(Check::le(
            "krylov.diom_conjugacy",
            format!("seed {seed}: DIOM({m}) |p_iᵀAp_j|"),
            conj,
            1e-8,
        ));
        out.push(Check::holds(
            "krylov.diom_conjugacy",
            format!("seed {seed}: DIOM({m}) pivots positive"),
            pivots_positive,
        ));
    }
    Ok(())
}

/// Copy of the first `len` rows of a trace (and their vectors).
fn truncate(t: &SolveTrace<f64>, len: usize) -> SolveTrace<f64> {
    let mut out = SolveTrace::new();
    for r in &t.records()[..len] {
        out.push(r.clone());
    }
    for v in t.vectors().iter().take(len) {
        out.push_vectors(v.clone());
    }
    out
}

fn termination_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let n = p.n;
    let opts = SolveOptions::default().with_rtol(1e-10).with_max_iter(n);
    for seed in instances(p) {
        let (a, b) = spd_instance(n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b, 0.0)?;
        let x0 = vec![0.0; n];
        let mut runs: Vec<(&str, SolveTrace<f64>)> = Vec::new();
        runs.push((
            "cg",
            pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?.1,
        ));
        runs.push(("fom", fom_solve(&model, &x0, &opts)?.1));
        for (label, s) in [("bfgs", PhiSchedule::Bfgs), ("dfp", PhiSchedule::Dfp)] {
            runs.push((
                label,
                broyden_run(&model, &x0, Preconditioner::identity(), s, false, &opts)?.trace,
            ));
        }
        for (label, t) in runs {
            let rel_res = t.last().map_or(f64::INFINITY, |r| r.rel_res);
            out.push(Check::le(
                "broyden.quadratic_termination",
                format!("seed {seed}: {label} residual after ≤ {n} steps"),
                rel_res,
                1e-10,
            ));
        }
        let sr1 = broyden_run(
            &model,
            &x0,
            Preconditioner::identity(),
            PhiSchedule::Sr1,
            false,
            &SolveOptions::default()
                .with_rtol(0.0)
                .with_atol(f64::MIN_POSITIVE)
                .with_max_iter(n),
        )?;
        if sr1.trace.status() == Some(SolveStatus::Breakdown) {
            continue;
        }
        let ha = sr1.state.h().matmul(&a);
        let defect = ha.sub_matrix(&DenseMatrix::identity(n)).frobenius_norm();
        out.push(Check::le(
            "broyden.quadratic_termination",
            format!(
                "seed {seed}: sr1 ‖H_n A − I‖_F after {} updates",
                sr1.state.k()
            ),
            defect,
            1e-6,
        ));
    }
    Ok(())
}

/// Random symmetric `n × n` model; `indefinite` flips the sign of some eigenvalues.
pub fn random_model(
    n: usize,
    indefinite: bool,
    rng: &mut ChaCha8Rng,
) -> (DenseMatrix<f64>, Vec<f64>) {
    let g = DenseMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let q = orthogonal_factor(&g);
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let mag = 10f64.powf(rng.random_range(-1.0..1.0));
            if indefinite && (i % 3 == 0) {
                -mag
            } else {
                mag
            }
        })
        .collect();
    let mut a = DenseMatrix::<f64>::from_fn(n, n, |i, j| {
        (0..n).map(|k| q[(i, k)] * d[k] * q[(j, k)]).sum()
    });
    a.symmetrize();
    let b = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    (a, b)
}

/// Worst violations along one subproblem path, with `q` recomputed from the iterates.
pub struct PathReport {
    pub overshoot: f64,
    pub decrease: f64,
    pub q_increase: f64,
    pub norm_drop: f64,
}

pub fn path_report(
    model: &QuadraticModel<'_, f64>,
    delta: f64,
    r: &SubproblemResult<f64>,
) -> Result<PathReport> {
    let overshoot = if delta.is_finite() {
        norm(&r.x) / delta - 1.0
    } else {
        0.0
    };
    let mut q_increase = f64::NEG_INFINITY;
    let mut norm_drop = f64::NEG_INFINITY;
    let qs: Vec<f64> = r
        .iterates
        .iter()
        .map(|x| q_value(model, x))
        .collect::<Result<_>>()?;
    for (w, x) in qs.windows(2).zip(r.iterates.windows(2)) {
        q_increase = q_increase.max((w[1] - w[0]) / w[0].abs().max(1.0));
        let (n0, n1) = (norm(&x[0]), norm(&x[1]));
        norm_drop = norm_drop.max((n0 - n1) / n0.max(1.0));
    }
    let decrease = qs.first().copied().unwrap_or(0.0) - qs.last().copied().unwrap_or(0.0);
    Ok(PathReport {
        overshoot,
        decrease,
        q_increase,
        norm_drop,
    })
}

fn subsolve(
    which: usize,
    model: &QuadraticModel<'_, f64>,
    delta: f64,
    opts: &SubproblemOptions<f64>,
) -> Result<SubproblemResult<f64>> {
    match which {
        0 => steihaug_tcg(model, delta, opts),
        1 => tr_lbfgs(model, delta, 5, opts),
        _ => tr_diom(model, delta, Window::Limited(5), opts),
    }
}

/// Relative slack on inner-path monotonicity. Steps taken after `n` inner
/// iterations on a converged SPD model are rounding-level corrections and can
/// shrink `‖x_k‖` by about `κ ε`.
pub const PATH_SLACK: f64 = 1e-8;

const SUBSOLVER_NAMES: [&str; 3] = ["tcg", "trlbfgs(5)", "trdiom(5)"];

fn tr_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let n = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let opts = SubproblemOptions::default().keeping_iterates();
    let mut worst = [[f64::NEG_INFINITY; 4]; 3];
    let mut negative_decrease = [0usize; 3];
    for t in 0..100 {
        let (a, b) = random_model(n, t % 2 == 1, &mut rng);
        let model = QuadraticModel::new(&a, b, 0.0)?;
        let delta = 10f64.powf(rng.random_range(-1.0..1.0));
        for (s, w) in worst.iter_mut().enumerate() {
            let r = subsolve(s, &model, delta, &opts)?;
            let rep = path_report(&model, delta, &r)?;
            if r.decrease < 0.0 || rep.decrease < 0.0 {
                negative_decrease[s] += 1;
            }
            for (slot, v) in
                w.iter_mut()
                    .zip([rep.overshoot, -rep.decrease, rep.q_increase, rep.norm_drop])
            {
                *slot = slot.max(v);
            }
        }
    }
    for (s, name) in SUBSOLVER_NAMES.iter().enumerate() {
        out.push(Check::le(
            "trust_region.feasibility_decrease",
            format!("{name}: ‖x‖/Δ − 1"),
            worst[s][0],
            1e-12,
        ));
        out.push(Check::le(
            "trust_region.feasibility_decrease",
            format!("{name}: results with negative model decrease"),
            negative_decrease[s] as f64,
            0.0,
        ));
        out.push(Check::le(
            "trust_region.path_monotonicity",
            format!("{name}: relative q increase"),
            worst[s][2],
            PATH_SLACK,
        ));
        out.push(Check::le(
            "trust_region.path_monotonicity",
            format!("{name}: relative ‖x_k‖ drop"),
            worst[s][3],
            PATH_SLACK,
        ));
    }

    let kmax = 40;
    for seed in instances(p) {
        let (a, b) = spd_instance(n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b, 0.0)?;
        let (_, pcg) = pcg_solve(
            &model,
            Preconditioner::identity(),
            &[0.0; 10],
            &comparison_options(),
        )?;
        for (s, name) in SUBSOLVER_NAMES.iter().enumerate() {
            let r = subsolve(s, &model, f64::INFINITY, &opts)?;
            let gap = r
                .iterates
                .iter()
                .zip(pcg.vectors())
                .take(kmax)
                .map(|(x, v)| rel_diff(x, &v.x))
                .fold(0.0, f64::max);
            out.push(Check::le(
                "trust_region.unconstrained_pcg",
                format!("seed {seed}: {name} with Δ = ∞ vs PCG"),
                gap,
                1e-8,
            ));
        }
    }

    let rosen = Rosenbrock::new(2)?;
    let class = ClassificationProblem::synthetic(10, 200, 2.0, p.seed)?;
    let problems: [(&str, &dyn Objective, Vec<f64>); 2] = [
        ("rosenbrock", &rosen, rosen.start()),
        ("classification", &class, vec![0.0; 10]),
    ];
    for (label, obj, z0) in problems {
        for sub in [Subsolver::Tcg, Subsolver::Lbfgs(5), Subsolver::Diom(5)] {
            let r = tr_newton(obj, &z0, &TrustRegionConfig::default(), sub)?;
            let (increase, moved) = outer_violations(&r);
            out.push(Check::le(
                "trust_region.outer_monotone",
                format!("{label} {sub}: f increase"),
                increase,
                0.0,
            ));
            out.push(Check::holds(
                "trust_region.outer_monotone",
                format!("{label} {sub}: rejected steps keep z"),
                !moved,
            ));
        }
    }
    Ok(())
}

/// Largest increase of `f` across accepted steps, and whether any rejection changed `f`.
fn outer_violations(r: &TrResult) -> (f64, bool) {
    let mut increase = f64::NEG_INFINITY;
    let mut moved = false;
    let fs: Vec<f64> = r
        .log
        .iter()
        .map(|it| it.f)
        .chain(std::iter::once(r.f))
        .collect();
    for (it, w) in r.log.iter().zip(fs.windows(2)) {
        if it.accepted {
            increase = increase.max(w[1] - w[0]);
        } else if w[1] != w[0] {
            moved = true;
        }
    }
    (increase.max(0.0), moved)
}

fn operator_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let n = p.n;
    let dense = synthetic_spd_with(n, p.kappa, p.spectrum, p.seed)?;
    let triplets: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| {
            let mut t = vec![(i, i, 2.0)];
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
            t
        })
        .collect();
    let csr = CsrMatrix::from_triplets(n, &triplets)?;
    let diag = DiagonalOperator::new((1..=n).map(|i| i as f64).collect());
    let ident = IdentityOperator::new(n);
    let ops: [(&str, &dyn LinearOperator<f64>); 4] = [
        ("dense", &dense),
        ("csr", &csr),
        ("diagonal", &diag),
        ("identity", &ident),
    ];
    for (label, op) in ops {
        out.push(Check::le(
            "core.operator_structure",
            format!("{label}: linearity defect"),
            linearity_defect(op, 5, p.seed),
            crate::operator::LINEARITY_RTOL,
        ));
        out.push(Check::le(
            "core.operator_structure",
            format!("{label}: symmetry defect"),
            symmetry_defect(op, 5, p.seed),
            crate::operator::SYMMETRY_RTOL,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for seed in instances(p) {
        let (a, b) = spd_instance(n, p.kappa, p.spectrum, seed)?;
        let model = QuadraticModel::new(&a, b, 0.5)?;
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let d: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let eps = 1e-5 * (1.0 + norm(&x)) / norm(&d);
        let xp: Vec<f64> = x.iter().zip(&d).map(|(u, v)| u + eps * v).collect();
        let xm: Vec<f64> = x.iter().zip(&d).map(|(u, v)| u - eps * v).collect();
        let fd = (q_value(&model, &xp)? - q_value(&model, &xm)?) / (2.0 * eps);
        let exact = dot(&q_gradient(&model, &x)?, &d);
        out.push(Check::le(
            "core.directional_derivative",
            format!("seed {seed}: q directional derivative"),
            rel(fd, exact),
            1e-6,
        ));
    }
    Ok(())
}

fn derivative_suite(p: &VerifyParams, out: &mut Vec<Check>) -> Result<()> {
    let samples = p.instances.max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut point = |n: usize, scale: f64| -> Vec<f64> {
        (0..n)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect()
    };

    let rosen = Rosenbrock::new(6)?;
    let class = ClassificationProblem::synthetic(20, 200, 2.0, p.seed)?;
    let twin = AssimilationConfig {
        seed: p.seed,
        ..AssimilationConfig::default()
    }
    .build()?;
    let zr = point(6, 1.0);
    let zc = point(20, 0.3);
    let za: Vec<f64> = twin
        .problem
        .background()
        .iter()
        .zip(point(40, 0.1))
        .map(|(a, b)| a + b)
        .collect();
    let cases: [(&str, &dyn Objective, &[f64], bool); 3] = [
        ("rosenbrock", &rosen, &zr, true),
        ("classification", &class, &zc, true),
        ("assimilation", &twin.problem, &za, false),
    ];
    for (label, obj, z, exact_hvp) in cases {
        let rep = check_derivatives(obj, z, samples, p.seed)?;
        out.push(Check::le(
            "problems.gradient_fd",
            format!("{label}: gradient vs central differences"),
            rep.gradient,
            1e-5,
        ));
        out.push(Check::le(
            "problems.hvp_symmetry",
            format!("{label}: hvp symmetry"),
            rep.symmetry,
            1e-4,
        ));
        if exact_hvp {
            out.push(Check::le(
                "problems.hvp_symmetry",
                format!("{label}: hvp vs gradient differences"),
                rep.hvp,
                1e-5,
            ));
        }
    }

    let exact = AssimilationConfig {
        seed: p.seed,
        noise: false,
        ..AssimilationConfig::default()
    }
    .build()?;
    let shifted: Vec<f64> = exact.truth.iter().map(|v| v + 0.25).collect();
    let pr = exact.problem.clone();
    let fit = AssimilationProblem::new(shifted, 0.8, 0.2, 8.0, 0.01, pr.observations().to_vec())?;
    let f = fit.value(&exact.truth)?;
    out.push(Check::le(
        "problems.assimilation_nonnegative",
        "exact fit leaves the background term",
        rel(f, fit.background_term(&exact.truth)),
        1e-14,
    ));
    let fb = twin.problem.value(twin.problem.background())?;
    let ft = twin.problem.value(&twin.truth)?;
    out.push(Check::holds(
        "problems.assimilation_nonnegative",
        "objective nonnegative at background and truth",
        fb >= 0.0 && ft >= 0.0,
    ));
    Ok(())
}
