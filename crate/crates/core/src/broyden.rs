//! Broyden-class quasi-Newton methods with exact line search.
//!
//! The inverse approximation `H` is kept dense. The update is
//!
//! ```text
//! H' = H + ssᵀ/sᵀy − Hy yᵀH / yᵀHy + φ (yᵀHy) vvᵀ,   v = s/sᵀy − Hy/yᵀHy
//! ```
//!
//! with BFGS at `φ = 1`, DFP at `φ = 0` and SR1 at `φ = yᵀs / (s − Hy)ᵀy`.

use std::sync::Arc;

use serde::Serialize;

use crate::dense::DenseMatrix;
use crate::error::{check_dim, Error, Result};
use crate::krylov::Pcg;
use crate::linalg::{angle, axpy, dot, ls_ratio, norm, sub};
use crate::operator::Preconditioner;
use crate::quadratic::QuadraticModel;
use crate::scalar::Real;
use crate::trace::{drive, Advance, SolveOptions, SolveStatus, SolveTrace, StepInfo, Stepper};

/// Applies the Broyden update with parameter `phi` to `h` in place.
pub fn broyden_update<T: Real>(h: &mut DenseMatrix<T>, s: &[T], y: &[T], phi: T) -> Result<()> {
    let n = h.rows();
    check_dim(n, s.len())?;
    check_dim(n, y.len())?;
    let eps = T::curvature_eps();
    let sty = dot(s, y);
    let threshold = eps * norm(s) * norm(y);
    if !(sty.abs() > threshold) {
        return Err(Error::CurvatureBreakdown {
            value: sty.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let hy = h.matvec(y);
    let yhy = dot(y, &hy);
    let ny = norm(y);
    let threshold = eps * ny * ny;
    if !(yhy.abs() > threshold) {
        return Err(Error::DenominatorBreakdown {
            value: yhy.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    h.rank1_update(T::one() / sty, s, s);
    h.rank1_update(-T::one() / yhy, &hy, &hy);
    if phi != T::zero() {
        let v: Vec<T> = s
            .iter()
            .zip(&hy)
            .map(|(&si, &hi)| si / sty - hi / yhy)
            .collect();
        h.rank1_update(phi * yhy, &v, &v);
    }
    h.symmetrize();
    Ok(())
}

/// `φ_SR1 = yᵀs / (s − Hy)ᵀy`
pub fn sr1_phi<T: Real>(h: &DenseMatrix<T>, s: &[T], y: &[T]) -> Result<T> {
    check_dim(h.rows(), s.len())?;
    check_dim(h.rows(), y.len())?;
    let w = sub(s, &h.matvec(y));
    let den = dot(&w, y);
    let threshold = T::curvature_eps() * norm(&w) * norm(y);
    if !(den.abs() > threshold) || den == T::zero() {
        return Err(Error::Sr1Breakdown {
            value: den.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    Ok(dot(y, s) / den)
}

/// The value of `φ` at which the update becomes singular,
/// `(yᵀs)² / ((yᵀs)² − (yᵀHy)(sᵀBs))` with `B = H⁻¹`.
///
/// `solve_h(s)` must return `t` with `H t = s`.
pub fn phi_critical<T: Real>(
    h: &DenseMatrix<T>,
    s: &[T],
    y: &[T],
    solve_h: impl FnOnce(&[T]) -> Result<Vec<T>>,
) -> Result<T> {
    check_dim(h.rows(), s.len())?;
    check_dim(h.rows(), y.len())?;
    let bs = solve_h(s)?;
    let sty = dot(y, s);
    let yhy = dot(y, &h.matvec(y));
    let sbs = dot(s, &bs);
    let num = sty * sty;
    let den = num - yhy * sbs;
    if den == T::zero() || !(den.abs() > T::epsilon() * (num.abs() + (yhy * sbs).abs())) {
        return Err(Error::ZeroDenominator("critical phi"));
    }
    Ok(num / den)
}

/// [`phi_critical`] with `H t = s` solved by dense LU.
pub fn phi_critical_dense<T: Real>(h: &DenseMatrix<T>, s: &[T], y: &[T]) -> Result<T> {
    phi_critical(h, s, y, |rhs| h.solve(rhs))
}

/// Critical `φ` along a PCG-coincident trajectory: `−γ_k ρ_k / ρ_{k+1}`,
/// where `ρ_i = g_iᵀH₀g_i`.
pub fn phi_critical_from_gamma<T: Real>(gamma: T, rho_k: T, rho_next: T) -> Result<T> {
    if rho_next == T::zero() {
        return Err(Error::ZeroDenominator("critical phi"));
    }
    Ok(-gamma * rho_k / rho_next)
}

/// `γ_{k+1} = (γ ρ_k + φ ρ_{k+1}) / (γ ρ_k + ρ_{k+1})`
///
/// A zero denominator means `φ` equals the critical value for this step.
pub fn gamma_next<T: Real>(gamma: T, phi: T, rho_k: T, rho_next: T) -> Result<T> {
    let den = gamma * rho_k + rho_next;
    if den == T::zero() {
        return Err(Error::ZeroDenominator("gamma recurrence"));
    }
    Ok((gamma * rho_k + phi * rho_next) / den)
}

/// SR1 form of the recurrence, `(γ − α) ρ_k / ((γ − α) ρ_k + ρ_{k+1})`
/// with `α` the PCG step length at iteration `k`.
pub fn gamma_next_sr1<T: Real>(gamma: T, alpha_pcg: T, rho_k: T, rho_next: T) -> Result<T> {
    let a = (gamma - alpha_pcg) * rho_k;
    let den = a + rho_next;
    if den == T::zero() {
        return Err(Error::ZeroDenominator("SR1 gamma recurrence"));
    }
    Ok(a / den)
}

type PhiFn<T> = Arc<dyn Fn(usize, &BroydenState<T>) -> T + Send + Sync>;

/// How `φ_k` is chosen at each update.
#[derive(Clone)]
pub enum PhiSchedule<T: Real> {
    Bfgs,
    Dfp,
    Sr1,
    Constant(T),
    Custom(PhiFn<T>),
}

impl<T: Real> std::fmt::Debug for PhiSchedule<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiSchedule::Bfgs => f.write_str("Bfgs"),
            PhiSchedule::Dfp => f.write_str("Dfp"),
            PhiSchedule::Sr1 => f.write_str("Sr1"),
            PhiSchedule::Constant(v) => write!(f, "Constant({v})"),
            PhiSchedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: Real> PhiSchedule<T> {
    pub fn custom(f: impl Fn(usize, &BroydenState<T>) -> T + Send + Sync + 'static) -> Self {
        PhiSchedule::Custom(Arc::new(f))
    }

    /// `φ_k` for the pair `(s, y)` at the current state.
    pub fn phi(&self, state: &BroydenState<T>, s: &[T], y: &[T]) -> Result<T> {
        match self {
            PhiSchedule::Bfgs => Ok(T::one()),
            PhiSchedule::Dfp => Ok(T::zero()),
            PhiSchedule::Sr1 => sr1_phi(&state.h, s, y),
            PhiSchedule::Constant(v) => Ok(*v),
            PhiSchedule::Custom(f) => Ok(f(state.k, state)),
        }
    }
}

/// Dense `H_k`, the update count and the tracked proportionality factor.
#[derive(Clone, Debug)]
pub struct BroydenState<T> {
    h: DenseMatrix<T>,
    k: usize,
    gamma: T,
}

impl<T: Real> BroydenState<T> {
    pub fn new(h0: DenseMatrix<T>) -> Self {
        assert!(h0.is_square(), "H0 must be square");
        Self {
            h: h0,
            k: 0,
            gamma: T::one(),
        }
    }

    /// Materializes `h0` as an `n × n` matrix.
    pub fn from_preconditioner(h0: &Preconditioner<T>, n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = h0.apply(&e);
            for (i, c) in col.into_iter().enumerate() {
                m[(i, j)] = c;
            }
            e[j] = T::zero();
        }
        m.symmetrize();
        Self::new(m)
    }

    pub fn h(&self) -> &DenseMatrix<T> {
        &self.h
    }

    pub fn into_h(self) -> DenseMatrix<T> {
        self.h
    }

    /// Number of updates applied.
    pub fn k(&self) -> usize {
        self.k
    }

    /// `γ_k` from the recurrence, starting at 1.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// `−H g`
    pub fn direction(&self, g: &[T]) -> Vec<T> {
        let mut d = self.h.matvec(g);
        d.iter_mut().for_each(|v| *v = -*v);
        d
    }

    /// Applies one update with the given `φ`.
    pub fn update(&mut self, s: &[T], y: &[T], phi: T) -> Result<()> {
        broyden_update(&mut self.h, s, y, phi)?;
        self.k += 1;
        Ok(())
    }
}

/// Per-iteration quantities used by the identity checks.
#[derive(Clone, Debug, Serialize)]
pub struct BroydenStep {
    pub k: usize,
    /// `φ_k` used for the update after this step.
    pub phi: f64,
    /// `α_k` along `d_k^φ`.
    pub alpha: f64,
    /// `γ_k` carried by the recurrence.
    pub gamma_recurrence: f64,
    /// `ρ_k = g_kᵀH₀g_k`
    pub rho: f64,
    /// `ρ_{k+1}`
    pub rho_next: f64,
    /// `−γ_k ρ_k / ρ_{k+1}`
    pub phi_critical: Option<f64>,
    /// Least-squares ratio of `d_k^φ` against the shadow PCG direction.
    pub gamma_measured: Option<f64>,
    /// Angle between `d_k^φ` and the shadow PCG direction.
    pub angle: Option<f64>,
    /// Shadow PCG step length `α_k^PCG`.
    pub alpha_pcg: Option<f64>,
}

/// Broyden-class solver state with an optional lockstep PCG shadow.
pub struct Broyden<'m, 'a, T: Real> {
    model: &'m QuadraticModel<'a, T>,
    h0: Preconditioner<T>,
    schedule: PhiSchedule<T>,
    state: BroydenState<T>,
    x: Vec<T>,
    g: Vec<T>,
    d: Vec<T>,
    last_d: Option<Vec<T>>,
    shadow: Option<Pcg<'m, 'a, T>>,
    pending: Option<SolveStatus>,
    steps: Vec<BroydenStep>,
    pairs: Vec<(Vec<T>, Vec<T>)>,
}

impl<'m, 'a, T: Real> Broyden<'m, 'a, T> {
    pub fn new(
        model: &'m QuadraticModel<'a, T>,
        x0: &[T],
        h0: Preconditioner<T>,
        schedule: PhiSchedule<T>,
        with_shadow: bool,
    ) -> Result<Self> {
        check_dim(model.dim(), x0.len())?;
        let n = model.dim();
        let state = BroydenState::from_preconditioner(&h0, n);
        let g = model.gradient(x0)?;
        let d = state.direction(&g);
        let shadow = if with_shadow {
            Some(Pcg::new(model, h0.clone(), x0)?)
        } else {
            None
        };
        Ok(Self {
            model,
            h0,
            schedule,
            state,
            x: x0.to_vec(),
            g,
            d,
            last_d: None,
            shadow,
            pending: None,
            steps: Vec::new(),
            pairs: Vec::new(),
        })
    }

    pub fn state(&self) -> &BroydenState<T> {
        &self.state
    }

    pub fn steps(&self) -> &[BroydenStep] {
        &self.steps
    }

    /// `(s_i, y_i)` pairs in update order.
    pub fn pairs(&self) -> &[(Vec<T>, Vec<T>)] {
        &self.pairs
    }
}

impl<T: Real> Stepper<T> for Broyden<'_, '_, T> {
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
        self.last_d.as_deref()
    }

    fn advance(&mut self) -> Advance<T> {
        if let Some(status) = self.pending.take() {
            return Advance::Stop(status);
        }
        let ad = self.model.apply(&self.d);
        let curvature = dot(&self.d, &ad);
        if curvature <= T::zero() {
            return Advance::Stop(SolveStatus::NonpositiveCurvature);
        }
        let alpha = -dot(&self.g, &self.d) / curvature;

        let mut gamma_measured = None;
        let mut angle_pcg = None;
        let mut alpha_pcg = None;
        if let Some(pcg) = self.shadow.as_mut() {
            let dp = pcg.direction();
            gamma_measured = Some(ls_ratio(&self.d, dp).as_f64());
            angle_pcg = Some(angle(&self.d, dp).as_f64());
            if let Advance::Step(info) = pcg.advance() {
                alpha_pcg = info.alpha.map(Real::as_f64);
            }
        }

        let rho = self.h0.inner(&self.g);
        let s: Vec<T> = self.d.iter().map(|&di| alpha * di).collect();
        let y: Vec<T> = ad.iter().map(|&ai| alpha * ai).collect();
        axpy(T::one(), &s, &mut self.x);
        axpy(T::one(), &y, &mut self.g);
        let rho_next = self.h0.inner(&self.g);
        let gamma_k = self.state.gamma;

        let mut phi_used = f64::NAN;
        if rho_next > T::zero() {
            match self
                .schedule
                .phi(&self.state, &s, &y)
                .and_then(|phi| self.state.update(&s, &y, phi).map(|_| phi))
            {
                Ok(phi) => {
                    phi_used = phi.as_f64();
                    match gamma_next(gamma_k, phi, rho, rho_next) {
                        Ok(g) => self.state.gamma = g,
                        Err(_) => self.pending = Some(SolveStatus::Breakdown),
                    }
                }
                Err(_) => self.pending = Some(SolveStatus::Breakdown),
            }
        }
        self.steps.push(BroydenStep {
            k: self.steps.len(),
            phi: phi_used,
            alpha: alpha.as_f64(),
            gamma_recurrence: gamma_k.as_f64(),
            rho: rho.as_f64(),
            rho_next: rho_next.as_f64(),
            phi_critical: phi_critical_from_gamma(gamma_k, rho, rho_next)
                .ok()
                .map(Real::as_f64),
            gamma_measured,
            angle: angle_pcg,
            alpha_pcg,
        });
        self.pairs.push((s, y));

        let next = self.state.direction(&self.g);
        self.last_d = Some(std::mem::replace(&mut self.d, next));
        Advance::Step(StepInfo {
            alpha: Some(alpha),
            curvature: Some(curvature),
            gamma: Some(gamma_measured.map(T::of).unwrap_or(gamma_k)),
            ..StepInfo::default()
        })
    }
}

/// Everything a Broyden run produces.
pub struct BroydenRun<T: Real> {
    pub x: Vec<T>,
    pub trace: SolveTrace<T>,
    pub state: BroydenState<T>,
    pub steps: Vec<BroydenStep>,
    pub pairs: Vec<(Vec<T>, Vec<T>)>,
}

/// Runs a Broyden-class method, optionally with a lockstep PCG shadow that
/// supplies the measured `γ_k`, the direction angle and `α_k^PCG`.
pub fn broyden_run<T: Real>(
    model: &QuadraticModel<'_, T>,
    x0: &[T],
    h0: Preconditioner<T>,
    schedule: PhiSchedule<T>,
    with_shadow: bool,
    opts: &SolveOptions<T>,
) -> Result<BroydenRun<T>> {
    let mut b = Broyden::new(model, x0, h0, schedule, with_shadow)?;
    let trace = drive(&mut b, model, opts);
    Ok(BroydenRun {
        x: b.x,
        trace,
        state: b.state,
        steps: b.steps,
        pairs: b.pairs,
    })
}

/// Solves `A x = b` with a Broyden-class method and exact line search.
pub fn broyden_solve<T: Real>(
    model: &QuadraticModel<'_, T>,
    x0: &[T],
    h0: Preconditioner<T>,
    schedule: PhiSchedule<T>,
    opts: &SolveOptions<T>,
) -> Result<(Vec<T>, SolveTrace<T>)> {
    let run = broyden_run(model, x0, h0, schedule, true, opts)?;
    Ok((run.x, run.trace))
}

/// `max_i ‖H y_i − s_i‖ / ‖s_i‖` over the given pairs.
pub fn secant_defect<T: Real>(h: &DenseMatrix<T>, pairs: &[(Vec<T>, Vec<T>)]) -> T {
    pairs
        .iter()
        .map(|(s, y)| norm(&sub(&h.matvec(y), s)) / norm(s))
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit;
    use crate::operator::IdentityOperator;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    }

    fn rand_spd(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<f64> {
        let m = DenseMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
        let mut a = m.transpose().matmul(&m);
        for i in 0..n {
            a[(i, i)] += n as f64;
        }
        a
    }

    /// Term-by-term assembly of the family update.
    fn oracle_update(h: &DenseMatrix<f64>, s: &[f64], y: &[f64], phi: f64) -> DenseMatrix<f64> {
        let n = s.len();
        let hy = h.matvec(y);
        let sty: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
        let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
        DenseMatrix::from_fn(n, n, |i, j| {
            let vi = s[i] / sty - hy[i] / yhy;
            let vj = s[j] / sty - hy[j] / yhy;
            h[(i, j)] + s[i] * s[j] / sty - hy[i] * hy[j] / yhy + phi * yhy * vi * vj
        })
    }

    #[test]
    fn fixed_point_when_hy_equals_s() {
        for phi in [0.0, 1.0] {
            let mut h = DenseMatrix::identity(3);
            broyden_update(&mut h, &unit(3, 0), &unit(3, 0), phi).unwrap();
            assert!(h.sub_matrix(&DenseMatrix::identity(3)).frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn update_matches_oracle_and_secant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = rand_spd(&mut rng, 5);
        let s = rand_vec(&mut rng, 5);
        let a = rand_spd(&mut rng, 5);
        let y = a.matvec(&s);
        for phi in [0.0, 0.5, 1.0] {
            let mut h1 = h.clone();
            broyden_update(&mut h1, &s, &y, phi).unwrap();
            let oracle = oracle_update(&h, &s, &y, phi);
            assert!(h1.sub_matrix(&oracle).frobenius_norm() <= 1e-12 * oracle.frobenius_norm());
            let hy = h1.matvec(&y);
            assert!(norm(&sub(&hy, &s)) <= 1e-10 * norm(&s));
            assert!(h1.symmetry_defect() <= 1e-12);
        }
    }

    #[test]
    fn update_breakdowns() {
        let mut h = DenseMatrix::<f64>::identity(2);
        assert!(matches!(
            broyden_update(&mut h, &[1.0, 0.0], &[0.0, 1.0], 1.0),
            Err(Error::CurvatureBreakdown { .. })
        ));
        let mut h = DenseMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            broyden_update(&mut h, &[1.0, 0.5], &[1.0, 1.0], 1.0),
            Err(Error::DenominatorBreakdown { .. })
        ));
    }

    #[test]
    fn sr1_phi_examples() {
        let h = DenseMatrix::<f64>::identity(2);
        assert!((sr1_phi(&h, &[2.0, 0.0], &[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            sr1_phi(&h, &[1.0, 0.0], &[1.0, 0.0]),
            Err(Error::Sr1Breakdown { .. })
        ));
    }

    #[test]
    fn sr1_phi_reproduces_rank_one_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = rand_spd(&mut rng, 4);
        let s = rand_vec(&mut rng, 4);
        let y = rand_vec(&mut rng, 4);
        let phi = sr1_phi(&h, &s, &y).unwrap();
        let mut h1 = h.clone();
        broyden_update(&mut h1, &s, &y, phi).unwrap();
        let w = sub(&s, &h.matvec(&y));
        let mut rank1 = h.clone();
        rank1.rank1_update(1.0 / dot(&w, &y), &w, &w);
        assert!(h1.sub_matrix(&rank1).frobenius_norm() <= 1e-10 * rank1.frobenius_norm());
    }

    #[test]
    fn singular_h_rejected_by_phi_critical() {
        let h = DenseMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(phi_critical_dense(&h, &[1.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn phi_critical_first_step_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = rand_spd(&mut rng, 6);
        let b = rand_vec(&mut rng, 6);
        let model = QuadraticModel::new(&a, b, 0.0).unwrap();
        let x0 = vec![0.0; 6];
        let g0 = model.gradient(&x0).unwrap();
        let d0: Vec<f64> = g0.iter().map(|v| -v).collect();
        let alpha = model.exact_linesearch(&g0, &d0).unwrap();
        let s: Vec<f64> = d0.iter().map(|v| alpha * v).collect();
        let y = a.matvec(&s);
        let g1: Vec<f64> = g0.iter().zip(&y).map(|(a, b)| a + b).collect();
        let h = DenseMatrix::identity(6);
        let direct = phi_critical_dense(&h, &s, &y).unwrap();
        let closed = phi_critical_from_gamma(1.0, dot(&g0, &g0), dot(&g1, &g1)).unwrap();
        assert!((direct - closed).abs() <= 1e-8 * closed.abs());
        assert!(direct < 0.0);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_next(0.3, 1.0, 2.0, 5.0).unwrap(), 1.0);
        assert_eq!(gamma_next(1.0, 0.0, 2.0, 2.0).unwrap(), 0.5);
        assert!(gamma_next(1.0, 0.5, 1.0, -1.0).is_err());
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let op = IdentityOperator::new(3);
        let model = QuadraticModel::<f64>::new(&op, vec![1.0, 2.0, -1.0], 0.0).unwrap();
        let (x, trace) = broyden_solve(
            &model,
            &[0.0; 3],
            Preconditioner::identity(),
            PhiSchedule::Bfgs,
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(trace.iterations(), 1);
        assert!(norm(&sub(&x, &[1.0, 2.0, -1.0])) < 1e-15);
    }

    #[test]
    fn dfp_tracks_pcg_and_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = rand_spd(&mut rng, 10);
        let b = rand_vec(&mut rng, 10);
        let model = QuadraticModel::new(&a, b, 0.0).unwrap();
        let run = broyden_run(
            &model,
            &[0.0; 10],
            Preconditioner::identity(),
            PhiSchedule::Dfp,
            true,
            &SolveOptions::default().with_rtol(1e-12),
        )
        .unwrap();
        for st in &run.steps {
            let m = st.gamma_measured.unwrap();
            assert!((m - st.gamma_recurrence).abs() <= 1e-6 * st.gamma_recurrence.abs());
            assert!(st.angle.unwrap() < 1e-6);
            assert!(st.phi_critical.unwrap() < 0.0);
        }
        assert!(secant_defect(run.state.h(), &run.pairs) < 1e-8);
    }

    proptest! {
        #[test]
        fn gamma_monotone_in_phi(
            gamma in 0.01f64..1.0, rho_k in 1e-3f64..1e3, rho_next in 1e-3f64..1e3,
            p1 in 0.0f64..1.0, p2 in 0.0f64..1.0,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let g1 = gamma_next(gamma, lo, rho_k, rho_next).unwrap();
            let g2 = gamma_next(gamma, hi, rho_k, rho_next).unwrap();
            prop_assert!(g1 <= g2 + 1e-15);
            prop_assert!(g1 > 0.0 && g2 <= 1.0 + 1e-15);
        }
    }
}
