//! Strong-constraint variational data assimilation on Lorenz-96.
//!
//! ```text
//! f(z₀) = ½ ‖z₀ − z_b‖²_{B⁻¹} + ½ Σ_i ‖y_i − H_i(M_i(z₀))‖²_{R_i⁻¹}
//! ```
//!
//! with `B = σ_b I`, `R_i = σ_r² I`, `M_i` the RK4 propagation to
//! observation time `t_i` and `H_i` a selection of state components.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::norm;
use crate::problems::lorenz::{propagate, propagate_with_jacobian, DEFAULT_DT, DEFAULT_FORCING};
use crate::trust_region::Objective;

/// Observations of selected components after `step` integrator steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub step: usize,
    /// Strictly increasing component indices.
    pub indices: Vec<usize>,
    pub y: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GradientMethod {
    /// Exact gradient of the discretized model via forward sensitivities.
    #[default]
    Tangent,
    /// Central differences of the objective, `2n` propagations.
    CentralDifference,
}

#[derive(Clone, Debug)]
pub struct AssimilationProblem {
    zb: Vec<f64>,
    sigma_b: f64,
    sigma_r: f64,
    forcing: f64,
    dt: f64,
    obs: Vec<Observation>,
    gradient: GradientMethod,
}

/// `m` indices spread uniformly over `0..n`.
pub fn uniform_selection(n: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "cannot select {m} of {n} components"
        )));
    }
    Ok((0..m).map(|j| j * n / m).collect())
}

impl AssimilationProblem {
    pub fn new(
        zb: Vec<f64>,
        sigma_b: f64,
        sigma_r: f64,
        forcing: f64,
        dt: f64,
        mut obs: Vec<Observation>,
    ) -> Result<Self> {
        let n = zb.len();
        if n < 4 {
            return Err(Error::InvalidArgument(
                "state dimension must be at least 4".into(),
            ));
        }
        if !(sigma_b > 0.0 && sigma_r > 0.0) {
            return Err(Error::InvalidArgument(
                "σ_b and σ_r must be positive".into(),
            ));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("time step must be positive".into()));
        }
        for o in &obs {
            check_dim(o.indices.len(), o.y.len())?;
            if o.indices.len() > n || o.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(
                    "observation indices must strictly increase".into(),
                ));
            }
            if o.indices.last().is_some_and(|&i| i >= n) {
                return Err(Error::InvalidArgument(
                    "observation index out of range".into(),
                ));
            }
        }
        obs.sort_by_key(|o| o.step);
        Ok(Self {
            zb,
            sigma_b,
            sigma_r,
            forcing,
            dt,
            obs,
            gradient: GradientMethod::default(),
        })
    }

    pub fn with_gradient(mut self, method: GradientMethod) -> Self {
        self.gradient = method;
        self
    }

    pub fn n(&self) -> usize {
        self.zb.len()
    }

    pub fn background(&self) -> &[f64] {
        &self.zb
    }

    pub fn observations(&self) -> &[Observation] {
        &self.obs
    }

    /// `½ ‖z − z_b‖² / σ_b`
    pub fn background_term(&self, z: &[f64]) -> f64 {
        0.5 * z
            .iter()
            .zip(&self.zb)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / self.sigma_b
    }

    pub fn value(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.n(), z.len())?;
        let mut f = self.background_term(z);
        let mut state = z.to_vec();
        let mut done = 0;
        for o in &self.obs {
            state = propagate(&state, o.step - done, self.dt, self.forcing)?;
            done = o.step;
            f += self.misfit(o, &state);
        }
        Ok(f)
    }

    fn misfit(&self, o: &Observation, state: &[f64]) -> f64 {
        let s2 = self.sigma_r * self.sigma_r;
        0.5 * o
            .indices
            .iter()
            .zip(&o.y)
            .map(|(&i, y)| (y - state[i]).powi(2))
            .sum::<f64>()
            / s2
    }

    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n(), z.len())?;
        match self.gradient {
            GradientMethod::Tangent => self.tangent_gradient(z),
            GradientMethod::CentralDifference => self.fd_gradient(z),
        }
    }

    fn tangent_gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let mut g: Vec<f64> = z
            .iter()
            .zip(&self.zb)
            .map(|(a, b)| (a - b) / self.sigma_b)
            .collect();
        let steps: Vec<usize> = self.obs.iter().map(|o| o.step).collect();
        let runs = propagate_with_jacobian(z, &steps, self.dt, self.forcing)?;
        let s2 = self.sigma_r * self.sigma_r;
        for (o, (state, jac)) in self.obs.iter().zip(&runs) {
            // g −= Jᵀ Hᵀ (y − H z_i) / σ_r²
            for (&i, y) in o.indices.iter().zip(&o.y) {
                let w = (y - state[i]) / s2;
                for (j, gj) in g.iter_mut().enumerate().take(n) {
                    *gj -= jac[(i, j)] * w;
                }
            }
        }
        Ok(g)
    }

    fn fd_gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut zp = z.to_vec();
        let mut g = vec![0.0; z.len()];
        for j in 0..z.len() {
            let h = 1e-6 * z[j].abs().max(1.0);
            zp[j] = z[j] + h;
            let fp = self.value(&zp)?;
            zp[j] = z[j] - h;
            let fm = self.value(&zp)?;
            zp[j] = z[j];
            g[j] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    }

    /// Central difference of the gradient along `v`.
    pub fn hvp(&self, z: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n(), v.len())?;
        let vn = norm(v);
        if vn == 0.0 {
            return Ok(vec![0.0; v.len()]);
        }
        let h = f64::EPSILON.cbrt() * (1.0 + norm(z)) / vn;
        let zp: Vec<f64> = z.iter().zip(v).map(|(a, b)| a + h * b).collect();
        let zm: Vec<f64> = z.iter().zip(v).map(|(a, b)| a - h * b).collect();
        let gp = self.gradient(&zp)?;
        let gm = self.gradient(&zm)?;
        Ok(gp
            .iter()
            .zip(&gm)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect())
    }
}

/// `f(z₀)`, `∇f(z₀)` and the Hessian-vector product at `z₀`.
pub fn assimilation_fgh<'p>(
    p: &'p AssimilationProblem,
    z0: &[f64],
) -> Result<(f64, Vec<f64>, impl Fn(&[f64]) -> Result<Vec<f64>> + 'p)> {
    let f = p.value(z0)?;
    let g = p.gradient(z0)?;
    let z = z0.to_vec();
    Ok((f, g, move |v: &[f64]| p.hvp(&z, v)))
}

impl Objective for AssimilationProblem {
    fn dim(&self) -> usize {
        self.n()
    }
    fn value(&self, z: &[f64]) -> Result<f64> {
        AssimilationProblem::value(self, z)
    }
    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        AssimilationProblem::gradient(self, z)
    }
    fn hvp(&self, z: &[f64], v: &[f64]) -> Vec<f64> {
        AssimilationProblem::hvp(self, z, v).unwrap_or_else(|_| vec![f64::NAN; v.len()])
    }
}

/// Parameters of a seeded twin experiment.
#[derive(Clone, Debug)]
pub struct AssimilationConfig {
    pub n: usize,
    pub obs_times: usize,
    pub obs_per_time: usize,
    pub steps_between_obs: usize,
    pub sigma_b: f64,
    pub sigma_r: f64,
    pub forcing: f64,
    pub dt: f64,
    /// Steps run from a perturbed equilibrium before the truth starts.
    pub spinup_steps: usize,
    /// Add Gaussian noise to the background and the observations.
    pub noise: bool,
    pub seed: u64,
}

impl Default for AssimilationConfig {
    fn default() -> Self {
        Self {
            n: 40,
            obs_times: 2,
            obs_per_time: 20,
            steps_between_obs: 10,
            sigma_b: 0.8,
            sigma_r: 0.2,
            forcing: DEFAULT_FORCING,
            dt: DEFAULT_DT,
            spinup_steps: 1000,
            noise: true,
            seed: 0,
        }
    }
}

/// A problem together with the truth that generated its data.
#[derive(Clone, Debug)]
pub struct TwinExperiment {
    pub problem: AssimilationProblem,
    pub truth: Vec<f64>,
}

impl AssimilationConfig {
    pub fn build(&self) -> Result<TwinExperiment> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
        let mut start = vec![self.forcing; self.n];
        for v in start.iter_mut() {
            *v += 0.01 * gauss();
        }
        let truth = propagate(&start, self.spinup_steps, self.dt, self.forcing)?;
        let noise = if self.noise { 1.0 } else { 0.0 };
        let zb: Vec<f64> = truth
            .iter()
            .map(|t| t + noise * self.sigma_b.sqrt() * gauss())
            .collect();
        let indices = uniform_selection(self.n, self.obs_per_time)?;
        let mut obs = Vec::with_capacity(self.obs_times);
        let mut state = truth.clone();
        for i in 1..=self.obs_times {
            state = propagate(&state, self.steps_between_obs, self.dt, self.forcing)?;
            let y = indices
                .iter()
                .map(|&j| state[j] + noise * self.sigma_r * gauss())
                .collect();
            obs.push(Observation {
                step: i * self.steps_between_obs,
                indices: indices.clone(),
                y,
            });
        }
        let problem =
            AssimilationProblem::new(zb, self.sigma_b, self.sigma_r, self.forcing, self.dt, obs)?;
        Ok(TwinExperiment { problem, truth })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> TwinExperiment {
        AssimilationConfig {
            n: 12,
            obs_per_time: 6,
            ..AssimilationConfig::default()
        }
        .build()
        .unwrap()
    }

    #[test]
    fn exact_fit_leaves_background_term() {
        let tw = AssimilationConfig {
            noise: false,
            ..AssimilationConfig::default()
        }
        .build()
        .unwrap();
        assert_eq!(tw.problem.background(), tw.truth.as_slice());
        let z: Vec<f64> = tw.truth.iter().map(|v| v + 0.1).collect();
        let f_truth = tw.problem.value(&tw.truth).unwrap();
        assert_eq!(f_truth, 0.0);
        // Shifted start: background term is ½·n·0.01/σ_b plus a positive misfit.
        let f = tw.problem.value(&z).unwrap();
        assert!(f > 0.5 * 40.0 * 0.01 / 0.8);
    }

    #[test]
    fn objective_is_nonnegative() {
        let tw = small();
        assert!(tw.problem.value(&tw.truth).unwrap() >= 0.0);
        assert!(tw.problem.value(tw.problem.background()).unwrap() >= 0.0);
    }

    #[test]
    fn tangent_gradient_matches_central_differences() {
        let tw = small();
        let z = tw.problem.background().to_vec();
        let a = tw.problem.gradient(&z).unwrap();
        let b = tw
            .problem
            .clone()
            .with_gradient(GradientMethod::CentralDifference)
            .gradient(&z)
            .unwrap();
        let err = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-6 * norm(&a), "err {err}");
    }

    #[test]
    fn selection_is_uniform_and_validated() {
        assert_eq!(uniform_selection(40, 4).unwrap(), vec![0, 10, 20, 30]);
        assert_eq!(uniform_selection(5, 5).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(uniform_selection(4, 5).is_err());
        let bad = Observation {
            step: 1,
            indices: vec![2, 1],
            y: vec![0.0, 0.0],
        };
        assert!(AssimilationProblem::new(vec![0.0; 4], 1.0, 1.0, 8.0, 0.01, vec![bad]).is_err());
    }
}
