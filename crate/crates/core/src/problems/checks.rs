//! Finite-difference derivative checks for any [`Objective`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{dot, norm};
use crate::trust_region::Objective;

fn fd_step(z: &[f64], d: &[f64]) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + norm(z)) / norm(d)
}

fn shifted(z: &[f64], h: f64, d: &[f64]) -> Vec<f64> {
    z.iter().zip(d).map(|(a, b)| a + h * b).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Relative gap between `∇f(z)ᵀd` and the central difference of `f` along `d`.
pub fn gradient_check<O: Objective + ?Sized>(obj: &O, z: &[f64], d: &[f64]) -> Result<f64> {
    let h = fd_step(z, d);
    let fd = (obj.value(&shifted(z, h, d))? - obj.value(&shifted(z, -h, d))?) / (2.0 * h);
    Ok(rel(fd, dot(&obj.gradient(z)?, d)))
}

/// `‖Hv − (∇f(z+hv) − ∇f(z−hv))/2h‖ / ‖Hv‖`
pub fn hvp_check<O: Objective + ?Sized>(obj: &O, z: &[f64], v: &[f64]) -> Result<f64> {
    let h = fd_step(z, v);
    let gp = obj.gradient(&shifted(z, h, v))?;
    let gm = obj.gradient(&shifted(z, -h, v))?;
    let hv = obj.hvp(z, v);
    let err: f64 = hv
        .iter()
        .zip(gp.iter().zip(&gm))
        .map(|(a, (p, m))| (a - (p - m) / (2.0 * h)).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = norm(&hv);
    Ok(if scale == 0.0 { err } else { err / scale })
}

/// Relative gap between `uᵀHv` and `vᵀHu`.
pub fn hvp_symmetry<O: Objective + ?Sized>(obj: &O, z: &[f64], u: &[f64], v: &[f64]) -> f64 {
    rel(dot(u, &obj.hvp(z, v)), dot(v, &obj.hvp(z, u)))
}

/// Worst errors over seeded random directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub gradient: f64,
    pub hvp: f64,
    pub symmetry: f64,
}

impl DerivativeReport {
    pub fn passes(&self, grad_tol: f64, hvp_tol: f64, sym_tol: f64) -> bool {
        self.gradient <= grad_tol && self.hvp <= hvp_tol && self.symmetry <= sym_tol
    }
}

pub fn check_derivatives<O: Objective + ?Sized>(
    obj: &O,
    z: &[f64],
    samples: usize,
    seed: u64,
) -> Result<DerivativeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = obj.dim();
    let mut draw = || -> Vec<f64> { (0..n).map(|_| rng.sample(StandardNormal)).collect() };
    let mut report = DerivativeReport {
        gradient: 0.0,
        hvp: 0.0,
        symmetry: 0.0,
    };
    for _ in 0..samples {
        let (u, v) = (draw(), draw());
        report.gradient = report.gradient.max(gradient_check(obj, z, &u)?);
        report.hvp = report.hvp.max(hvp_check(obj, z, &v)?);
        report.symmetry = report.symmetry.max(hvp_symmetry(obj, z, &u, &v));
    }
    Ok(report)
}
