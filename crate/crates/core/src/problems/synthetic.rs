//! Seeded SPD test matrices and condition-number estimation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dense::{orthogonal_factor, DenseMatrix};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, scale};
use crate::operator::LinearOperator;

/// `n` eigenvalues log-uniform in `[1/κ, 1]`, with both endpoints present, ascending.
pub fn log_uniform_spectrum(n: usize, kappa: f64, seed: u64) -> Result<Vec<f64>> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "condition number must be >= 1, got {kappa}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = -kappa.ln();
    let mut d: Vec<f64> = (0..n).map(|_| (lo * rng.random::<f64>()).exp()).collect();
    d.sort_by(f64::total_cmp);
    d[0] = 1.0 / kappa;
    d[n - 1] = 1.0;
    if n == 1 {
        d[0] = 1.0;
    }
    Ok(d)
}

/// `n` eigenvalues equally spaced on `[1/κ, 1]`, ascending.
pub fn linear_spectrum(n: usize, kappa: f64) -> Result<Vec<f64>> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "condition number must be >= 1, got {kappa}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let lo = 1.0 / kappa;
    if n == 1 {
        return Ok(vec![1.0]);
    }
    Ok((0..n)
        .map(|i| lo + (1.0 - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

/// Eigenvalue distribution of a synthetic SPD matrix.
///
/// Log-uniform spectra have isolated large eigenvalues, so CG loses
/// orthogonality quickly on them; equally spaced spectra keep floating-point
/// CG close to its exact-arithmetic behaviour for moderate `κ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spectrum {
    #[default]
    LogUniform,
    Linear,
}

impl Spectrum {
    pub fn eigenvalues(self, n: usize, kappa: f64, seed: u64) -> Result<Vec<f64>> {
        match self {
            Spectrum::LogUniform => log_uniform_spectrum(n, kappa, seed),
            Spectrum::Linear => linear_spectrum(n, kappa),
        }
    }
}

impl std::str::FromStr for Spectrum {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-uniform" | "log_uniform" | "log" => Ok(Spectrum::LogUniform),
            "linear" => Ok(Spectrum::Linear),
            _ => Err(Error::InvalidArgument(format!("unknown spectrum '{s}'"))),
        }
    }
}

/// `Q D Qᵀ` with a Haar-random orthogonal `Q` and `D` from [`log_uniform_spectrum`].
pub fn synthetic_spd(n: usize, kappa: f64, seed: u64) -> Result<DenseMatrix<f64>> {
    synthetic_spd_with(n, kappa, Spectrum::LogUniform, seed)
}

pub fn synthetic_spd_with(
    n: usize,
    kappa: f64,
    spectrum: Spectrum,
    seed: u64,
) -> Result<DenseMatrix<f64>> {
    let d = spectrum.eigenvalues(n, kappa, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let g = DenseMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = orthogonal_factor(&g);
    let mut a = DenseMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| q[(i, k)] * d[k] * q[(j, k)]).sum()
    });
    a.symmetrize();
    Ok(a)
}

/// Extreme eigenvalue estimates of an SPD operator.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ConditionEstimate {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub kappa: f64,
}

/// Power iteration for `λ_max` and inverse iteration (Cholesky) for `λ_min`.
///
/// The operator is assembled densely, so this is meant for `n` up to a few thousand.
pub fn estimate_condition(
    op: &dyn LinearOperator<f64>,
    max_iter: usize,
    seed: u64,
) -> Result<ConditionEstimate> {
    let n = op.dim();
    let mut dense = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op.apply(&e);
        e[j] = 0.0;
        for i in 0..n {
            dense[(i, j)] = col[i];
        }
    }
    dense.symmetrize();
    let chol = dense.cholesky()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let lambda_max = rayleigh_iteration(&start, max_iter, |v| Ok(dense.matvec(v)))?;
    let mu = rayleigh_iteration(&start, max_iter, |v| chol.solve(v))?;
    let lambda_min = 1.0 / mu;
    Ok(ConditionEstimate {
        lambda_max,
        lambda_min,
        kappa: lambda_max / lambda_min,
    })
}

/// Dominant eigenvalue of a symmetric map by power iteration with Rayleigh quotients.
fn rayleigh_iteration(
    start: &[f64],
    max_iter: usize,
    apply: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<f64> {
    let mut v = start.to_vec();
    scale(1.0 / norm(&v), &mut v);
    let mut lambda = 0.0;
    for _ in 0..max_iter.max(1) {
        let mut w = apply(&v)?;
        let next = dot(&v, &w);
        let wn = norm(&w);
        if wn == 0.0 {
            return Ok(0.0);
        }
        scale(1.0 / wn, &mut w);
        v = w;
        let done = (next - lambda).abs() <= 1e-12 * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_pins_endpoints() {
        let d = log_uniform_spectrum(10, 1e3, 1).unwrap();
        assert_eq!(d[0], 1e-3);
        assert_eq!(d[9], 1.0);
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
        assert!(log_uniform_spectrum(3, 0.5, 1).is_err());
    }

    #[test]
    fn linear_spectrum_is_equally_spaced() {
        let d = linear_spectrum(5, 4.0).unwrap();
        assert_eq!(d, vec![0.25, 0.4375, 0.625, 0.8125, 1.0]);
        let a = synthetic_spd_with(30, 1e3, Spectrum::Linear, 2).unwrap();
        let est = estimate_condition(&a, 5000, 0).unwrap();
        assert!((est.kappa / 1e3 - 1.0).abs() < 0.01, "κ = {}", est.kappa);
    }

    #[test]
    fn unit_condition_is_identity() {
        let a = synthetic_spd(6, 1.0, 4).unwrap();
        let i = DenseMatrix::identity(6);
        assert!(a.sub_matrix(&i).frobenius_norm() < 1e-13);
    }

    #[test]
    fn estimate_recovers_requested_condition() {
        let a = synthetic_spd(40, 1e3, 7).unwrap();
        let est = estimate_condition(&a, 2000, 0).unwrap();
        assert!((est.kappa / 1e3 - 1.0).abs() < 0.01, "κ = {}", est.kappa);
        assert!((est.lambda_max - 1.0).abs() < 1e-3);
    }

    #[test]
    fn same_seed_same_operator() {
        let a = synthetic_spd(8, 50.0, 11).unwrap();
        let b = synthetic_spd(8, 50.0, 11).unwrap();
        let c = synthetic_spd(8, 50.0, 12).unwrap();
        let probe: Vec<f64> = (0..8).map(|i| i as f64 - 3.5).collect();
        assert_eq!(a.matvec(&probe), b.matvec(&probe));
        assert_ne!(a.matvec(&probe), c.matvec(&probe));
    }
}
