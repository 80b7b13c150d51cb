//! Lorenz-96 dynamics and a fixed-step RK4 integrator with tangent propagation.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_FORCING: f64 = 8.0;
pub const DEFAULT_DT: f64 = 0.01;

fn check_state(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "Lorenz-96 needs n >= 4, got {n}"
        )));
    }
    Ok(())
}

/// `dz_i/dt = (z_{i+1} − z_{i−2}) z_{i−1} − z_i + F`, indices modulo `n`.
pub fn lorenz96_rhs(z: &[f64], forcing: f64) -> Result<Vec<f64>> {
    check_state(z.len())?;
    let mut out = vec![0.0; z.len()];
    rhs_into(z, forcing, &mut out);
    Ok(out)
}

fn rhs_into(z: &[f64], forcing: f64, out: &mut [f64]) {
    let n = z.len();
    for i in 0..n {
        let ip1 = z[(i + 1) % n];
        let im1 = z[(i + n - 1) % n];
        let im2 = z[(i + n - 2) % n];
        out[i] = (ip1 - im2) * im1 - z[i] + forcing;
    }
}

/// Jacobian of the right-hand side at `z` applied to `v`.
fn tangent_into(z: &[f64], v: &[f64], out: &mut [f64]) {
    let n = z.len();
    for i in 0..n {
        let (p1, m1, m2) = ((i + 1) % n, (i + n - 1) % n, (i + n - 2) % n);
        out[i] = (v[p1] - v[m2]) * z[m1] + (z[p1] - z[m2]) * v[m1] - v[i];
    }
}

/// Classical RK4 state with scratch space for the stages.
struct Rk4 {
    forcing: f64,
    dt: f64,
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize, dt: f64, forcing: f64) -> Self {
        Self {
            forcing,
            dt,
            k: std::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
        }
    }

    /// Advances `z` one step; when `tangents` is given, each column is
    /// advanced by the derivative of the same RK4 map.
    fn step(&mut self, z: &mut [f64], tangents: Option<&mut [Vec<f64>]>) {
        let (dt, f) = (self.dt, self.forcing);
        let n = z.len();
        // Stage inputs z + c_s·dt·k_{s−1}, kept for the tangent pass.
        let mut stages: Vec<Vec<f64>> = Vec::with_capacity(4);
        let coeff = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            for i in 0..n {
                self.stage[i] = if s == 0 {
                    z[i]
                } else {
                    z[i] + coeff[s] * dt * self.k[s - 1][i]
                };
            }
            rhs_into(&self.stage, f, &mut self.k[s]);
            if tangents.is_some() {
                stages.push(self.stage.clone());
            }
        }
        if let Some(cols) = tangents {
            let mut dk: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
            let mut dstage = vec![0.0; n];
            for v in cols.iter_mut() {
                for s in 0..4 {
                    for i in 0..n {
                        dstage[i] = if s == 0 {
                            v[i]
                        } else {
                            v[i] + coeff[s] * dt * dk[s - 1][i]
                        };
                    }
                    tangent_into(&stages[s], &dstage, &mut dk[s]);
                }
                for i in 0..n {
                    v[i] += dt / 6.0 * (dk[0][i] + 2.0 * dk[1][i] + 2.0 * dk[2][i] + dk[3][i]);
                }
            }
        }
        for i in 0..n {
            z[i] +=
                dt / 6.0 * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]);
        }
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    Ok(())
}

/// Integrates Lorenz-96 from `z0` for `steps` RK4 steps of size `dt`.
pub fn propagate(z0: &[f64], steps: usize, dt: f64, forcing: f64) -> Result<Vec<f64>> {
    check_state(z0.len())?;
    check_dt(dt)?;
    let mut z = z0.to_vec();
    let mut rk = Rk4::new(z.len(), dt, forcing);
    for _ in 0..steps {
        rk.step(&mut z, None);
        if !z.iter().all(|v| v.is_finite()) {
            return Err(Error::BlowUp);
        }
    }
    Ok(z)
}

/// States at each of `checkpoints` (cumulative step counts, nondecreasing),
/// together with the Jacobians `∂z(t)/∂z0` at the same checkpoints.
pub fn propagate_with_jacobian(
    z0: &[f64],
    checkpoints: &[usize],
    dt: f64,
    forcing: f64,
) -> Result<Vec<(Vec<f64>, DenseMatrix<f64>)>> {
    check_state(z0.len())?;
    check_dt(dt)?;
    let n = z0.len();
    let mut z = z0.to_vec();
    // Column j holds ∂z/∂z0_j.
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut rk = Rk4::new(n, dt, forcing);
    let mut done = 0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &target in checkpoints {
        if target < done {
            return Err(Error::InvalidArgument(
                "checkpoints must be nondecreasing".into(),
            ));
        }
        while done < target {
            rk.step(&mut z, Some(&mut cols));
            done += 1;
            if !z.iter().all(|v| v.is_finite()) {
                return Err(Error::BlowUp);
            }
        }
        let jac = DenseMatrix::from_fn(n, n, |i, j| cols[j][i]);
        out.push((z.clone(), jac));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_is_fixed() {
        let z = vec![DEFAULT_FORCING; 6];
        assert!(lorenz96_rhs(&z, DEFAULT_FORCING)
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
        assert_eq!(propagate(&z, 25, DEFAULT_DT, DEFAULT_FORCING).unwrap(), z);
    }

    #[test]
    fn hand_evaluation() {
        // i=0: (z1 − z2) z3 − z0 = (2−3)·4 − 1, and so on cyclically.
        let r = lorenz96_rhs(&[1.0, 2.0, 3.0, 4.0], 0.0).unwrap();
        assert_eq!(r, vec![-5.0, -3.0, 3.0, -7.0]);
    }

    #[test]
    fn shift_equivariance() {
        let z = [0.3, -1.2, 2.5, 0.7, 1.9];
        let shifted: Vec<f64> = (0..5).map(|i| z[(i + 1) % 5]).collect();
        let a = lorenz96_rhs(&z, 8.0).unwrap();
        let b = lorenz96_rhs(&shifted, 8.0).unwrap();
        for i in 0..5 {
            assert_eq!(b[i], a[(i + 1) % 5]);
        }
    }

    #[test]
    fn rejects_small_state_and_bad_dt() {
        assert!(lorenz96_rhs(&[1.0, 2.0, 3.0], 8.0).is_err());
        assert!(propagate(&[1.0; 4], 1, 0.0, 8.0).is_err());
    }

    #[test]
    fn single_step_is_euler_to_second_order() {
        let z0 = [1.0, 8.5, 7.0, 8.0, 9.0, 8.2];
        let f = lorenz96_rhs(&z0, 8.0).unwrap();
        let err = |dt: f64| {
            let z1 = propagate(&z0, 1, dt, 8.0).unwrap();
            z1.iter()
                .zip(&z0)
                .zip(&f)
                .map(|((a, b), c)| (a - b - dt * c).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let ratio = err(1e-3) / err(5e-4);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn fourth_order_convergence() {
        let z0: Vec<f64> = (0..8)
            .map(|i| 8.0 + if i == 3 { 0.01 } else { 0.0 })
            .collect();
        let t = 0.5;
        let reference = propagate(&z0, 5000, t / 5000.0, 8.0).unwrap();
        let err = |steps: usize| {
            let z = propagate(&z0, steps, t / steps as f64, 8.0).unwrap();
            z.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(25) / err(50);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let z0 = [8.1, 7.3, 9.0, 8.0, 6.5];
        let out = propagate_with_jacobian(&z0, &[10, 30], 0.01, 8.0).unwrap();
        let (z30, jac) = &out[1];
        assert_eq!(z30, &propagate(&z0, 30, 0.01, 8.0).unwrap());
        let h = 1e-6;
        for j in 0..5 {
            let mut zp = z0.to_vec();
            let mut zm = z0.to_vec();
            zp[j] += h;
            zm[j] -= h;
            let fp = propagate(&zp, 30, 0.01, 8.0).unwrap();
            let fm = propagate(&zm, 30, 0.01, 8.0).unwrap();
            for i in 0..5 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                assert!((fd - jac[(i, j)]).abs() < 1e-7 * (1.0 + fd.abs()));
            }
        }
    }
}
