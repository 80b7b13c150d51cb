//! Chained Rosenbrock function.

use crate::error::{check_dim, Error, Result};
use crate::trust_region::Objective;

/// `f(z) = Σ_{i<n−1} 100 (z_{i+1} − z_i²)² + (1 − z_i)²`; minimum 0 at `𝟏`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rosenbrock {
    n: usize,
}

impl Rosenbrock {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("Rosenbrock needs n >= 2".into()));
        }
        Ok(Self { n })
    }

    /// The usual starting point `(−1.2, 1, −1.2, 1, …)`.
    pub fn start(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| if i % 2 == 0 { -1.2 } else { 1.0 })
            .collect()
    }
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.n, z.len())?;
        Ok(z.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum())
    }

    fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, z.len())?;
        let mut g = vec![0.0; self.n];
        for i in 0..self.n - 1 {
            let r = z[i + 1] - z[i] * z[i];
            g[i] += -400.0 * z[i] * r - 2.0 * (1.0 - z[i]);
            g[i + 1] += 200.0 * r;
        }
        Ok(g)
    }

    fn hvp(&self, z: &[f64], v: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.n];
        for i in 0..self.n - 1 {
            let dii = 1200.0 * z[i] * z[i] - 400.0 * z[i + 1] + 2.0;
            let off = -400.0 * z[i];
            h[i] += dii * v[i] + off * v[i + 1];
            h[i + 1] += off * v[i] + 200.0 * v[i + 1];
        }
        h
    }
}
