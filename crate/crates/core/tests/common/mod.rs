//! Oracles written independently of the library solvers.
#![allow(dead_code)]

use lmkrylov::dense::DenseMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    let nb = norm(b);
    if nb == 0.0 {
        norm(a)
    } else {
        diff_norm(a, b) / nb
    }
}

pub fn matvec(a: &DenseMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

/// `‖b − A x‖ / ‖b‖`
pub fn residual(a: &DenseMatrix<f64>, b: &[f64], x: &[f64]) -> f64 {
    let ax = matvec(a, x);
    diff_norm(b, &ax) / norm(b)
}

/// One row of textbook CG: `x_k`, `r_k = b − A x_k`, `ρ_k = r_kᵀr_k`, the
/// direction `p_k` leaving `x_k` and its step `α_k`.
#[derive(Clone, Debug)]
pub struct CgRow {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub rho: f64,
    pub p: Vec<f64>,
    pub alpha: f64,
}

/// Hestenes–Stiefel CG from `x = 0`, returning `steps + 1` rows (or fewer on exact convergence).
pub fn textbook_cg(a: &DenseMatrix<f64>, b: &[f64], steps: usize) -> Vec<CgRow> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rho = dot(&r, &r);
    let mut rows = Vec::new();
    for _ in 0..=steps {
        let ap = matvec(a, &p);
        let alpha = rho / dot(&p, &ap);
        rows.push(CgRow {
            x: x.clone(),
            r: r.clone(),
            rho,
            p: p.clone(),
            alpha,
        });
        if rho == 0.0 {
            break;
        }
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rho_next = dot(&r, &r);
        let beta = rho_next / rho;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rho = rho_next;
    }
    rows
}

/// Central-difference gradient with step `h_i = cbrt(ε)·max(1, |z_i|)`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, z: &[f64]) -> Vec<f64> {
    let mut z = z.to_vec();
    (0..z.len())
        .map(|i| {
            let h = f64::EPSILON.cbrt() * z[i].abs().max(1.0);
            let zi = z[i];
            z[i] = zi + h;
            let fp = f(&z);
            z[i] = zi - h;
            let fm = f(&z);
            z[i] = zi;
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central difference of a gradient along `v`.
pub fn fd_hvp(g: impl Fn(&[f64]) -> Vec<f64>, z: &[f64], v: &[f64]) -> Vec<f64> {
    let h = f64::EPSILON.cbrt() * (1.0 + norm(z)) / norm(v);
    let zp: Vec<f64> = z.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let zm: Vec<f64> = z.iter().zip(v).map(|(a, b)| a - h * b).collect();
    g(&zp)
        .iter()
        .zip(g(&zm))
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

/// Deterministic pseudo-random vector (SplitMix64 mapped to `[-1, 1)`).
pub fn probe(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    (0..n)
        .map(|_| {
            s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect()
}
