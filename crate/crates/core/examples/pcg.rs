//! PCG on a badly scaled SPD system, with and without a Jacobi preconditioner.

use lmkrylov::dense::DenseMatrix;
use lmkrylov::krylov::pcg_solve;
use lmkrylov::operator::{DiagonalOperator, Preconditioner};
use lmkrylov::problems::synthetic_spd;
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::SolveOptions;

fn main() -> lmkrylov::error::Result<()> {
    let n = 100;
    // S A S with row scales spanning four decades
    let base = synthetic_spd(n, 1e2, 3)?;
    let scale: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(2.0 * (i as f64 / (n - 1) as f64) - 1.0))
        .collect();
    let a = DenseMatrix::from_fn(n, n, |i, j| scale[i] * base[(i, j)] * scale[j]);
    let model = QuadraticModel::new(&a, vec![1.0; n], 0.0)?;
    let opts = SolveOptions::default().with_rtol(1e-10);

    let (_, plain) = pcg_solve(&model, Preconditioner::identity(), &vec![0.0; n], &opts)?;
    let inv_diag: Vec<f64> = (0..n).map(|i| 1.0 / a[(i, i)]).collect();
    let jacobi = Preconditioner::new(DiagonalOperator::new(inv_diag));
    let (_, pre) = pcg_solve(&model, jacobi, &vec![0.0; n], &opts)?;

    println!(
        "cg      {:?} after {} iterations",
        plain.status(),
        plain.iterations()
    );
    println!(
        "jacobi  {:?} after {} iterations",
        pre.status(),
        pre.iterations()
    );
    for r in plain.records().iter().step_by(25) {
        println!(
            "  k={:>3}  ‖r‖/‖b‖ = {:.3e}  q = {:.6e}",
            r.k, r.rel_res, r.q
        );
    }
    Ok(())
}
