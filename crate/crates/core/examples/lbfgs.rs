//! LBFGS(m) on a quadratic: iterates track PCG for every memory size.

use lmkrylov::krylov::pcg_solve;
use lmkrylov::limited_memory::lbfgs_solve;
use lmkrylov::linalg::rel_diff;
use lmkrylov::operator::Preconditioner;
use lmkrylov::problems::{synthetic_spd_with, Spectrum};
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::SolveOptions;

fn main() -> lmkrylov::error::Result<()> {
    let n = 40;
    let a = synthetic_spd_with(n, 1e3, Spectrum::Linear, 1)?;
    let model = QuadraticModel::new(&a, vec![1.0; n], 0.0)?;
    let opts = SolveOptions::default().with_rtol(1e-10).keeping_vectors();
    let x0 = vec![0.0; n];
    let (_, cg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
    for m in [1, 3, 10, n] {
        let (_, t) = lbfgs_solve(&model, &x0, m, Preconditioner::identity(), &opts)?;
        let gap = t
            .vectors()
            .iter()
            .zip(cg.vectors())
            .map(|(u, v)| rel_diff(&u.x, &v.x))
            .fold(0.0, f64::max);
        println!(
            "LBFGS({m:>2}): {} iterations, max iterate gap to PCG {gap:.2e}",
            t.iterations()
        );
    }
    Ok(())
}
