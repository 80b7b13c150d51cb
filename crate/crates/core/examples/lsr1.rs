//! LSR1(m) against CG: small memories fall behind once the window is full.

use lmkrylov::krylov::pcg_solve;
use lmkrylov::limited_memory::lsr1_solve;
use lmkrylov::operator::Preconditioner;
use lmkrylov::problems::synthetic_spd;
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::SolveOptions;

fn main() -> lmkrylov::error::Result<()> {
    let n = 150;
    let a = synthetic_spd(n, 1e3, 5)?;
    let model = QuadraticModel::new(&a, vec![100.0; n], 0.0)?;
    let opts = SolveOptions::default().with_rtol(1e-8).with_max_iter(2000);
    let x0 = vec![0.0; n];
    let (_, cg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
    println!("cg        {:>4} iterations", cg.iterations());
    for m in [5, 25, n] {
        let (_, t, skipped) = lsr1_solve(&model, &x0, m, Preconditioner::identity(), &opts)?;
        let at = |k: usize, tr: &lmkrylov::trace::SolveTrace<f64>| {
            tr.records().get(k).map_or(f64::NAN, |r| r.rel_res)
        };
        println!(
            "lsr1({m:>3}) {:>4} iterations, {skipped} skipped updates, rel res at k=2m: {:.2e} (cg {:.2e})",
            t.iterations(),
            at(2 * m, &t),
            at(2 * m, &cg)
        );
    }
    Ok(())
}
