//! Iterations to a 1e-6 relative residual for CG, LBFGS(m), DIOM(m) and
//! LSR1(m) on log-uniform SPD systems of growing condition number.
//!
//! `cargo run --release --example ill_conditioning_study -- [n]`

use lmkrylov::krylov::{diom_solve, pcg_solve, Window};
use lmkrylov::limited_memory::{lbfgs_solve, lsr1_solve};
use lmkrylov::operator::Preconditioner;
use lmkrylov::problems::synthetic_spd;
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::{SolveOptions, SolveTrace};

fn iters(t: &SolveTrace<f64>) -> String {
    t.iterations_to(1e-6).map_or("-".into(), |k| k.to_string())
}

fn main() -> lmkrylov::error::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(200, |s| s.parse().expect("n"));
    let opts = SolveOptions::default()
        .with_rtol(1e-6)
        .with_max_iter(10 * n);
    let x0 = vec![0.0; n];
    println!(
        "{:>8} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "kappa", "cg", "lbfgs(50)", "lbfgs(n)", "diom(50)", "diom(n)", "lsr1(25)"
    );
    for kappa in [1e2, 1e4, 1e6, 1e8] {
        let a = synthetic_spd(n, kappa, 0)?;
        let model = QuadraticModel::new(&a, vec![100.0; n], 0.0)?;
        let id = Preconditioner::identity;
        let cg = pcg_solve(&model, id(), &x0, &opts)?.1;
        let l50 = lbfgs_solve(&model, &x0, 50, id(), &opts)?.1;
        let ln = lbfgs_solve(&model, &x0, n, id(), &opts)?.1;
        let d50 = diom_solve(&model, &x0, Window::Limited(50), &opts)?.1;
        let dn = diom_solve(&model, &x0, Window::Limited(n), &opts)?.1;
        let s25 = lsr1_solve(&model, &x0, 25, id(), &opts)?.1;
        println!(
            "{kappa:>8.0e} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
            iters(&cg),
            iters(&l50),
            iters(&ln),
            iters(&d50),
            iters(&dn),
            iters(&s25)
        );
    }
    Ok(())
}
