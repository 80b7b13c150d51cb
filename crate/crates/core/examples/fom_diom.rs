//! FOM and DIOM(m) side by side with CG, including the formula residual of DIOM.

use lmkrylov::krylov::{diom_solve, fom_solve_checked, pcg_solve, Window};
use lmkrylov::operator::Preconditioner;
use lmkrylov::problems::synthetic_spd;
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::{ResidualMonitor, SolveOptions};

fn main() -> lmkrylov::error::Result<()> {
    let n = 120;
    let a = synthetic_spd(n, 1e4, 2)?;
    let model = QuadraticModel::new(&a, vec![100.0; n], 0.0)?;
    let opts = SolveOptions::default().with_rtol(1e-8).with_max_iter(5000);
    let x0 = vec![0.0; n];
    let (_, cg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
    let (_, fom, gap) = fom_solve_checked(&model, &x0, &opts)?;
    println!("cg       {:>4} iterations", cg.iterations());
    println!(
        "fom      {:>4} iterations (residual identity gap {gap:.1e})",
        fom.iterations()
    );
    for m in [1, 10, 50, n] {
        let (_, t) = diom_solve(&model, &x0, Window::Limited(m), &opts)?;
        let direct = opts.clone().with_monitor(ResidualMonitor::Direct);
        let (_, td) = diom_solve(&model, &x0, Window::Limited(m), &direct)?;
        println!(
            "diom({m:>3}) {:>4} iterations by |ζ|, {:>4} by ‖b − Ax‖",
            t.iterations(),
            td.iterations()
        );
    }
    Ok(())
}
