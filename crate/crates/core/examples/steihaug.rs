//! The three truncated subproblem solvers on one indefinite model across radii.

use lmkrylov::dense::DenseMatrix;
use lmkrylov::krylov::Window;
use lmkrylov::linalg::norm;
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trust_region::{steihaug_tcg, tr_diom, tr_lbfgs, SubproblemOptions};

fn main() -> lmkrylov::error::Result<()> {
    let n = 6;
    let mut a = DenseMatrix::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            (i as f64) - 1.5
        } else {
            0.1 / (1.0 + (i + j) as f64)
        }
    });
    a.symmetrize();
    let model = QuadraticModel::new(&a, vec![1.0; n], 0.0)?;
    let opts = SubproblemOptions::default();
    for delta in [0.1, 1.0, 10.0] {
        let t = steihaug_tcg(&model, delta, &opts)?;
        let l = tr_lbfgs(&model, delta, 3, &opts)?;
        let d = tr_diom(&model, delta, Window::Limited(3), &opts)?;
        println!("Δ = {delta}");
        for (name, r) in [("tcg", &t), ("trlbfgs(3)", &l), ("trdiom(3)", &d)] {
            println!(
                "  {name:<11} {:<28} ‖x‖ = {:.6}  decrease = {:.6e}  hvps = {}",
                r.status.to_string(),
                norm(&r.x),
                r.decrease,
                r.hvps
            );
        }
    }
    Ok(())
}
