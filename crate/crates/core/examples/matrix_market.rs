//! Reads a Matrix Market file and solves `A x = 100·𝟏` with CG, LBFGS(n)
//! and DIOM(n).
//!
//! `cargo run --release --example matrix_market -- path/to/494_bus.mtx`
//! Without an argument a small embedded matrix is used.

use lmkrylov::harness::parse_matrix_market;
use lmkrylov::krylov::{diom_solve, pcg_solve, Window};
use lmkrylov::limited_memory::lbfgs_solve;
use lmkrylov::operator::{LinearOperator, Preconditioner};
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::SolveOptions;

const SAMPLE: &str = "%%MatrixMarket matrix coordinate real symmetric
4 4 7
1 1 4.0
2 1 -1.0
2 2 4.0
3 2 -1.0
3 3 4.0
4 3 -1.0
4 4 4.0
";

fn main() -> lmkrylov::error::Result<()> {
    let a = match std::env::args().nth(1) {
        Some(path) => lmkrylov::harness::read_matrix_market(path)?,
        None => parse_matrix_market(SAMPLE.as_bytes())?,
    };
    let n = a.dim();
    println!("n = {n}, nnz = {}", a.nnz());
    let model = QuadraticModel::new(&a, vec![100.0; n], 0.0)?;
    let opts = SolveOptions::default()
        .with_rtol(1e-6)
        .with_max_iter(20 * n);
    let x0 = vec![0.0; n];
    let (_, cg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
    let (_, lb) = lbfgs_solve(&model, &x0, n, Preconditioner::identity(), &opts)?;
    let (_, di) = diom_solve(&model, &x0, Window::Limited(n), &opts)?;
    for (name, t) in [("cg", &cg), ("lbfgs(n)", &lb), ("diom(n)", &di)] {
        println!(
            "{name:<9} {:?} after {} iterations",
            t.status(),
            t.iterations()
        );
    }
    Ok(())
}
