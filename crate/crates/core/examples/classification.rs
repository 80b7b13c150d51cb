//! Nonconvex tanh-loss classification on synthetic clusters.
//!
//! `cargo run --release --example classification -- [images.idx labels.idx]`
//! loads raw IDX files (digits 0 vs 1) instead.

use lmkrylov::problems::classification::DEFAULT_SEPARATION;
use lmkrylov::problems::{read_idx_images, read_idx_labels, ClassificationProblem};
use lmkrylov::trust_region::{tr_newton, Subsolver, TrustRegionConfig};

fn main() -> lmkrylov::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let problem = if let [img, lab] = args.as_slice() {
        ClassificationProblem::from_idx(&read_idx_images(img)?, &read_idx_labels(lab)?, 0, 1)?
    } else {
        ClassificationProblem::synthetic(100, 2000, DEFAULT_SEPARATION, 0)?
    };
    println!("n = {}, N = {}", problem.n(), problem.samples());
    let z0 = vec![0.0; problem.n()];
    for sub in [Subsolver::Tcg, Subsolver::Lbfgs(5), Subsolver::Diom(5)] {
        let r = tr_newton(&problem, &z0, &TrustRegionConfig::default(), sub)?;
        println!(
            "{sub:<11} {:<10} outer {:>3}  f = {:.6e}  ‖∇f‖ = {:.2e}  hvps = {}",
            r.status.to_string(),
            r.iterations(),
            r.f,
            r.gnorm,
            r.hvp_evals
        );
    }
    Ok(())
}
