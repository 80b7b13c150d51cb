//! DIOM and PCG in lockstep: pivots are reciprocal step lengths, ζ alternates
//! in sign, and PCG directions are rescaled DIOM directions.

use lmkrylov::krylov::{diom_identity_report, diom_solve, pcg_solve, Window};
use lmkrylov::operator::Preconditioner;
use lmkrylov::problems::{synthetic_spd_with, Spectrum};
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::SolveOptions;

fn main() -> lmkrylov::error::Result<()> {
    let n = 30;
    let a = synthetic_spd_with(n, 50.0, Spectrum::Linear, 4)?;
    let model = QuadraticModel::new(&a, vec![1.0; n], 0.0)?;
    let opts = SolveOptions::default()
        .with_rtol(1e-6)
        .with_max_iter(15)
        .keeping_vectors();
    let x0 = vec![0.0; n];
    let (_, pcg) = pcg_solve(&model, Preconditioner::identity(), &x0, &opts)?;
    for m in [1, 3, n] {
        let (_, diom) = diom_solve(&model, &x0, Window::Limited(m), &opts)?;
        let rep = diom_identity_report(&diom, &pcg)?;
        println!("DIOM({m}): {}", serde_json::to_string(&rep).unwrap());
    }
    let (_, diom) = diom_solve(&model, &x0, Window::Limited(1), &opts)?;
    for (d, p) in diom.records().iter().zip(pcg.records()).skip(1).take(5) {
        let (u, a) = (d.u_kk.unwrap_or(f64::NAN), p.alpha.unwrap_or(f64::NAN));
        println!(
            "k={}  u_kk = {u:.6e}  1/α = {:.6e}  ζ = {:+.3e}",
            d.k,
            1.0 / a,
            d.zeta.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
