//! Broyden-class runs next to a shadow PCG: the measured proportionality
//! factor γ_k against the recurrence, and the step-length ordering.

use lmkrylov::broyden::{broyden_run, PhiSchedule};
use lmkrylov::operator::Preconditioner;
use lmkrylov::problems::{synthetic_spd_with, Spectrum};
use lmkrylov::quadratic::QuadraticModel;
use lmkrylov::trace::SolveOptions;

fn main() -> lmkrylov::error::Result<()> {
    let n = 20;
    let a = synthetic_spd_with(n, 100.0, Spectrum::Linear, 0)?;
    let b: Vec<f64> = (0..n).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
    let model = QuadraticModel::new(&a, b, 0.0)?;
    let opts = SolveOptions::default().with_rtol(1e-10);
    for (name, schedule) in [
        ("bfgs", PhiSchedule::Bfgs),
        ("dfp", PhiSchedule::Dfp),
        ("phi=0.5", PhiSchedule::Constant(0.5)),
    ] {
        let run = broyden_run(
            &model,
            &vec![0.0; n],
            Preconditioner::identity(),
            schedule,
            true,
            &opts,
        )?;
        println!("{name}: {} iterations", run.trace.iterations());
        println!("   k   γ measured     γ recurrence   α^φ          α^PCG");
        for s in run.steps.iter().take(8) {
            println!(
                "{:>4}   {:<13.6e}  {:<13.6e}  {:<11.5e}  {:.5e}",
                s.k,
                s.gamma_measured.unwrap_or(f64::NAN),
                s.gamma_recurrence,
                s.alpha,
                s.alpha_pcg.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
