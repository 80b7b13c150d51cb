//! Trust-region Newton on Rosenbrock from (−1.2, 1) with each subsolver.

use lmkrylov::problems::Rosenbrock;
use lmkrylov::trust_region::{tr_newton, Subsolver, TrustRegionConfig};

fn main() -> lmkrylov::error::Result<()> {
    let f = Rosenbrock::new(2)?;
    for sub in [Subsolver::Tcg, Subsolver::Lbfgs(2), Subsolver::Diom(2)] {
        let r = tr_newton(&f, &f.start(), &TrustRegionConfig::default(), sub)?;
        println!(
            "{sub:<11} {} in {} outer iterations, z = ({:.8}, {:.8}), hvps {}",
            r.status,
            r.iterations(),
            r.z[0],
            r.z[1],
            r.hvp_evals
        );
    }
    let r = tr_newton(
        &f,
        &f.start(),
        &TrustRegionConfig::default(),
        Subsolver::Tcg,
    )?;
    for it in r.log.iter().take(10) {
        println!(
            "  j={:>2} f={:.4e} Δ={:.3e} ρ={:+.3} {}",
            it.j,
            it.f,
            it.delta,
            it.rho,
            if it.accepted { "accept" } else { "reject" }
        );
    }
    Ok(())
}
