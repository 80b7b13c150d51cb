//! Twin experiment on Lorenz-96: recover the initial state from noisy
//! partial observations with trust-region Newton.

use lmkrylov::linalg::{norm, sub};
use lmkrylov::problems::AssimilationConfig;
use lmkrylov::trust_region::{tr_newton, Subsolver, TrustRegionConfig};

fn main() -> lmkrylov::error::Result<()> {
    let twin = AssimilationConfig::default().build()?;
    let p = &twin.problem;
    let zb = p.background().to_vec();
    println!(
        "n = {}, f(z_b) = {:.4e}, f(truth) = {:.4e}",
        p.n(),
        p.value(&zb)?,
        p.value(&twin.truth)?
    );
    let cfg = TrustRegionConfig {
        gtol: 1e-6,
        ..TrustRegionConfig::default()
    };
    for s in [Subsolver::Tcg, Subsolver::Lbfgs(5), Subsolver::Diom(5)] {
        let r = tr_newton(p, &zb, &cfg, s)?;
        println!(
            "{s:<11} {} outer {:>3}  f = {:.6e}  ‖z − truth‖/‖truth‖ = {:.3e} (background {:.3e})  hvps {}",
            r.status,
            r.iterations(),
            r.f,
            norm(&sub(&r.z, &twin.truth)) / norm(&twin.truth),
            norm(&sub(&zb, &twin.truth)) / norm(&twin.truth),
            r.hvp_evals
        );
    }
    Ok(())
}
