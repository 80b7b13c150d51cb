//! Runs every verification suite and prints failing checks.
//!
//! `cargo run --example verify_suites -- [n] [kappa]`

use lmkrylov::harness::{verify, Suite, VerifyParams};

fn main() -> lmkrylov::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut params = VerifyParams::default();
    if let Some(n) = args.next() {
        params.n = n.parse().expect("n");
    }
    if let Some(k) = args.next() {
        params.kappa = k.parse().expect("kappa");
    }
    for suite in Suite::ALL {
        let report = verify(suite, &params)?;
        println!(
            "{:<22} {} ({} checks)",
            suite.name(),
            if report.passed() { "pass" } else { "FAIL" },
            report.checks.len()
        );
        for c in report.failures() {
            println!(
                "    {}: {} = {:.3e} > {:.1e}",
                c.invariant, c.name, c.value, c.tol
            );
        }
    }
    Ok(())
}
