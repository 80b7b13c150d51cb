//! Windowed Arnoldi on a symmetric matrix: with a full window the Hessenberg
//! columns are tridiagonal up to rounding.

use lmkrylov::krylov::{ArnoldiBasis, Window};
use lmkrylov::problems::synthetic_spd;

fn main() -> lmkrylov::error::Result<()> {
    let n = 12;
    let a = synthetic_spd(n, 10.0, 0)?;
    let mut basis = ArnoldiBasis::new(&vec![1.0; n], Window::Full)?;
    for _ in 0..6 {
        let col = basis.step(&a)?;
        let beyond: f64 = (1..col.k.saturating_sub(1))
            .map(|i| col.entry(i).abs())
            .fold(0.0, f64::max);
        println!(
            "k={}  t_kk = {:+.6}  t_k+1,k = {:.6}  max |t_ik| for i < k−1: {:.1e}",
            col.k,
            col.entry(col.k),
            col.subdiag,
            beyond
        );
    }
    let mut windowed = ArnoldiBasis::new(&vec![1.0; n], Window::Limited(2))?;
    for _ in 0..6 {
        windowed.step(&a)?;
    }
    println!(
        "window 2 keeps v_{}..v_{}",
        windowed.len() - 2,
        windowed.len()
    );
    Ok(())
}
