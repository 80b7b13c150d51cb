//! Krylov solvers: PCG, Arnoldi, FOM and DIOM(m).

pub mod arnoldi;
pub mod diom;
pub mod fom;
pub mod identities;
pub mod pcg;

pub use arnoldi::{arnoldi_step, ArnoldiBasis, ArnoldiColumn, Window};
pub use diom::{diom_solve, Diom, DiomColumn, DiomWindow};
pub use fom::{fom_solve, fom_solve_checked, Fom};
pub use identities::{diom_identity_report, DiomIdentityReport};
pub use pcg::{pcg_solve, Pcg};
