//! Conjugate gradients, Broyden-class and limited-memory quasi-Newton
//! methods, FOM/DIOM and their trust-region variants, with tools to check
//! the equivalences between them.

pub mod broyden;
pub mod dense;
pub mod error;
pub mod harness;
pub mod krylov;
pub mod limited_memory;
pub mod linalg;
pub mod operator;
pub mod problems;
pub mod quadratic;
pub mod ring;
pub mod scalar;
pub mod trace;
pub mod trust_region;

pub use error::{Error, Result};
pub use operator::{LinearOperator, Preconditioner};
pub use quadratic::QuadraticModel;
pub use scalar::Real;
pub use trace::{IterRecord, SolveOptions, SolveStatus, SolveTrace};
