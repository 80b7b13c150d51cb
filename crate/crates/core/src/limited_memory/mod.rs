//! Limited-memory quasi-Newton operators and their linear solvers.

pub mod lbfgs;
pub mod lsr1;

pub use lbfgs::{lbfgs_apply, lbfgs_push, lbfgs_solve, Lbfgs, LbfgsMemory};
pub use lsr1::{lsr1_apply, lsr1_push, lsr1_solve, Lsr1, Lsr1Memory};
