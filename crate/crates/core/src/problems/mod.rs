//! Nonlinear test problems and synthetic linear systems.

pub mod assimilation;
pub mod checks;
pub mod classification;
pub mod lorenz;
pub mod rosenbrock;
pub mod synthetic;

pub use assimilation::{
    assimilation_fgh, AssimilationConfig, AssimilationProblem, GradientMethod, Observation,
    TwinExperiment,
};
pub use checks::{check_derivatives, gradient_check, hvp_check, hvp_symmetry, DerivativeReport};
pub use classification::{
    classification_fgh, read_idx_images, read_idx_labels, ClassificationProblem, IdxImages,
};
pub use lorenz::{lorenz96_rhs, propagate, propagate_with_jacobian};
pub use rosenbrock::Rosenbrock;
pub use synthetic::{
    estimate_condition, linear_spectrum, log_uniform_spectrum, synthetic_spd, synthetic_spd_with,
    ConditionEstimate, Spectrum,
};
