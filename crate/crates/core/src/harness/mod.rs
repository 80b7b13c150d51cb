//! Matrix input, trace files, the linear-solver experiment runner and the
//! verification suites.

pub mod experiment;
pub mod mtx;
pub mod tracefile;
pub mod verify;

pub use experiment::{
    load_matrix, run_experiment, run_on, ExperimentConfig, LoadedMatrix, MatrixSource, Method,
    PhiSpec, VectorSpec,
};
pub use mtx::{parse_matrix_market, read_matrix_market};
pub use tracefile::{export_trace, TraceFile, TraceFormat, TraceHeader};
pub use verify::{verify, Check, Invariant, Suite, VerifyParams, VerifyReport, MANIFEST};
