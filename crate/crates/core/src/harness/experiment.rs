//! Linear-solver experiments: one configured run producing a trace file.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::broyden::{broyden_run, PhiSchedule};
use crate::error::{Error, Result};
use crate::harness::mtx::read_matrix_market;
use crate::harness::tracefile::{TraceFile, TraceFormat, TraceHeader};
use crate::krylov::{diom_solve, fom_solve, pcg_solve, Window};
use crate::limited_memory::{lbfgs_solve, lsr1_solve};
use crate::operator::{LinearOperator, Preconditioner};
use crate::problems::{estimate_condition, synthetic_spd_with, Spectrum};
use crate::quadratic::QuadraticModel;
use crate::trace::{ResidualMonitor, SolveOptions, SolveTrace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MatrixSource {
    File {
        path: PathBuf,
    },
    /// [`synthetic_spd_with`] using the experiment seed.
    Synthetic {
        n: usize,
        kappa: f64,
        #[serde(default)]
        spectrum: Spectrum,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cg,
    Fom,
    Diom,
    Lbfgs,
    Lsr1,
    Broyden,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cg" | "pcg" => Method::Cg,
            "fom" => Method::Fom,
            "diom" => Method::Diom,
            "lbfgs" => Method::Lbfgs,
            "lsr1" => Method::Lsr1,
            "broyden" => Method::Broyden,
            _ => return Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Method::Cg => "cg",
            Method::Fom => "fom",
            Method::Diom => "diom",
            Method::Lbfgs => "lbfgs",
            Method::Lsr1 => "lsr1",
            Method::Broyden => "broyden",
        })
    }
}

/// Serializable form of a [`PhiSchedule`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiSpec {
    Bfgs,
    Dfp,
    Sr1,
    Constant(f64),
}

impl PhiSpec {
    pub fn schedule(self) -> PhiSchedule<f64> {
        match self {
            PhiSpec::Bfgs => PhiSchedule::Bfgs,
            PhiSpec::Dfp => PhiSchedule::Dfp,
            PhiSpec::Sr1 => PhiSchedule::Sr1,
            PhiSpec::Constant(v) => PhiSchedule::Constant(v),
        }
    }
}

impl std::str::FromStr for PhiSpec {
    type Err = Error;

    /// `bfgs`, `dfp`, `sr1` or a number.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bfgs" => PhiSpec::Bfgs,
            "dfp" => PhiSpec::Dfp,
            "sr1" => PhiSpec::Sr1,
            _ => PhiSpec::Constant(
                s.parse()
                    .map_err(|_| Error::InvalidArgument(format!("unknown φ schedule '{s}'")))?,
            ),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorSpec {
    /// Every component equal to the value.
    Constant(f64),
    /// Standard normal entries from the experiment seed.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub matrix: MatrixSource,
    pub method: Method,
    /// Window or memory size; `None` means `n`.
    pub memory: Option<usize>,
    pub phi: PhiSpec,
    pub rtol: f64,
    pub atol: f64,
    pub max_iter: usize,
    pub rhs: VectorSpec,
    pub x0: VectorSpec,
    /// Monitor `‖b − A x_k‖` instead of the method's own residual.
    pub direct_residual: bool,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Option<TraceFormat>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            matrix: MatrixSource::Synthetic {
                n: 100,
                kappa: 1e3,
                spectrum: Spectrum::LogUniform,
            },
            method: Method::Cg,
            memory: Some(50),
            phi: PhiSpec::Bfgs,
            rtol: 1e-6,
            atol: 0.0,
            max_iter: 10_000,
            rhs: VectorSpec::Constant(100.0),
            x0: VectorSpec::Constant(0.0),
            direct_residual: false,
            seed: 0,
            output: None,
            format: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.memory == Some(0) {
            return Err(Error::InvalidArgument("memory must be at least 1".into()));
        }
        if !(self.rtol >= 0.0 && self.atol >= 0.0) || (self.rtol == 0.0 && self.atol == 0.0) {
            return Err(Error::InvalidArgument(
                "tolerances must be nonnegative and not both zero".into(),
            ));
        }
        if let MatrixSource::Synthetic { n, kappa, .. } = self.matrix {
            if n == 0 || !(kappa >= 1.0) {
                return Err(Error::InvalidArgument(
                    "synthetic matrix needs n >= 1 and κ >= 1".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions<f64> {
        let monitor = if self.direct_residual {
            ResidualMonitor::Direct
        } else {
            ResidualMonitor::Method
        };
        SolveOptions::default()
            .with_rtol(self.rtol)
            .with_atol(self.atol)
            .with_max_iter(self.max_iter)
            .with_monitor(monitor)
    }
}

/// A loaded system matrix with its label and, for synthetic matrices, `κ₂`.
pub struct LoadedMatrix {
    pub op: Box<dyn LinearOperator<f64>>,
    pub name: String,
    pub kappa: Option<f64>,
}

pub fn load_matrix(source: &MatrixSource, seed: u64) -> Result<LoadedMatrix> {
    match source {
        MatrixSource::File { path } => {
            let a = read_matrix_market(path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            Ok(LoadedMatrix {
                op: Box::new(a),
                name,
                kappa: None,
            })
        }
        &MatrixSource::Synthetic { n, kappa, spectrum } => {
            let a = synthetic_spd_with(n, kappa, spectrum, seed)?;
            let est = estimate_condition(&a, 500, seed)?;
            Ok(LoadedMatrix {
                op: Box::new(a),
                name: format!("synthetic(n={n}, kappa={kappa:e}, {spectrum:?}, seed={seed})"),
                kappa: Some(est.kappa),
            })
        }
    }
}

fn build_vector(spec: VectorSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match spec {
        VectorSpec::Constant(v) => vec![v; n],
        VectorSpec::Random => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
    }
}

/// Runs `config.method` on an already loaded matrix.
pub fn run_on(config: &ExperimentConfig, matrix: &LoadedMatrix) -> Result<(TraceFile, Vec<f64>)> {
    config.validate()?;
    let n = matrix.op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let b = build_vector(config.rhs, n, &mut rng);
    let x0 = build_vector(config.x0, n, &mut rng);
    let model = QuadraticModel::new(matrix.op.as_ref(), b, 0.0)?;
    let opts = config.solve_options();
    let m = config.memory.unwrap_or(n);
    let h0 = Preconditioner::identity;
    let (x, trace): (Vec<f64>, SolveTrace<f64>) = match config.method {
        Method::Cg => pcg_solve(&model, h0(), &x0, &opts)?,
        Method::Fom => fom_solve(&model, &x0, &opts)?,
        Method::Diom => diom_solve(&model, &x0, Window::Limited(m), &opts)?,
        Method::Lbfgs => lbfgs_solve(&model, &x0, m, h0(), &opts)?,
        Method::Lsr1 => {
            let (x, t, _) = lsr1_solve(&model, &x0, m, h0(), &opts)?;
            (x, t)
        }
        Method::Broyden => {
            let run = broyden_run(&model, &x0, h0(), config.phi.schedule(), true, &opts)?;
            (run.x, run.trace)
        }
    };
    let label = match config.method {
        Method::Cg | Method::Fom => config.method.to_string(),
        Method::Broyden => format!("broyden({:?})", config.phi),
        _ => format!("{}({m})", config.method),
    };
    let header = TraceHeader {
        config: Some(config.clone()),
        matrix: matrix.name.clone(),
        n,
        method: label,
        kappa: matrix.kappa,
        status: None,
        iterations: 0,
    };
    Ok((TraceFile::from_trace(header, &trace), x))
}

/// Loads the matrix, runs the solver and writes the trace if an output path is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<TraceFile> {
    config.validate()?;
    let matrix = load_matrix(&config.matrix, config.seed)?;
    let (file, _) = run_on(config, &matrix)?;
    if let Some(path) = &config.output {
        let format = config
            .format
            .unwrap_or_else(|| TraceFormat::from_path(path));
        file.write(path, format)?;
    }
    Ok(file)
}
