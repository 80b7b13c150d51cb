//! Command-line front end: `solve`, `verify`, `trunk`, `inspect`.
//!
//! Exit codes: 0 success, 1 a checked property failed (suite failure,
//! solver not converged), 2 usage or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lmkrylov::harness::{
    run_experiment, verify, ExperimentConfig, MatrixSource, Method, PhiSpec, Suite, TraceFile,
    TraceFormat, VectorSpec, VerifyParams,
};
use lmkrylov::problems::classification::DEFAULT_SEPARATION;
use lmkrylov::problems::{
    read_idx_images, read_idx_labels, AssimilationConfig, ClassificationProblem, Rosenbrock,
    Spectrum,
};
use lmkrylov::trace::SolveStatus;
use lmkrylov::trust_region::{tr_newton, Objective, Subsolver, TrStatus, TrustRegionConfig};

#[derive(Parser)]
#[command(
    name = "lmkrylov",
    version,
    about = "Krylov and quasi-Newton solver harness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an SPD system and write its trace.
    Solve(SolveArgs),
    /// Run a verification suite (or `all`) and print a JSON report.
    Verify(VerifyArgs),
    /// Trust-region Newton on a nonlinear test problem.
    Trunk(TrunkArgs),
    /// Summarize a trace file.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// JSON experiment config; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix Market file (coordinate, symmetric or general).
    #[arg(long, conflicts_with_all = ["n", "kappa"])]
    matrix: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    /// log-uniform or linear.
    #[arg(long)]
    spectrum: Option<Spectrum>,
    /// cg, fom, diom, lbfgs, lsr1 or broyden.
    #[arg(long)]
    method: Option<Method>,
    /// Memory or window size (defaults to n when omitted in the config).
    #[arg(long)]
    memory: Option<usize>,
    /// bfgs, dfp, sr1 or a constant φ.
    #[arg(long)]
    phi: Option<PhiSpec>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Constant right-hand side value, or `random`.
    #[arg(long)]
    rhs: Option<String>,
    /// Constant starting value, or `random`.
    #[arg(long)]
    x0: Option<String>,
    /// Monitor the recomputed residual b − Ax.
    #[arg(long)]
    direct_residual: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// json or csv (default: from the output extension).
    #[arg(long)]
    format: Option<TraceFormat>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name or `all`.
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    spectrum: Option<Spectrum>,
}

#[derive(Args)]
struct TrunkArgs {
    /// rosenbrock, classification or assimilation.
    #[arg(long, default_value = "rosenbrock")]
    problem: String,
    /// tcg, trlbfgs[:m], trdiom[:m] or `all`.
    #[arg(long, default_value = "all")]
    subsolver: String,
    /// Problem dimension (Rosenbrock, synthetic classification, Lorenz-96).
    #[arg(long)]
    n: Option<usize>,
    /// Synthetic classification sample count.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// IDX image file for classification.
    #[arg(long, requires = "labels")]
    images: Option<PathBuf>,
    /// IDX label file for classification.
    #[arg(long, requires = "images")]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    positive: u8,
    #[arg(long, default_value_t = 1)]
    negative: u8,
    #[arg(long, default_value_t = 1e-5)]
    gtol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1.0)]
    delta0: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full outer-iteration logs as JSON.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    trace: PathBuf,
    /// Print the per-row table as well.
    #[arg(long)]
    rows: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.cmd {
        Cmd::Solve(a) => solve(a),
        Cmd::Verify(a) => run_verify(a),
        Cmd::Trunk(a) => trunk(a),
        Cmd::Inspect(a) => inspect(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn vector_spec(s: &str) -> anyhow::Result<VectorSpec> {
    if s == "random" {
        return Ok(VectorSpec::Random);
    }
    Ok(VectorSpec::Constant(
        s.parse()
            .with_context(|| format!("bad vector spec '{s}'"))?,
    ))
}

fn solve(a: SolveArgs) -> anyhow::Result<bool> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).context("parsing config")?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(path) = a.matrix {
        cfg.matrix = MatrixSource::File { path };
    } else if a.n.is_some() || a.kappa.is_some() || a.spectrum.is_some() {
        let (n0, k0, s0) = match cfg.matrix {
            MatrixSource::Synthetic { n, kappa, spectrum } => (n, kappa, spectrum),
            MatrixSource::File { .. } => (100, 1e3, Spectrum::LogUniform),
        };
        cfg.matrix = MatrixSource::Synthetic {
            n: a.n.unwrap_or(n0),
            kappa: a.kappa.unwrap_or(k0),
            spectrum: a.spectrum.unwrap_or(s0),
        };
    }
    if let Some(m) = a.method {
        cfg.method = m;
    }
    if a.memory.is_some() {
        cfg.memory = a.memory;
    }
    if let Some(p) = a.phi {
        cfg.phi = p;
    }
    if let Some(v) = a.rtol {
        cfg.rtol = v;
    }
    if let Some(v) = a.atol {
        cfg.atol = v;
    }
    if let Some(v) = a.max_iter {
        cfg.max_iter = v;
    }
    if let Some(s) = &a.rhs {
        cfg.rhs = vector_spec(s)?;
    }
    if let Some(s) = &a.x0 {
        cfg.x0 = vector_spec(s)?;
    }
    cfg.direct_residual |= a.direct_residual;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.output.is_some() {
        cfg.output = a.output;
    }
    if a.format.is_some() {
        cfg.format = a.format;
    }
    let trace = run_experiment(&cfg)?;
    let last = trace.rows.last();
    let summary = json!({
        "matrix": trace.header.matrix,
        "n": trace.header.n,
        "method": trace.header.method,
        "kappa": trace.header.kappa,
        "status": trace.header.status,
        "iterations": trace.header.iterations,
        "final_rel_res": last.map(|r| r.rel_res),
        "output": cfg.output,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(trace.header.status == Some(SolveStatus::Converged))
}

fn run_verify(a: VerifyArgs) -> anyhow::Result<bool> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse()?]
    };
    let mut params = VerifyParams::default();
    if let Some(v) = a.n {
        params.n = v;
    }
    if let Some(v) = a.kappa {
        params.kappa = v;
    }
    if let Some(v) = a.seed {
        params.seed = v;
    }
    if let Some(v) = a.instances {
        params.instances = v;
    }
    if let Some(v) = a.spectrum {
        params.spectrum = v;
    }
    let mut reports = Vec::new();
    for s in suites {
        let report = verify(s, &params)?;
        eprintln!(
            "{:<22} {} ({}/{} checks)",
            s.name(),
            if report.passed() { "PASS" } else { "FAIL" },
            report.checks.iter().filter(|c| c.passed).count(),
            report.checks.len()
        );
        reports.push(report);
    }
    let passed = reports.iter().all(|r| r.passed());
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({ "passed": passed, "reports": reports }))?
    );
    Ok(passed)
}

fn trunk(a: TrunkArgs) -> anyhow::Result<bool> {
    let subsolvers: Vec<Subsolver> = if a.subsolver == "all" {
        vec![Subsolver::Tcg, Subsolver::Lbfgs(5), Subsolver::Diom(5)]
    } else {
        vec![a.subsolver.parse()?]
    };
    let config = TrustRegionConfig {
        delta0: a.delta0,
        gtol: a.gtol,
        max_iter: a.max_iter,
        ..TrustRegionConfig::default()
    };
    let (obj, z0): (Box<dyn Objective>, Vec<f64>) = match a.problem.as_str() {
        "rosenbrock" => {
            let p = Rosenbrock::new(a.n.unwrap_or(2))?;
            let z0 = p.start();
            (Box::new(p), z0)
        }
        "classification" => {
            let p = match (&a.images, &a.labels) {
                (Some(img), Some(lab)) => {
                    let images = read_idx_images(img)?;
                    let labels = read_idx_labels(lab)?;
                    ClassificationProblem::from_idx(&images, &labels, a.positive, a.negative)?
                }
                _ => ClassificationProblem::synthetic(
                    a.n.unwrap_or(100),
                    a.samples,
                    DEFAULT_SEPARATION,
                    a.seed,
                )?,
            };
            let z0 = vec![0.0; p.n()];
            (Box::new(p), z0)
        }
        "assimilation" => {
            let twin = AssimilationConfig {
                n: a.n.unwrap_or(40),
                seed: a.seed,
                ..AssimilationConfig::default()
            }
            .build()?;
            let z0 = twin.problem.background().to_vec();
            (Box::new(twin.problem), z0)
        }
        other => bail!("unknown problem '{other}'"),
    };
    let mut all_converged = true;
    let mut runs = Vec::new();
    for sub in subsolvers {
        let r = tr_newton(obj.as_ref(), &z0, &config, sub)?;
        println!(
            "{:<12} {:<14} outer {:>4}  f {:.6e}  |g| {:.3e}  hvps {:>6}  grads {:>5}",
            sub.to_string(),
            r.status.to_string(),
            r.iterations(),
            r.f,
            r.gnorm,
            r.hvp_evals,
            r.grad_evals
        );
        all_converged &= r.status == TrStatus::Converged;
        runs.push(json!({ "subsolver": sub.to_string(), "result": r }));
    }
    if let Some(path) = &a.log {
        let file =
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(file, &json!({ "problem": a.problem, "runs": runs }))?;
    }
    Ok(all_converged)
}

fn inspect(a: InspectArgs) -> anyhow::Result<bool> {
    let t = TraceFile::read(&a.trace)?;
    let h = &t.header;
    println!("matrix      {}", h.matrix);
    println!("n           {}", h.n);
    println!("method      {}", h.method);
    match h.kappa {
        Some(k) => println!("kappa       {k:.4e}"),
        None => println!("kappa       -"),
    }
    println!(
        "status      {}",
        h.status.map_or("-".to_string(), |s| s.to_string())
    );
    println!("iterations  {}", t.iterations());
    if let Some(last) = t.rows.last() {
        println!("final rel   {:.3e}", last.rel_res);
    }
    if let Some(best) = t.rows.iter().map(|r| r.rel_res).min_by(f64::total_cmp) {
        println!("best rel    {best:.3e}");
    }
    for tol in [1e-2, 1e-4, 1e-6, 1e-8] {
        let k = t.rows.iter().find(|r| r.rel_res <= tol).map(|r| r.k);
        println!(
            "k(≤{tol:.0e})   {}",
            k.map_or("-".into(), |k| k.to_string())
        );
    }
    if a.rows {
        println!("{:>6} {:>12} {:>12} {:>12}", "k", "rel_res", "alpha", "q");
        for r in &t.rows {
            let alpha = r.alpha.map_or("-".into(), |v| format!("{v:.4e}"));
            println!(
                "{:>6} {:>12.4e} {:>12} {:>12.4e}",
                r.k, r.rel_res, alpha, r.q
            );
        }
    }
    Ok(true)
}
