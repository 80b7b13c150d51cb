//! Runs one experiment, writes its trace as JSON and CSV, and reads both back.

use lmkrylov::harness::{run_experiment, ExperimentConfig, MatrixSource, Method, TraceFile};
use lmkrylov::problems::Spectrum;

fn main() -> lmkrylov::error::Result<()> {
    let dir = std::env::temp_dir();
    let json = dir.join("lmkrylov_trace.json");
    let csv = dir.join("lmkrylov_trace.csv");
    let mut cfg = ExperimentConfig {
        matrix: MatrixSource::Synthetic {
            n: 60,
            kappa: 1e4,
            spectrum: Spectrum::LogUniform,
        },
        method: Method::Diom,
        memory: Some(10),
        output: Some(json.clone()),
        ..ExperimentConfig::default()
    };
    let trace = run_experiment(&cfg)?;
    cfg.output = Some(csv.clone());
    run_experiment(&cfg)?;

    let from_json = TraceFile::read(&json)?;
    let from_csv = TraceFile::read(&csv)?;
    println!(
        "{} rows, status {:?}",
        trace.rows.len(),
        trace.header.status
    );
    println!("json round trip exact: {}", from_json.rows == trace.rows);
    println!("csv round trip exact:  {}", from_csv.rows == trace.rows);
    println!("files: {} {}", json.display(), csv.display());
    Ok(())
}
