//! A small parallel parameter sweep written as CSV to stdout.

use centrality_forge::experiment::{sweep, write_cells_csv, write_rows_csv, DegreeSpec, SweepSpec};

fn main() -> centrality_forge::Result<()> {
    let spec = SweepSpec {
        n_values: vec![12, 24],
        degree_spec: DegreeSpec::Homogeneous(2),
        beta_grid: vec![0.5, 0.85, 0.95],
        replicas: 4,
        steps: 20_000,
        master_seed: 2024,
        early_stop: true,
        workers: None,
    };
    let outcome = sweep(&spec)?;
    write_rows_csv(&outcome.rows, std::io::stdout())?;
    println!();
    write_cells_csv(&outcome.cells, std::io::stdout())?;
    for failure in &outcome.failures {
        eprintln!(
            "row n={} beta={} replica={} failed: {}",
            failure.n, failure.beta, failure.replica, failure.message
        );
    }
    Ok(())
}
