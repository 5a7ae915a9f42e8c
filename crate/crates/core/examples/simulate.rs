//! Best-response dynamics from a random start, and the exact noisy chain.

use centrality_forge::dynamics::{exact_chain, run_br, RunOptions};
use centrality_forge::equilibrium::classify_family;
use centrality_forge::experiment::random_configuration;
use centrality_forge::graph::structural_metrics;
use centrality_forge::{GameSpec, OutDegreeProfile};

fn main() -> centrality_forge::Result<()> {
    let degrees = OutDegreeProfile::homogeneous(12, 2);
    let spec = GameSpec::uniform(0.85, degrees.clone())?;
    let init = random_configuration(12, &degrees, 11)?;
    let mut options = RunOptions::new(20_000, 11);
    options.potential_every = Some(100);
    let trace = run_br(&spec, &init, options)?;
    println!(
        "{} steps, {} link changes, absorbed: {}",
        trace.steps_run,
        trace.events.len(),
        trace.absorbed
    );
    println!("final: {:?}", trace.final_configuration.adjacency());
    println!("family: {}", classify_family(&trace.final_configuration));
    println!("{:?}", structural_metrics(&trace.final_configuration));
    if let (Some(first), Some(last)) = (trace.potential_series.first(), trace.potential_series.last()) {
        println!("psi went from {:.4} to {:.4}", first.1, last.1);
    }
    assert_eq!(trace.replay()?, trace.final_configuration);

    let small = GameSpec::uniform(0.5, OutDegreeProfile::homogeneous(3, 1))?;
    let chain = exact_chain(&small, 0.3)?;
    println!("noisy chain on {} configurations:", chain.configurations.len());
    for (cfg, (pi, want)) in chain
        .configurations
        .iter()
        .zip(chain.stationary.iter().zip(&chain.predicted))
    {
        println!("  {:?}: stationary {pi:.5}, Gibbs {want:.5}", cfg.adjacency());
    }
    println!("max stationarity error {:.2e}", chain.stationary_error());
    Ok(())
}
