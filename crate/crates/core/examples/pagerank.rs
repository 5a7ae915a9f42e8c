//! PageRank and normalized hitting times on the butterfly graph.

use centrality_forge::graph::named::butterfly;
use centrality_forge::{hitting_times, pagerank, GameSpec, Rational, Scalar};

fn main() -> centrality_forge::Result<()> {
    let cfg = butterfly();
    let spec = GameSpec::uniform(Rational::frac(1, 2), cfg.degrees())?;
    let pi = pagerank(&spec, &cfg)?;
    for (i, p) in pi.pi.iter().enumerate() {
        println!("pi[{i}] = {p}");
    }
    let table = hitting_times(&spec, &cfg, 0, true)?;
    println!(
        "normalized hitting times to node 0: {:?}",
        table.values.iter().map(|v| v.to_string()).collect::<Vec<_>>()
    );

    let float = GameSpec::uniform(0.85, cfg.degrees())?;
    let pi = pagerank(&float, &cfg)?;
    println!(
        "at beta = 0.85: {:?}",
        pi.pi.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>()
    );
    Ok(())
}
