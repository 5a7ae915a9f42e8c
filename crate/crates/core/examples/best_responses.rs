//! Best-response sets and utilities of every player on a small graph.

use centrality_forge::game::{best_response_set, utility};
use centrality_forge::graph::named::clique_with_source;
use centrality_forge::{GameSpec, Rational, Scalar};

fn main() -> centrality_forge::Result<()> {
    let cfg = clique_with_source(3);
    let spec = GameSpec::uniform(Rational::frac(1, 2), cfg.degrees())?;
    for i in 0..cfg.n() {
        let br = best_response_set(&spec, &cfg, i)?;
        println!(
            "player {i}: plays {:?}, utility {}, fixed {:?}, pool {:?} choose {} ({} best responses)",
            cfg.out(i),
            utility(&spec, &cfg, i)?,
            br.fixed,
            br.pool,
            br.choose,
            br.len()
        );
        if !br.contains(cfg.out(i)) {
            let better = br.iter().next().unwrap();
            let moved = cfg.with_action(i, better.clone())?;
            println!(
                "  switching to {better:?} gives {}",
                utility(&spec, &moved, i)?.to_f64()
            );
        }
    }
    Ok(())
}
