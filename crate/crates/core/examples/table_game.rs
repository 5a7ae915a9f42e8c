//! The generic equilibrium checks applied to a two-player payoff table.

use centrality_forge::equilibrium::{full_report, TableGame};

fn main() -> centrality_forge::Result<()> {
    let game = TableGame::identical_interest_example();
    for a in 0..3 {
        for b in 0..3 {
            let report = full_report(&game, &[a, b], 100, 100)?;
            println!(
                "({a}, {b}): nash={} strict={} recursive={:?}",
                report.nash, report.strict, report.recursive
            );
        }
    }
    Ok(())
}
