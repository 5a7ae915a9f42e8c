//! Exhaustive equilibrium catalog for four players with one link each.

use centrality_forge::equilibrium::{enumerate_equilibria, potential_minimizers};
use centrality_forge::{GameSpec, OutDegreeProfile, Rational, Scalar};

fn main() -> centrality_forge::Result<()> {
    let spec = GameSpec::uniform(Rational::frac(1, 2), OutDegreeProfile::homogeneous(4, 1))?;
    let catalog = enumerate_equilibria(&spec, 1_000_000)?;
    let s = &catalog.summary;
    println!(
        "{} configurations: {} Nash, {} strict, {} recursive",
        s.configurations, s.nash, s.strict, s.recursive
    );
    for (family, count) in &s.nash_families {
        println!("  {family}: {count}");
    }
    for e in catalog.filter(|e| e.recursive) {
        println!("recursive: {:?} ({})", e.configuration.adjacency(), e.family);
    }
    for best in potential_minimizers(&spec, 1_000_000)? {
        println!("potential maximizer: {:?}", best.adjacency());
    }
    Ok(())
}
